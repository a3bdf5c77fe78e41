//! Mean stationary workload of a single-server queue fed by a
//! CTMC-modulated Cox arrival process.
//!
//! The arrival intensity is `lambda(ct)` for a finite-state chain
//! environment and a modulation rate `c`; service times are IID from one of
//! four families with closed-form moments. The headline statistic is the
//! mean stationary workload `w(c)` (unfinished work), with the customer
//! mean waiting time as a secondary statistic:
//!
//! - [`qbd_mean_workload`] solves the exponential-service case exactly as a
//!   quasi-birth-death process via the matrix-geometric `R` matrix;
//! - [`simulate_mean_workload`] handles general IID service by
//!   discrete-event simulation with exact piecewise-linear workload
//!   integration and batch-means confidence intervals;
//! - [`rolski_bounds`] evaluates the two extreme dependence structures:
//!   the fully averaged environment (a plain Poisson stream at the mean
//!   rate) below, the frozen environment (a mixture over states) above;
//! - [`w_curve`] sweeps `w(c)` over a rate list and reports whether the
//!   curve is non-increasing.

mod bounds;
mod curve;
mod error;
mod estimate;
mod qbd;
mod service;
mod sim;
mod spec;

pub use bounds::{rolski_bounds, RolskiBounds};
pub use curve::{w_curve, CurveMetadata, CurveMethod, CurvePoint, CurveVerdict, WCurve};
pub use error::QueueError;
pub use estimate::{EstimateDiagnostics, EstimateMethod, WorkloadEstimate};
pub use qbd::{qbd_mean_workload, QbdOptions};
pub use service::ServiceDistribution;
pub use sim::{simulate_mean_workload, Horizon, SimOptions, SimulationReport};
pub use spec::{QueueSpec, StabilityReport};

pub type Result<T> = std::result::Result<T, QueueError>;
