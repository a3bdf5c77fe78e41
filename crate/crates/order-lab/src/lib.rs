//! Structural and stochastic-order verification for modulated intensity
//! chains.
//!
//! Three layers:
//!
//! - structural checks on a single chain: stochastic monotonicity of the
//!   uniformized kernel in the strong order, the same for the time-reversal
//!   (double monotonicity), and the constant-row-rate structure
//!   `q_ij = alpha_i`;
//! - the supermodular stochastic order between finite-dimensional laws,
//!   decided by a linear program over the supermodular cone intersected with
//!   the unit box (elementary cross-difference inequalities generate the
//!   full cone on a product lattice);
//! - drivers: [`sm_decrease_scan`] verifies that the law becomes less
//!   dependent as the modulation rate grows, and [`counterexample_search`]
//!   samples random chains hunting for non-monotone chains whose scans are
//!   nevertheless clean.
//!
//! Scan and search verdicts are evidence over the tested grids only, never
//! proofs.

mod error;
mod monotonicity;
mod policy;
mod scan;
mod search;
pub mod simplex;
mod supermodular;

pub use error::OrderError;
pub use monotonicity::{
    check_ccp_structure, check_doubly_monotone, check_generator_monotonicity,
    check_generator_monotonicity_at, check_stochastic_monotonicity, CcpReport, CcpRow,
    DoubleMonotonicityReport, MonotonicityReport, MonotonicityViolation,
};
pub use policy::OrderPolicy;
pub use scan::{sm_decrease_scan, ScanCell, ScanReport};
pub use search::{counterexample_search, RateSampler, SampleRecord, SearchConfig, SearchReport};
pub use supermodular::{
    expectation, random_supermodular, sm_check, supermodularity_residual, OrderStatus,
    OrderVerdict, SupermodularWitness,
};

pub type Result<T> = std::result::Result<T, OrderError>;
