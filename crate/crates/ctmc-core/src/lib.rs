//! Finite-state CTMC algebra for randomly modulated arrival intensities.
//!
//! The central object is a [`Ctmc`]: an irreducible generator matrix `Q`
//! together with a state-to-intensity map `lambda` and its cached stationary
//! distribution `pi`. On top of it the crate provides
//!
//! - time-reversal `Q*_ij = (pi_j / pi_i) Q_ji`,
//! - rate modulation `c Q` (the environment observed on the time scale `ct`),
//! - uniformization `P = I + Q/eta` and dampening `(1-c) I + c P`,
//! - transition probabilities `exp(Qt)` via the uniformization series,
//! - finite-dimensional laws of the stationary intensity process on a grid
//!   of time points, lumped onto the distinct intensity levels.
//!
//! States are kept sorted by ascending intensity so that downstream ordering
//! checks (strong stochastic order, supermodular comparisons) can work with
//! row/column indices directly.
//!
//! All types are immutable after construction and every operation is a pure
//! function of its inputs, so values can be shared freely across threads.

mod chain;
mod error;
mod grid;
mod io;
mod policy;
mod transition;

pub use chain::{stationary_distribution, Ctmc};
pub use error::CtmcError;
pub use grid::{finite_dimensional_law, GridDistribution, TimeGrid};
pub use io::{load_chain_file, load_chain_str, ChainFile, LoadReport, StateSpec};
pub use policy::NumericPolicy;
pub use transition::TransitionMatrix;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CtmcError>;
