use thiserror::Error;

/// Errors from order checks and the search drivers.
#[derive(Debug, Clone, Error)]
pub enum OrderError {
    /// Lattice `levels^n` too large for the dense LP formulation.
    #[error("lattice with {size} points exceeds cap {cap}")]
    LatticeCapExceeded { size: usize, cap: usize },

    /// The two laws do not live on the same lattice.
    #[error("grid distributions are incompatible: {0}")]
    IncompatibleLattices(String),

    /// The simplex solver failed to reach a verified solution.
    #[error("LP failure: {0}")]
    LpFailure(String),

    /// Invalid driver configuration (empty c-list, unsorted rates, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Propagated chain-algebra error.
    #[error(transparent)]
    Chain(#[from] ctmc_core::CtmcError),
}
