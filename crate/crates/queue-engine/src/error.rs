use thiserror::Error;

/// Errors from the workload computations.
#[derive(Debug, Clone, Error)]
pub enum QueueError {
    /// Traffic intensity at or above one.
    #[error("queue is unstable: rho = {rho}")]
    Unstable { rho: f64 },

    /// Simulation of an unstable spec without the explicit override.
    #[error("queue is unstable (rho = {rho}); pass the override to simulate anyway")]
    UnstableWithoutOverride { rho: f64 },

    /// The QBD solver only handles exponential service.
    #[error("exact QBD solution requires exponential service")]
    NotExponentialService,

    /// Fixed-point iteration for the rate matrix did not converge.
    #[error("R iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    /// Invalid queue specification (service parameters, rate lists, ...).
    #[error("invalid queue spec: {0}")]
    InvalidSpec(String),

    /// A dense solve failed (singular boundary system and similar).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Propagated chain-algebra error.
    #[error(transparent)]
    Chain(#[from] ctmc_core::CtmcError),
}
