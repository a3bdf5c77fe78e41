use thiserror::Error;

/// Errors produced by chain construction and the CTMC operations.
#[derive(Debug, Clone, Error)]
pub enum CtmcError {
    /// The rate matrix violates the generator contract (signs or row sums).
    #[error("not a generator: row {row}: {reason}")]
    NotAGenerator { row: usize, reason: String },

    /// The directed graph of positive off-diagonal rates is not strongly
    /// connected.
    #[error(
        "chain is not irreducible: state {state} is not in a single closed communicating class"
    )]
    NotIrreducible { state: usize },

    /// Fewer than two states, or more than the configured maximum.
    #[error("unsupported state count {m} (need 2 <= m <= {max})")]
    BadStateCount { m: usize, max: usize },

    /// An intensity value is negative or non-finite.
    #[error("invalid intensity for state {state}: {value}")]
    InvalidIntensity { state: usize, value: f64 },

    /// Intensity vector length does not match the generator dimension.
    #[error("lambda has length {got}, generator has dimension {expected}")]
    IntensityLength { got: usize, expected: usize },

    /// Modulation rate must be strictly positive.
    #[error("modulation rate must be positive, got {0}")]
    InvalidModulation(f64),

    /// Uniformization rate below the largest diagonal magnitude.
    #[error("uniformization rate {eta} is below max |Q_ii| = {required}")]
    EtaTooSmall { eta: f64, required: f64 },

    /// Dampening factor outside (0, 1].
    #[error("dampening factor must lie in (0, 1], got {0}")]
    InvalidDampening(f64),

    /// Transition probabilities requested at a negative time.
    #[error("transition probabilities need t >= 0, got {0}")]
    NegativeTime(f64),

    /// A matrix fails the row-stochastic contract.
    #[error("not a stochastic matrix: row {row}: {reason}")]
    NotStochastic { row: usize, reason: String },

    /// Time grid is empty, non-increasing, or non-finite.
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    /// Grid dimension exceeds the configured cap.
    #[error("grid dimension {n} exceeds cap {cap}")]
    DimensionCapExceeded { n: usize, cap: usize },

    /// A probability mass function fails its contract.
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    /// The stationary linear system could not be solved to tolerance.
    #[error("stationary solve failed: {0}")]
    StationarySolve(String),

    /// Chain specification file could not be parsed.
    #[error("chain file parse error: {0}")]
    Parse(String),
}
