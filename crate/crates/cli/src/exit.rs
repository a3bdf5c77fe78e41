use ctmc_core::CtmcError;
use order_lab::OrderError;
use queue_engine::QueueError;

/// Exit codes are a stable contract:
///
/// | code | meaning |
/// |------|---------|
/// | 0    | success / all ordered / decreasing |
/// | 10   | supermodular-order violation found |
/// | 11   | workload-curve violation suspected |
/// | 2    | parse or configuration error |
/// | 3    | chain not irreducible |
/// | 4    | unstable queue without override |
/// | 1    | internal numerical failure |
pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_IRREDUCIBLE: u8 = 3;
pub const EXIT_UNSTABLE: u8 = 4;
pub const EXIT_SM_VIOLATION: u8 = 10;
pub const EXIT_CURVE_VIOLATION: u8 = 11;

/// A failed run: message plus the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: EXIT_PARSE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<CtmcError> for CliError {
    fn from(e: CtmcError) -> Self {
        let code = match &e {
            CtmcError::NotIrreducible { .. } => EXIT_IRREDUCIBLE,
            CtmcError::StationarySolve(_) => EXIT_INTERNAL,
            _ => EXIT_PARSE,
        };
        Self {
            message: e.to_string(),
            code,
        }
    }
}

impl From<OrderError> for CliError {
    fn from(e: OrderError) -> Self {
        match e {
            OrderError::Chain(inner) => inner.into(),
            OrderError::LpFailure(_) => Self {
                message: e.to_string(),
                code: EXIT_INTERNAL,
            },
            _ => Self {
                message: e.to_string(),
                code: EXIT_PARSE,
            },
        }
    }
}

impl From<QueueError> for CliError {
    fn from(e: QueueError) -> Self {
        match e {
            QueueError::Chain(inner) => inner.into(),
            QueueError::Unstable { .. } | QueueError::UnstableWithoutOverride { .. } => Self {
                message: e.to_string(),
                code: EXIT_UNSTABLE,
            },
            QueueError::NoConvergence { .. } | QueueError::Numerical(_) => Self {
                message: e.to_string(),
                code: EXIT_INTERNAL,
            },
            _ => Self {
                message: e.to_string(),
                code: EXIT_PARSE,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self {
            message: e.to_string(),
            code: EXIT_PARSE,
        }
    }
}
