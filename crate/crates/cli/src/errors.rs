use ctxobs_core::Error as CoreError;

/// Exit codes: 0 success, 2 validation found violations, 3 input error,
/// 4 numeric failure.
pub const EXIT_VIOLATIONS: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Command failures, each carrying a machine-readable code and a message.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or invariant-violating input.
    Input { code: &'static str, message: String },
    /// Numeric machinery failed (eigensolver or optimizer did not converge).
    Numeric { code: &'static str, message: String },
}

impl CliError {
    pub fn input(code: &'static str, message: impl Into<String>) -> Self {
        Self::Input { code, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input { .. } => EXIT_INPUT,
            Self::Numeric { .. } => EXIT_NUMERIC,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Self::Input { code, .. } | Self::Numeric { code, .. } => code,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Input { message, .. } | Self::Numeric { message, .. } => message,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "error[{}]: {}", self.code(), self.message())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match &e {
            CoreError::EigenNoConvergence { .. } => {
                Self::Numeric { code: "eigen-no-convergence", message: e.to_string() }
            }
            CoreError::FitNoConvergence { .. } => {
                Self::Numeric { code: "fit-no-convergence", message: e.to_string() }
            }
            _ => Self::Input { code: "invalid-input", message: e.to_string() },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
