use thiserror::Error;

/// Failure of a CLI run, classified by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config file, field expression or grid request.
    #[error("{0}")]
    Config(String),
    /// Numerical or I/O failure after the configuration was accepted.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<gaussym::Error> for CliError {
    fn from(e: gaussym::Error) -> Self {
        use gaussym::Error as E;
        match e {
            E::BudgetExceeded { .. }
            | E::InvalidGrid(_)
            | E::UnknownFamily(_)
            | E::InvalidParameter { .. }
            | E::Syntax { .. }
            | E::Arity { .. }
            | E::VariableOutOfRange { .. }
            | E::InvalidIntervals(_)
            | E::InvalidNorm(_)
            | E::InvalidArgument(_) => CliError::Config(e.to_string()),
            E::Domain(_)
            | E::InvalidProfile(_)
            | E::WeightSum(_)
            | E::NonFinite(_)
            | E::NonSmoothField(_)
            | E::Bisection(_)
            | E::Precondition(_) => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
