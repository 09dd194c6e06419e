use std::fmt;

/// Failure of a command, carrying its exit code class.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Io(String),
    Singular(String),
    Verification(String),
    Estimation(String),
    Positivity(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Singular(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Estimation(_) => 5,
            CliError::Positivity(_) => 6,
        }
    }

    /// Classifies a library error raised while validating inputs.
    pub fn from_input(e: glpos::Error) -> Self {
        match e {
            glpos::Error::SingularInput { .. } | glpos::Error::NumericalBreakdown { .. } => {
                CliError::Singular(e.to_string())
            }
            _ => CliError::Parse(e.to_string()),
        }
    }

    /// Classifies a library error raised while estimating.
    pub fn from_estimation(e: glpos::Error) -> Self {
        match e {
            glpos::Error::SingularInput { .. } => CliError::Singular(e.to_string()),
            _ => CliError::Estimation(e.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            CliError::Parse(m) => ("invalid input", m),
            CliError::Io(m) => ("i/o error", m),
            CliError::Singular(m) => ("singular input", m),
            CliError::Verification(m) => ("verification failure", m),
            CliError::Estimation(m) => ("estimation failure", m),
            CliError::Positivity(m) => ("positivity violation", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
