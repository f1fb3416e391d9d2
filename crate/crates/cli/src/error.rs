use std::fmt;

/// Process exit status of a failed command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Config = 2,
    Numeric = 3,
    Io = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Config,
            message: msg.into(),
        }
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Self {
            kind: ExitKind::Numeric,
            message: msg.into(),
        }
    }

    pub fn code(&self) -> i32 {
        self.kind as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<fracfield::Error> for CliError {
    fn from(e: fracfield::Error) -> Self {
        use fracfield::Error as E;
        let kind = match &e {
            E::Dimension(_) | E::InvalidParameter(_) => ExitKind::Config,
            E::NonFinite(_) => ExitKind::Numeric,
            E::Format(_) | E::Io(_) => ExitKind::Io,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self {
            kind: ExitKind::Io,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self {
            kind: ExitKind::Io,
            message: format!("json: {e}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
