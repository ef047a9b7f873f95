use std::fmt;

use qtomo::TomoError;

/// Exit status for validation failures (bad scenario, bad arguments).
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status for numerical failures (e.g. an ill-conditioned quorum).
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
}

/// Error reported by a command, anchored to a scenario line when known.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    /// Dotted path of the offending scenario field, if any.
    pub field: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Validation,
            field: None,
            line: None,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Numerical,
            field: None,
            line: None,
            message: message.into(),
        }
    }

    pub fn at(mut self, field: &str) -> Self {
        if self.field.is_none() {
            self.field = Some(field.to_string());
        }
        self
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Validation => EXIT_VALIDATION,
            ErrorKind::Numerical => EXIT_NUMERICAL,
        }
    }

    /// Resolves `line` from the field name by locating its key in `source`.
    pub fn anchor(mut self, source: &str) -> Self {
        if self.line.is_some() {
            return self;
        }
        if let Some(field) = &self.field {
            let key = field.rsplit('.').next().unwrap_or(field);
            let needle = format!("\"{key}\"");
            self.line = source.lines().position(|l| l.contains(&needle)).map(|i| i + 1);
        }
        self
    }

    /// `file:line: field: message`, omitting unknown parts.
    pub fn render(&self, file: &str) -> String {
        let mut out = format!("error: {file}");
        if let Some(line) = self.line {
            out.push_str(&format!(":{line}"));
        }
        out.push_str(": ");
        if let Some(field) = &self.field {
            out.push_str(field);
            out.push_str(": ");
        }
        out.push_str(&self.message);
        out
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            Some(field) => write!(f, "{field}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for CliError {}

impl From<TomoError> for CliError {
    fn from(err: TomoError) -> Self {
        let kind = match err {
            TomoError::Conditioning { .. } | TomoError::Numerical(_) => ErrorKind::Numerical,
            _ => ErrorKind::Validation,
        };
        let message = match &err {
            TomoError::Design {
                mean_residual,
                moment_residual,
            } => {
                let mut failed = Vec::new();
                if *mean_residual > qtomo::qudit::DESIGN_TOLERANCE {
                    failed.push("zero-mean condition (sum of directions vanishes)");
                }
                if *moment_residual > qtomo::qudit::DESIGN_TOLERANCE {
                    failed.push("second-moment condition (average n n^T equals I/3)");
                }
                format!("{err}; violated: {}", failed.join(", "))
            }
            _ => err.to_string(),
        };
        Self {
            kind,
            field: None,
            line: None,
            message,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        let line = (err.line() > 0).then_some(err.line());
        Self {
            kind: ErrorKind::Validation,
            field: None,
            line,
            message: err.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
