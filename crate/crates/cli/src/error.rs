use serde::Serialize;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Config,
    Numeric,
    Io,
}

#[derive(Debug, Clone, Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub field: Option<String>,
    pub message: String,
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Config,
            field: Some(field.into()),
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Numeric,
            field: None,
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError {
            kind: ErrorKind::Io,
            field: None,
            message: format!("{}: {err}", path.display()),
        }
    }

    /// Attach a field name to config errors that lack one.
    pub fn at(mut self, field: &str) -> Self {
        if self.kind == ErrorKind::Config && self.field.is_none() {
            self.field = Some(field.to_string());
        }
        self
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Numeric | ErrorKind::Io => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "error": { "kind": self.kind, "field": self.field, "message": self.message },
            "exit_code": self.exit_code(),
        })
    }
}

impl From<sigma_core::Error> for CliError {
    fn from(e: sigma_core::Error) -> Self {
        match e {
            sigma_core::Error::InvalidArgument(m) => CliError {
                kind: ErrorKind::Config,
                field: None,
                message: m,
            },
            other => CliError::numeric(other.to_string()),
        }
    }
}

impl From<sigma_cv::CvError> for CliError {
    fn from(e: sigma_cv::CvError) -> Self {
        match e {
            sigma_cv::CvError::InvalidArgument(m) => CliError {
                kind: ErrorKind::Config,
                field: None,
                message: m,
            },
            sigma_cv::CvError::Core(inner) => inner.into(),
            other => CliError::numeric(other.to_string()),
        }
    }
}
