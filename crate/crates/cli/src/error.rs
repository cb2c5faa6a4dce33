use serde_json::json;
use silt_core::SiltError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or missing parameter; nothing has been computed yet.
    #[error("invalid value for {field}: {message}")]
    Config { field: String, message: String },

    /// A core routine failed on otherwise valid input.
    #[error("{module}: {message}")]
    Numerical { module: &'static str, message: String },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    /// Replay produced different bytes.
    #[error("replay mismatch: {0}")]
    Mismatch(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config { .. } => 2,
            CliError::Numerical { .. } => 3,
            CliError::Mismatch(_) => 4,
        }
    }

    /// One-line JSON record written to stderr.
    pub fn record(&self) -> serde_json::Value {
        let (kind, field) = match self {
            CliError::Config { field, .. } => ("config", Some(field.as_str())),
            CliError::Numerical { .. } => ("numerical", None),
            CliError::Io { .. } => ("io", None),
            CliError::Mismatch(_) => ("mismatch", None),
        };
        let module = match self {
            CliError::Numerical { module, .. } => Some(*module),
            _ => None,
        };
        json!({
            "error": {
                "kind": kind,
                "field": field,
                "module": module,
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
    }
}

impl From<SiltError> for CliError {
    fn from(e: SiltError) -> Self {
        match e {
            SiltError::Domain { field, reason } => CliError::Config {
                field: field.to_string(),
                message: reason,
            },
            SiltError::Synthesis { .. } => CliError::Numerical {
                module: "fbm",
                message: e.to_string(),
            },
            SiltError::Quadrature { .. } => CliError::Numerical {
                module: "quadrature",
                message: e.to_string(),
            },
            SiltError::Combinatorics(_) => CliError::Numerical {
                module: "arcs",
                message: e.to_string(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(CliError::config("H", "bad").exit_code(), 2);
        let e: CliError = SiltError::Combinatorics("n too large".into()).into();
        assert_eq!(e.exit_code(), 3);
        assert_eq!(e.record()["error"]["module"], "arcs");
        let e: CliError = SiltError::Domain {
            field: "hurst",
            reason: "0 not in (0, 1)".into(),
        }
        .into();
        assert_eq!(e.record()["error"]["field"], "hurst");
    }
}
