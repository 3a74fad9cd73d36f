//! Errors raised while configuring and running experiments.

use lorentz_flow::GeomError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("invalid config at `{location}`: {message}")]
    Config { location: String, message: String },

    #[error("{context}: {source}")]
    Geometry {
        context: String,
        #[source]
        source: GeomError,
    },

    #[error("i/o error on `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn geometry(context: impl Into<String>, source: GeomError) -> Self {
        CliError::Geometry {
            context: context.into(),
            source,
        }
    }
}
