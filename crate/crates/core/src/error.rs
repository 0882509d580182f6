use std::io;

use thiserror::Error;

/// Errors surfaced by the simulator.
#[derive(Debug, Error)]
pub enum SimError {
    /// A parameter or configuration value violates its contract.
    #[error("configuration error{}: {message}", key.as_ref().map(|k| format!(" in `{k}`")).unwrap_or_default())]
    Config {
        key: Option<String>,
        message: String,
    },

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl SimError {
    pub(crate) fn config(message: impl Into<String>) -> Self {
        SimError::Config {
            key: None,
            message: message.into(),
        }
    }

    pub(crate) fn config_key(key: &str, message: impl Into<String>) -> Self {
        SimError::Config {
            key: Some(key.to_owned()),
            message: message.into(),
        }
    }

    /// The configuration key this error refers to, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            SimError::Config { key, .. } => key.as_deref(),
            SimError::Io(_) => None,
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
