use thiserror::Error;

/// Errors raised while building or evaluating a model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coordinate out of range: {what} ({rows}x{cols} mesh, {cores_per_router} cores per router)")]
    CoordinateOutOfRange {
        what: String,
        rows: u32,
        cols: u32,
        cores_per_router: u32,
    },

    /// A field failed validation. `field` is a JSON pointer into the input document.
    #[error("invalid value at {field}: {message}")]
    Config { field: String, message: String },

    /// The configuration is well formed but does not fit the hardware budget.
    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("mapping error: {0}")]
    Mapping(String),

    #[error("fit error: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
