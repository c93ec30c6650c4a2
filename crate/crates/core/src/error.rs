use thiserror::Error;

use crate::dynamics::Mode;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid arena: {0}")]
    InvalidArena(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("drone {drone} is {found:?}, operation requires {expected:?}")]
    WrongMode {
        drone: usize,
        expected: Mode,
        found: Mode,
    },
    #[error("invalid walk parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error("quantization resolution must be positive, got {0}")]
    InvalidResolution(f64),
    #[error("semantic state variant mismatch: expected {expected}, got {found}")]
    VariantMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("state vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("degenerate anchor geometry")]
    DegenerateAnchors,
    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("empty trace")]
    EmptyTrace,
    #[error("misaligned traces ({0} vs {1} slots)")]
    Misaligned(usize, usize),
    #[error("elapsed time must be positive")]
    NoElapsedTime,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// A single offending configuration field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<FieldError>),
    #[error("cannot parse configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot serialize configuration: {0}")]
    Serialize(#[from] toml::ser::Error),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl SimError {
    /// Bad input as opposed to a failure while running.
    pub fn is_validation(&self) -> bool {
        matches!(self, SimError::Config(_))
    }
}
