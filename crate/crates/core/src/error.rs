use serde::Serialize;
use thiserror::Error;

/// Where and why a parse failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseDiagnostics {
    pub position: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl std::fmt::Display for ParseDiagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "at offset {}: {}", self.position, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error)]
pub enum DistError {
    #[error("parse error {0}")]
    Parse(ParseDiagnostics),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported transform: {0}")]
    UnsupportedTransform(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("residual not bracketed: {0}")]
    ResidualNotBracketed(String),
    #[error("e.v. disagreement across ratios: {values:?}")]
    EvDisagreement { values: Vec<(f64, f64)> },
}

pub type Result<T> = std::result::Result<T, DistError>;
