use thiserror::Error;

/// Errors raised by the gas model, the solver, the diagnostics and the
/// experiment runner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical blowup in cell {cell} at t={time}")]
    Blowup { cell: usize, time: f64 },

    #[error("cutoff support [{lo}, {hi}] not covered by grid [{x_min}, {x_max}]")]
    DomainCoverage {
        lo: f64,
        hi: f64,
        x_min: f64,
        x_max: f64,
    },

    #[error("radial direction undefined at the cutoff center")]
    UndefinedDirection,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("reference solution left the smooth regime: {0}")]
    NotSmooth(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
