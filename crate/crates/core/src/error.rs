use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("chart mismatch: expected dimension {expected}, found {found}")]
    ChartMismatch { expected: usize, found: usize },

    #[error("degree error: {0}")]
    Degree(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("bivector is not fiberwise linear; offending components: {}", .0.join(", "))]
    NonLinear(Vec<String>),

    #[error("transversality fails at {point:?}: {detail}")]
    Transversality { point: Vec<f64>, detail: String },

    #[error("trajectory from {start:?} left the admissible domain at time {time}")]
    DomainEscape { start: Vec<f64>, time: f64 },

    #[error("2-form is not closed")]
    NotClosed,

    #[error("frame is not Lagrangian: {0}")]
    NotLagrangian(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("form is degenerate at {point:?} (condition number {condition:e})")]
    Degenerate { point: Vec<f64>, condition: f64 },

    #[error("adjoint chart violates its invariants (residual {residual:e})")]
    AdInvariant { residual: f64 },

    #[error("group chart failure: {0}")]
    Chart(String),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ChartMismatch { expected, found })
    }
}
