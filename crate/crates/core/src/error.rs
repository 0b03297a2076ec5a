use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point of kind `{point}` cannot be used with a `{system}` system")]
    KindMismatch {
        system: &'static str,
        point: &'static str,
    },

    #[error("`{system}` system does not support {structure}")]
    Unsupported {
        system: &'static str,
        structure: &'static str,
    },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("{what} = {value} is outside {allowed}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        allowed: &'static str,
    },

    #[error("transition probability range [{p_min}, {p_max}] leaves the clamp [{lo}, {hi}]")]
    Clamp { p_min: f64, p_max: f64, lo: f64, hi: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("loop does not close: endpoint defect {defect:e}")]
    OpenLoop { defect: f64 },

    #[error("loop closing stagnated at defect {defect:e} after {iterations} iterations")]
    NoClosure { defect: f64, iterations: usize },

    #[error("fundamental-domain reduction did not terminate within {steps} steps")]
    ReductionFailure { steps: usize },

    #[error("observable is not a coboundary: mean {mean:e}")]
    NotACoboundary { mean: f64 },

    #[error(
        "path functional depends on the path at target {target}: \
         discrepancy {discrepancy:e} exceeds allowance {allowance:e}"
    )]
    ObstructionLeak {
        target: usize,
        discrepancy: f64,
        allowance: f64,
    },

    #[error("density grid mismatch: expected {expected} nodes, found {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
