use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("mechanism has no lottery for type (v={v}, w={w})")]
    MissingAssignment { v: String, w: String },

    #[error("invalid lottery: {0}")]
    InvalidLottery(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("internal certificate check failed: {0}")]
    Certificate(String),

    #[error("indicator budget exceeded: {needed} indicators > cap {cap}; reduce the instance or raise the cap")]
    IndicatorBudget { needed: usize, cap: usize },

    #[error("enumeration budget exceeded: {needed} > cap {cap}")]
    EnumerationBudget { needed: u128, cap: u128 },

    #[error("stochastic dominance fails: {0}")]
    Dominance(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable short tag for machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::InvalidDistribution(_) => "invalid_distribution",
            Error::MissingAssignment { .. } => "missing_assignment",
            Error::InvalidLottery(_) => "invalid_lottery",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::MalformedLp(_) => "malformed_lp",
            Error::Certificate(_) => "certificate",
            Error::IndicatorBudget { .. } => "indicator_budget",
            Error::EnumerationBudget { .. } => "enumeration_budget",
            Error::Dominance(_) => "dominance",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
