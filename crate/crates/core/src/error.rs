use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("incompatible operands: {0}")]
    Incompatible(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("box overflow at s = {s}: half-side exp({exponent}) is not representable; lower s or raise precision")]
    BoxOverflow { s: f64, exponent: f64 },

    #[error("precision insufficient at s = {s}: truncation error {truncation:e} vs. residual scale {scale:e}; raise precision bits above {bits}")]
    PrecisionInsufficient { s: f64, truncation: f64, scale: f64, bits: u32 },

    #[error("enumeration budget exhausted ({0})")]
    EnumerationExhausted(String),

    #[error("integer coordinate overflow while {0}")]
    CoordinateOverflow(String),

    #[error("flow error at s = {s}: {source}")]
    AtFlowTime {
        s: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search bracket exhausted: {0}")]
    BracketExhausted(String),

    #[error("inconsistent sample: {0}")]
    Inconsistent(String),

    #[error("trace too short: {0}")]
    TraceTooShort(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("empty candidate pool: {0}")]
    EmptyPool(String),

    #[error("missing inputs for {name}: {missing:?}")]
    MissingInputs { name: String, missing: Vec<String> },

    #[error("no real root: {0}")]
    NoRealRoot(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at(self, s: f64) -> Error {
        match self {
            e @ Error::AtFlowTime { .. } => e,
            e => Error::AtFlowTime { s, source: Box::new(e) },
        }
    }
}
