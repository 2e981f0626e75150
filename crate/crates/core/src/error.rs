use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not divisible by defining function")]
    NotDivisibleByX,

    #[error("transition not invertible near D")]
    NotInvertible,

    #[error("not a bundle transition: {0}")]
    NotABundleTransition(String),

    #[error("frame not adapted: quotient-to-sub block does not vanish on D")]
    FrameNotAdapted,

    #[error("insufficient jet order: need {needed} order(s) of x-precision, have {available}")]
    InsufficientJetOrder { needed: u32, available: u32 },

    #[error("{what} = {value} out of range {range}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        range: String,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error at {field}: {message}")]
    Schema { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: i64, lo: i64, hi: i64) -> Self {
        Error::OutOfRange {
            what,
            value,
            range: format!("[{lo}, {hi}]"),
        }
    }

    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}
