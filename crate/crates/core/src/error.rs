use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("state space of {entries} entries exceeds the cap of {cap}")]
    TooLarge { entries: u128, cap: usize },
    #[error("model error: {0}")]
    Model(String),
    #[error("decoder error: {0}")]
    Decoder(String),
    #[error("constraint violated: {what} (residual {residual:e})")]
    Constraint { what: String, residual: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error(
        "no source block passed the typicality filter ({accepted} of {trials} accepted, rate {acceptance_rate})"
    )]
    InsufficientSamples {
        trials: usize,
        accepted: usize,
        acceptance_rate: f64,
    },
}
