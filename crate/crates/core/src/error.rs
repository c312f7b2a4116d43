use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {constraint}")]
    InvalidParameter {
        name: &'static str,
        constraint: String,
    },

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("empty range: {0}")]
    EmptyRange(&'static str),

    #[error("no interior maximum of the threshold on (0, {r_max}]")]
    NoInteriorMaximum { r_max: f64 },

    #[error("trial count must be at least 1")]
    TrialsZero,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, constraint: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        constraint: constraint.into(),
    }
}
