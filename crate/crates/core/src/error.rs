use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("prime table is empty: limit {0} is below 2")]
    EmptyTable(u64),

    #[error("capacity exceeded: requested {requested}, budget {budget}")]
    Capacity { requested: u64, budget: u64 },

    #[error("model undefined at n = {n}: k_n = floor(gamma_n) is 0")]
    ModelUndefined { n: u64 },

    #[error("degenerate distribution: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
