use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported representation: {0}")]
    Unsupported(String),
    #[error("work budget exceeded: {what} needs {needed} units, budget is {budget}")]
    Budget { what: String, needed: f64, budget: f64 },
    #[error("insufficient data: {0}")]
    Insufficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;
