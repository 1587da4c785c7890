use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain the operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative solver failed to converge.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A derived probability left [0, 1], meaning the rate vector is unusable.
    #[error("inconsistent probabilities: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub(crate) fn check_probability(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {value} is not a probability")))
    }
}
