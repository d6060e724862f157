use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what} = {value} exceeds the cap {cap}")]
    SizeCap {
        what: &'static str,
        value: u64,
        cap: u64,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("target is unreachable: {0}")]
    Unreachable(String),
    #[error("parameter out of range: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_cap(what: &'static str, value: usize, cap: usize) -> Result<()> {
    if value > cap {
        Err(Error::SizeCap {
            what,
            value: value as u64,
            cap: cap as u64,
        })
    } else {
        Ok(())
    }
}
