use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("interpolation nodes are not pairwise distinct")]
    DuplicateNode,
    #[error("factorization does not multiply out to the claimed polynomial: {0}")]
    InconsistentFactorization(String),
    #[error("invalid subset: {0}")]
    InvalidSubset(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{what}: {needed} exceeds the enumeration budget {cap}")]
    BudgetExceeded { what: &'static str, needed: u128, cap: u128 },
    #[error("search exhausted without a certificate: {0}")]
    ExhaustedSearch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn budget(what: &'static str, needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        Err(Error::BudgetExceeded { what, needed, cap })
    } else {
        Ok(())
    }
}
