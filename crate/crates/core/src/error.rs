use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid ring spec `{spec}`: {reason}")]
    RingSpec { spec: String, reason: String },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("polynomial `{0}` is reducible over the prime field")]
    Reducible(String),

    #[error("ring `{0}` is not local: non-units are not closed under {1}")]
    NotLocal(String, &'static str),

    #[error("cap exceeded for {what}: need {needed}, cap is {cap}")]
    CapExceeded { what: String, needed: u64, cap: u64 },

    #[error("invalid category: {0}")]
    InvalidCategory(String),

    #[error("invalid functor: {0}")]
    InvalidFunctor(String),

    #[error("invalid poset: {0}")]
    InvalidPoset(String),

    #[error("not a group action by poset automorphisms: {0}")]
    InvalidAction(String),

    #[error("selected cells do not form a subcomplex in degree {0}")]
    NotSubcomplex(usize),

    #[error("boundary composite is non-zero in degree {0}")]
    BoundarySquare(usize),

    #[error("invalid chain complex: {0}")]
    InvalidComplex(String),

    #[error("invalid order map: {0}")]
    InvalidOrderMap(String),

    #[error("invalid partition data: {0}")]
    InvalidPartition(String),

    #[error("map does not refine the partitions: {0}")]
    NotRefining(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn cap(what: impl Into<String>, needed: u64, cap: u64) -> Self {
        Error::CapExceeded {
            what: what.into(),
            needed,
            cap,
        }
    }

    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
