use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the set where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A merged-grid cell whose 2x2 increment covariance could not be factored,
    /// even after one diagonal jitter.
    #[error("cell {cell} on ({start}, {end}] has a non positive definite covariance (v1={v1}, v={v}, v2={v2})")]
    NotPositiveDefinite {
        cell: usize,
        start: f64,
        end: f64,
        v1: f64,
        v: f64,
        v2: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

macro_rules! domain {
    ($($arg:tt)*) => {
        $crate::Error::Domain(::alloc::format!($($arg)*))
    };
}

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::Error::Invalid(::alloc::format!($($arg)*))
    };
}

pub(crate) use domain;
pub(crate) use invalid;
