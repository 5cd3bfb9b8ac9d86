use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid rates: w = {w}, mu = {mu} (both must be finite and > 0)")]
    InvalidRates { w: f64, mu: f64 },
    #[error("nu = {0} outside the admissible range {1}")]
    NuOutOfRange(f64, &'static str),
    #[error("no finite critical point: mu = {mu} >= w = {w}")]
    NoCriticalPoint { w: f64, mu: f64 },
    #[error("system size L = {0} must be even and >= 2")]
    InvalidSize(usize),
    #[error("system size L = {size} outside the supported range {min}..={max}")]
    SizeOutOfRange { size: usize, min: usize, max: usize },
    #[error("mode index r = {r} out of range for L = {size}")]
    ModeOutOfRange { r: usize, size: usize },
    #[error("order {order} outside the supported range {min}..={max}")]
    OrderOutOfRange { order: usize, min: usize, max: usize },
    #[error("exact arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("eigensolver failed: {0}")]
    Eigensolver(&'static str),
    #[error("finite-difference error estimate {estimate:e} exceeds tolerance {tol:e}")]
    ToleranceExceeded { estimate: f64, tol: f64 },
}
