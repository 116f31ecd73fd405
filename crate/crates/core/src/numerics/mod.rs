//! Multiprecision scalars and the polynomial ring in the eigenvalue symbol.

mod complex;
mod context;
mod epoly;
mod exact;
mod real;
mod scalar;

pub use complex::BigComplex;
pub use context::{PrecisionContext, DEFAULT_GUARD, MIN_DPREC};
pub use epoly::EPoly;
pub use exact::ExactComplex;
pub use real::BigReal;
pub use scalar::Scalar;

pub(crate) use context::LOG2_10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("precision of {dprec} digits is below the minimum of {MIN_DPREC}")]
    Precision { dprec: u32 },
    #[error("{0} is not available in this coefficient field")]
    Unsupported(&'static str),
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("imaginary value in a real field")]
    ComplexInRealField,
    #[error("cannot parse number {0:?}")]
    Parse(String),
    #[error("operands were built under different precision contexts")]
    ContextMismatch,
}
