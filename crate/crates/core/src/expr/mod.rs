//! Expressions for λ0 and s0: parsing, exact parameter binding and Taylor
//! expansion about the expansion point.

mod ast;
mod bind;
mod parse;
mod rational;
mod series;

pub use ast::{Expr, Func};
pub use bind::{bind_parameters, eigen_components, ParameterBinding};
pub use parse::parse_expression;
pub use rational::{rational_form, RationalForm};
pub use series::{expand_scalar_series, expand_series, XSeries};

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function '{name}' at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("malformed rational at byte {offset}: {message}")]
    MalformedRational { offset: usize, message: String },
    #[error("unbound symbol '{0}'")]
    Unbound(String),
    #[error("'{0}' is the eigenvalue or independent variable and cannot be bound to a value")]
    ReservedBinding(String),
    #[error("expression is singular at the expansion point: {0}")]
    Singular(String),
    #[error("the eigenvalue symbol may only appear polynomially; found it inside {0}")]
    EigenNotPolynomial(String),
    #[error("series order {order} exceeds the limit of {limit}")]
    OrderTooLarge { order: usize, limit: usize },
    #[error("'{0}' is not an exact constant")]
    NotExact(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
