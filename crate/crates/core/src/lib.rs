//! Eigenvalues of `y'' = λ0(x) y' + s0(x) y` by the improved asymptotic
//! iteration method, in arbitrary precision.

pub mod aim;
pub mod expr;
pub mod numerics;
pub mod parallel;
pub mod roots;
