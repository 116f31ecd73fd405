//! Roots of the quantization polynomials: simultaneous root finding,
//! classification, and convergence tracking across checkpoints.

mod aberth;
mod ext;
mod filter;
mod track;

pub use aberth::{find_roots, Root, RootOptions, RootSet, MAX_SWEEPS};
pub use filter::{filter_roots, RootFilter};
pub use track::{track, Checkpoint, ConvergedRoot, ConvergenceTrace, TolMode};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("cannot find roots of the zero polynomial")]
    ZeroPolynomial,
    #[error("a constant polynomial has no roots")]
    ConstantPolynomial,
    #[error(
        "root finding failed at this precision: {failed} roots above the residual bound \
         (worst 1e{worst_residual_log10:.0}); raise dprec"
    )]
    NotConverged { failed: usize, worst_residual_log10: f64 },
}
