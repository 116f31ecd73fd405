//! The improved asymptotic iteration: Taylor-coefficient recursions for
//! `λ_n`, `s_n` and the quantization polynomials `δ_n(E)`.

mod seed;
mod state;

use std::sync::Arc;

use rug::Rational;
use serde::{Deserialize, Serialize};

pub use seed::{Seed, SeedOptions};
pub use state::{delta, AimState, QuantizationDelta};

use crate::expr::{Expr, ExprError};
use crate::numerics::{BigComplex, BigReal, NumericsError, PrecisionContext, Scalar, DEFAULT_GUARD};
use crate::parallel::Execution;
use crate::roots::{
    filter_roots, find_roots, track, Checkpoint, ConvergenceTrace, RootError, RootFilter, RootOptions, TolMode,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AimError {
    #[error("seed mismatch: {0}")]
    SeedMismatch(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("truncation order exhausted at n = {n}; increase nmax or the initial order")]
    Exhausted { n: usize },
    #[error("states {prev} and {curr} are not consecutive iterations of one seed")]
    NonConsecutive { curr: usize, prev: usize },
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error("invalid solver parameter: {0}")]
    Params(String),
}

/// Solver settings. `tol` and `real_eps` are given as `log10` so values far
/// below the `f64` range (the paper's `1e-101` is fine either way, `1e-400`
/// is not) can be expressed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverParams {
    pub nmax: usize,
    pub nstep: usize,
    pub dprec: u32,
    pub guard: u32,
    pub tol_log10: f64,
    pub tol_mode: TolMode,
    /// Expansion point.
    #[serde(with = "rational_text")]
    pub x0: Rational,
    pub filter: RootFilter,
    /// Printed fraction digits.
    pub digits: usize,
    /// `log10` of the largest imaginary part counted as real; `None` means
    /// `-dprec/4`.
    pub real_eps_log10: Option<f64>,
    /// Renderer stride over checkpoints.
    pub print_every: usize,
    pub exec: Execution,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            nmax: 101,
            nstep: 10,
            dprec: 200,
            guard: DEFAULT_GUARD,
            tol_log10: -20.0,
            tol_mode: TolMode::Distance,
            x0: Rational::from(0),
            filter: RootFilter::All,
            digits: 20,
            real_eps_log10: None,
            print_every: 1,
            exec: Execution::default(),
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<PrecisionContext, AimError> {
        if self.nmax == 0 {
            return Err(AimError::Params("nmax must be at least 1".into()));
        }
        if self.nstep == 0 || self.nstep > self.nmax {
            return Err(AimError::Params(format!("nstep must be in 1..={}", self.nmax)));
        }
        if self.digits == 0 {
            return Err(AimError::Params("digits must be at least 1".into()));
        }
        if self.print_every == 0 {
            return Err(AimError::Params("print_every must be at least 1".into()));
        }
        if !self.tol_log10.is_finite() {
            return Err(AimError::Params("tol must be a positive finite number".into()));
        }
        let ctx = PrecisionContext::new(self.dprec, self.guard)?;
        if self.digits > (self.dprec.saturating_sub(self.guard)) as usize {
            return Err(AimError::Params(format!(
                "digits ({}) exceed dprec - guard ({})",
                self.digits,
                self.dprec.saturating_sub(self.guard)
            )));
        }
        Ok(ctx)
    }

    pub fn real_eps_log10(&self) -> f64 {
        self.real_eps_log10.unwrap_or(-(self.dprec as f64) / 4.0)
    }

    /// `1, 1 + nstep, 1 + 2 nstep, ... <= nmax`.
    pub fn checkpoints(&self) -> Vec<usize> {
        (1..=self.nmax).step_by(self.nstep.max(1)).collect()
    }
}

mod rational_text {
    use rug::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Bound `λ0`, `s0` in the eigenvalue symbol and the variable.
#[derive(Clone, Debug)]
pub struct AimProblem {
    pub lambda0: Expr,
    pub s0: Expr,
    pub eigen: String,
    pub var: String,
}

impl AimProblem {
    pub fn is_real(&self) -> bool {
        !self.lambda0.contains_imag() && !self.s0.contains_imag()
    }
}

/// Iterates to `nmax`, finds and filters the roots of `δ_n` at every
/// checkpoint and tracks them. Real problems run in real arithmetic.
pub fn run(problem: &AimProblem, params: &SolverParams) -> Result<ConvergenceTrace, AimError> {
    if problem.is_real() {
        run_in::<BigReal>(problem, params)
    } else {
        run_in::<BigComplex>(problem, params)
    }
}

/// All `δ_n` at the checkpoints, unnormalized.
pub fn deltas<T>(problem: &AimProblem, params: &SolverParams) -> Result<Vec<QuantizationDelta<T>>, AimError>
where
    T: Scalar<Context = PrecisionContext>,
{
    let ctx = params.validate()?;
    let seed = Seed::<T>::build(
        &problem.lambda0,
        &problem.s0,
        &problem.eigen,
        &problem.var,
        &params.x0,
        params.nmax + 1,
        &ctx,
        SeedOptions::default(),
    )?;
    let marks = params.checkpoints();
    let mut out = Vec::with_capacity(marks.len());
    let mut prev = AimState::seed(Arc::new(seed));
    let mut next_mark = marks.iter().peekable();
    for _ in 1..=params.nmax {
        let curr = prev.iterate(params.exec)?;
        if next_mark.peek().is_some_and(|&&m| m == curr.n()) {
            next_mark.next();
            out.push(delta(&curr, &prev)?);
        }
        prev = curr;
    }
    Ok(out)
}

fn run_in<T>(problem: &AimProblem, params: &SolverParams) -> Result<ConvergenceTrace, AimError>
where
    T: Scalar<Context = PrecisionContext>,
{
    let ctx = params.validate()?;
    let ds = deltas::<T>(problem, params)?;
    let options = RootOptions {
        exec: params.exec,
        ..RootOptions::default()
    };
    let eps = params.real_eps_log10();
    let found = params.exec.map_slice(&ds, |d| -> Result<Checkpoint, AimError> {
        // Degenerate problems (λ0 ≡ 0, say) give constant or zero δ_n: no
        // roots, which surfaces as "no converged eigenvalues".
        let poly = d.poly.monic().unwrap_or_else(|| d.poly.clone());
        match find_roots(&poly, &ctx, options) {
            Ok(set) => Ok(Checkpoint {
                n: d.n,
                roots: filter_roots(&set.roots, params.filter, eps),
                degree: set.degree,
            }),
            Err(RootError::ZeroPolynomial | RootError::ConstantPolynomial) => Ok(Checkpoint {
                n: d.n,
                roots: Vec::new(),
                degree: 0,
            }),
            Err(e) => Err(e.into()),
        }
    });
    let checkpoints = found.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(track(checkpoints, params.tol_log10, params.tol_mode))
}
