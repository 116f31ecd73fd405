//! Independent finite-difference eigenvalues for radial problems
//! `u'' = (W(r) - ε) u` with a regular solution at the origin and
//! `u(r_max) = 0`, by Numerov integration and node-counting bisection in
//! double precision.

use aimkit::expr::{Expr, Func};

/// Grid and potential for [`numerov_oracle`]. Eigenvalues are reported as
/// `ε / energy_scale`, so a Schrödinger equation with `2m/ħ² ≠ 1` can be
/// written directly.
#[derive(Clone, Debug)]
pub struct OracleSpec {
    pub potential: Expr,
    pub var: String,
    pub energy_scale: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub h: f64,
    /// Search window in `ε`; defaults to the potential minimum and an
    /// upward search.
    pub e_min: Option<f64>,
    pub e_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("potential is not finite at r = {0}")]
    NotFinite(f64),
    #[error("only {found} eigenvalues below {e_max} (wanted {wanted})")]
    WindowExhausted { found: usize, wanted: usize, e_max: f64 },
}

impl OracleSpec {
    /// Defaults `r_min = 1e-6`, `r_max = 60`, `h = 1/2000`.
    pub fn default_for(potential: Expr, var: &str) -> Self {
        OracleSpec {
            potential,
            var: var.to_string(),
            energy_scale: 1.0,
            r_min: 1e-6,
            r_max: 60.0,
            h: 1.0 / 2000.0,
            e_min: None,
            e_max: None,
        }
    }
}

/// Evaluates a bound real expression at `var = x`. `NaN` for anything
/// non-real.
pub fn eval_f64(e: &Expr, var: &str, x: f64) -> f64 {
    match e {
        Expr::Rational(q) => q.to_f64(),
        Expr::Imag => f64::NAN,
        Expr::Symbol(s) if s == var => x,
        Expr::Symbol(_) => f64::NAN,
        Expr::Neg(a) => -eval_f64(a, var, x),
        Expr::Add(xs) => xs.iter().map(|t| eval_f64(t, var, x)).sum(),
        Expr::Mul(xs) => xs.iter().map(|t| eval_f64(t, var, x)).product(),
        Expr::Div(a, b) => eval_f64(a, var, x) / eval_f64(b, var, x),
        Expr::PowInt(a, k) => eval_f64(a, var, x).powi(*k as i32),
        Expr::PowRat(a, q) => eval_f64(a, var, x).powf(q.to_f64()),
        Expr::Func(f, a) => {
            let v = eval_f64(a, var, x);
            match f {
                Func::Exp => v.exp(),
                Func::Log => v.ln(),
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Sqrt => v.sqrt(),
            }
        }
    }
}

struct Grid {
    w: Vec<f64>,
    r_min: f64,
    h: f64,
}

impl Grid {
    fn new(spec: &OracleSpec) -> Result<Self, OracleError> {
        if !(spec.h > 0.0 && spec.r_min > 0.0 && spec.r_max > spec.r_min) {
            return Err(OracleError::Grid(format!(
                "need h > 0 and 0 < r_min < r_max (h = {}, r_min = {}, r_max = {})",
                spec.h, spec.r_min, spec.r_max
            )));
        }
        let n = ((spec.r_max - spec.r_min) / spec.h).round() as usize;
        if n < 10 {
            return Err(OracleError::Grid("fewer than 10 grid steps".into()));
        }
        let h = (spec.r_max - spec.r_min) / n as f64;
        let mut w = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let r = spec.r_min + i as f64 * h;
            let v = eval_f64(&spec.potential, &spec.var, r);
            if !v.is_finite() {
                return Err(OracleError::NotFinite(r));
            }
            w.push(v);
        }
        Ok(Grid { w, r_min: spec.r_min, h })
    }

    /// Sign changes of the regular solution, counting the end point: the
    /// number of eigenvalues below `e` with `u(0) = u(r_max) = 0`.
    fn count_below(&self, e: f64) -> usize {
        let c = self.h * self.h / 12.0;
        let f = |i: usize| 1.0 - c * (self.w[i] - e);
        // u ~ r near the origin. Starting from u(r_min) = 0 instead would
        // shift every level by about u'(0)^2 r_min.
        let mut u0 = self.r_min;
        let mut u1 = self.r_min + self.h;
        let mut nodes = 0;
        let mut last_sign = 1.0f64;
        for i in 1..self.w.len() - 1 {
            let u2 = ((12.0 - 10.0 * f(i)) * u1 - f(i - 1) * u0) / f(i + 1);
            if u2 != 0.0 && u2.signum() != last_sign {
                nodes += 1;
                last_sign = u2.signum();
            }
            u0 = u1;
            u1 = u2;
            let m = u1.abs().max(u0.abs());
            if m > 1e200 {
                u0 /= m;
                u1 /= m;
            }
        }
        nodes
    }
}

/// The lowest `count` eigenvalues, ascending.
pub fn numerov_oracle(spec: &OracleSpec, count: usize) -> Result<Vec<f64>, OracleError> {
    let grid = Grid::new(spec)?;
    let lo0 = spec
        .e_min
        .unwrap_or_else(|| grid.w.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0);
    // Upper end: given, or doubled until enough states lie below it.
    let hi0 = match spec.e_max {
        Some(e) => {
            let found = grid.count_below(e);
            if found < count {
                return Err(OracleError::WindowExhausted {
                    found,
                    wanted: count,
                    e_max: e / spec.energy_scale,
                });
            }
            e
        }
        None => {
            let mut step = 1.0;
            let mut e = lo0 + step;
            while grid.count_below(e) < count {
                step *= 2.0;
                e = lo0 + step;
                if step > 1e12 {
                    return Err(OracleError::WindowExhausted {
                        found: grid.count_below(e),
                        wanted: count,
                        e_max: e / spec.energy_scale,
                    });
                }
            }
            e
        }
    };
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        // Smallest e with count_below(e) >= k + 1.
        let (mut lo, mut hi) = (lo0, hi0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if grid.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi) / spec.energy_scale);
    }
    Ok(out)
}
