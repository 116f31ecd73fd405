use rug::Float;

use super::ext::ExtComplex;
use super::RootError;
use crate::numerics::{BigComplex, EPoly, PrecisionContext, Scalar, LOG2_10};
use crate::parallel::Execution;

/// Iteration cap over all precision stages.
pub const MAX_SWEEPS: usize = 1000;

/// One root with its a-posteriori quality measures, both as `log10`.
#[derive(Clone, Debug)]
pub struct Root {
    pub value: BigComplex,
    /// Backward error `|P(z)| / Σ|a_k||z|^k`; `-inf` when `P(z)` is exactly
    /// zero.
    pub residual_log10: f64,
    /// Inclusion radius `deg · |P(z)/P'(z)|`: some root of `P` lies within it.
    pub radius_log10: f64,
}

/// All roots of a polynomial, with multiplicity.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// Degree of the polynomial the roots belong to.
    pub degree: usize,
    /// Total Aberth sweeps used over all stages.
    pub sweeps: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub max_sweeps: usize,
    pub exec: Execution,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            max_sweeps: MAX_SWEEPS,
            exec: Execution::default(),
        }
    }
}

/// Finds every complex root of `p` by Aberth–Ehrlich iteration.
///
/// The iteration runs in stages of rising precision: a double-precision
/// stage with an unbounded exponent locates the roots, then multiprecision
/// stages (256 bits, four times that, and so on up to the working precision)
/// refine them. Each sweep updates all roots from the same previous
/// estimates, so the result does not depend on the thread count. Starting
/// points come from the Newton polygon of the coefficient magnitudes, which
/// copes with coefficients spanning thousands of orders of magnitude.
///
/// A root is accepted once its update drops below `10^(-dprec/2)` relative
/// to `max(1, |z|)`, or once updates stop shrinking while the residual is
/// within the bound (multiple roots only converge to `10^(-dprec/m)`).
pub fn find_roots<T: Scalar>(
    p: &EPoly<T>,
    ctx: &PrecisionContext,
    options: RootOptions,
) -> Result<RootSet, RootError> {
    let mut coeffs: Vec<BigComplex> = p.coeffs().iter().map(|c| c.to_big_complex(ctx)).collect();
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        return Err(RootError::ZeroPolynomial);
    }
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Err(RootError::ConstantPolynomial);
    }
    // Exact zero roots are split off.
    let zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
    coeffs.drain(..zeros);
    let mut roots: Vec<Root> = (0..zeros)
        .map(|_| Root {
            value: BigComplex::zero(ctx),
            residual_log10: f64::NEG_INFINITY,
            radius_log10: f64::NEG_INFINITY,
        })
        .collect();
    let mut sweeps = 0;
    if coeffs.len() > 1 {
        let solver = Aberth::new(coeffs, ctx, options);
        let (found, used) = solver.solve()?;
        roots.extend(found);
        sweeps = used;
    }
    Ok(RootSet { roots, degree, sweeps })
}

struct Aberth {
    coeffs: Vec<BigComplex>,
    ext: Vec<ExtComplex>,
    /// `|a_k|`, for the backward error.
    abs_ext: Vec<ExtComplex>,
    ctx: PrecisionContext,
    options: RootOptions,
}

/// Per-root progress within a stage.
#[derive(Clone, Copy)]
struct Progress {
    done: bool,
    last_log2: f64,
    stalls: u32,
}

impl Progress {
    fn fresh() -> Self {
        Progress {
            done: false,
            last_log2: f64::INFINITY,
            stalls: 0,
        }
    }

    /// Records an update size; true when the root stopped improving.
    fn stalled(&mut self, log2_w: f64) -> bool {
        // Clustered roots converge only linearly, so any steady shrinking
        // counts as progress.
        if log2_w > self.last_log2 - 0.25 {
            self.stalls += 1;
        } else {
            self.stalls = 0;
        }
        self.last_log2 = self.last_log2.min(log2_w);
        self.stalls >= 5
    }
}

impl Aberth {
    fn new(coeffs: Vec<BigComplex>, ctx: &PrecisionContext, options: RootOptions) -> Self {
        let ext: Vec<ExtComplex> = coeffs.iter().map(ExtComplex::from_big).collect();
        let abs_ext = ext
            .iter()
            .map(|c| if c.is_zero() { ExtComplex::ZERO } else { ExtComplex::from_polar_log2(c.log2_abs(), 0.0) })
            .collect();
        Aberth {
            coeffs,
            ext,
            abs_ext,
            ctx: *ctx,
            options,
        }
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn solve(&self) -> Result<(Vec<Root>, usize), RootError> {
        let mut sweeps = 0;
        let z = self.stage_ext(self.initial_guesses(), &mut sweeps);
        let bits = self.ctx.bits();
        let mut stages = Vec::new();
        let mut p = 256;
        while p < bits {
            stages.push(p);
            p *= 4;
        }
        stages.push(bits);
        let mut z: Vec<BigComplex> = z.iter().map(|r| r.to_big(stages[0])).collect();
        for (k, &prec) in stages.iter().enumerate() {
            let last = k + 1 == stages.len();
            z = self.stage_big(z, prec, last, &mut sweeps);
        }
        let roots = self.options.exec.map_slice(&z, |zi| self.certify(zi));
        let bound = self.residual_bound_log10();
        let failed: Vec<&Root> = roots.iter().filter(|r| r.residual_log10 > bound).collect();
        if !failed.is_empty() && sweeps >= self.options.max_sweeps {
            let worst = failed.iter().map(|r| r.residual_log10).fold(f64::NEG_INFINITY, f64::max);
            return Err(RootError::NotConverged {
                failed: failed.len(),
                worst_residual_log10: worst,
            });
        }
        Ok((roots, sweeps))
    }

    /// Accepted residual: `10^(-dprec/2 + guard)`.
    fn residual_bound_log10(&self) -> f64 {
        -(self.ctx.dprec() as f64) / 2.0 + self.ctx.guard() as f64
    }

    /// Guesses on the circles of the Newton polygon of `log|a_k|`.
    fn initial_guesses(&self) -> Vec<ExtComplex> {
        let n = self.degree();
        let pts: Vec<(usize, f64)> = self
            .ext
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.log2_abs()))
            .collect();
        // Upper convex hull, left to right.
        let mut hull: Vec<(usize, f64)> = Vec::new();
        for &pt in &pts {
            while hull.len() >= 2 {
                let (k1, l1) = hull[hull.len() - 2];
                let (k2, l2) = hull[hull.len() - 1];
                let cross = (k2 as f64 - k1 as f64) * (pt.1 - l1) - (l2 - l1) * (pt.0 as f64 - k1 as f64);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let mut out = Vec::with_capacity(n);
        for w in hull.windows(2) {
            let ((k0, l0), (k1, l1)) = (w[0], w[1]);
            let m = k1 - k0;
            let log2_r = (l0 - l1) / m as f64;
            for j in 0..m {
                let angle = std::f64::consts::TAU * (j as f64 / m as f64 + k0 as f64 / n as f64) + 0.4;
                out.push(ExtComplex::from_polar_log2(log2_r, angle));
            }
        }
        out
    }

    /// `P(z)` and `P'(z)` in extended double precision.
    fn horner_ext(&self, z: ExtComplex) -> (ExtComplex, ExtComplex) {
        let n = self.degree();
        let mut p = self.ext[n];
        let mut dp = ExtComplex::ZERO;
        for k in (0..n).rev() {
            dp = dp.mul(z).add(p);
            p = p.mul(z).add(self.ext[k]);
        }
        (p, dp)
    }

    /// `Σ_{j≠i} 1/(z_i - z_j)`.
    fn repulsion(zs: &[ExtComplex], i: usize) -> ExtComplex {
        let mut s = ExtComplex::ZERO;
        for (j, zj) in zs.iter().enumerate() {
            if j != i {
                let d = zs[i].sub(*zj);
                if !d.is_zero() {
                    s = s.add(d.recip());
                }
            }
        }
        s
    }

    /// log2 of `Σ|a_k||z|^k`.
    fn abs_eval_log2(&self, z: ExtComplex) -> f64 {
        let r = if z.is_zero() {
            ExtComplex::ZERO
        } else {
            ExtComplex::from_polar_log2(z.log2_abs(), 0.0)
        };
        let n = self.degree();
        let mut acc = self.abs_ext[n];
        for k in (0..n).rev() {
            acc = acc.mul(r).add(self.abs_ext[k]);
        }
        acc.log2_abs()
    }

    /// log2 of the backward error `|P(z)| / Σ|a_k||z|^k`.
    fn backward_log2(&self, p: ExtComplex, z: ExtComplex) -> f64 {
        if p.is_zero() {
            return f64::NEG_INFINITY;
        }
        p.log2_abs() - self.abs_eval_log2(z)
    }

    fn stage_ext(&self, mut z: Vec<ExtComplex>, sweeps: &mut usize) -> Vec<ExtComplex> {
        let n = z.len();
        let mut progress = vec![Progress::fresh(); n];
        let cap = self.options.max_sweeps / 2;
        while *sweeps < cap && progress.iter().any(|p| !p.done) {
            *sweeps += 1;
            let updates = self.options.exec.map_range(n, |i| {
                if progress[i].done {
                    return None;
                }
                let (p, dp) = self.horner_ext(z[i]);
                if p.is_zero() {
                    return Some((ExtComplex::ZERO, f64::NEG_INFINITY));
                }
                let newton = if dp.is_zero() {
                    // Flat spot: nudge outwards.
                    z[i].mul(ExtComplex::new(1e-3, 1e-3)).add(ExtComplex::new(1e-3, 0.0))
                } else {
                    p.div(dp)
                };
                let s = Self::repulsion(&z, i);
                let denom = ExtComplex::new(1.0, 0.0).sub(newton.mul(s));
                let w = if denom.is_zero() { newton } else { newton.div(denom) };
                let w = if w.is_finite() { w } else { ExtComplex::ZERO };
                Some((w, self.backward_log2(p, z[i])))
            });
            for (i, u) in updates.into_iter().enumerate() {
                let Some((w, back)) = u else { continue };
                z[i] = z[i].sub(w);
                let scale = z[i].log2_abs().max(0.0);
                let lw = w.log2_abs();
                let stalled = progress[i].stalled(lw - scale);
                if lw <= scale - 46.0 || (stalled && back <= -40.0) {
                    progress[i].done = true;
                }
            }
        }
        z
    }

    fn stage_big(&self, z: Vec<BigComplex>, prec: u32, last: bool, sweeps: &mut usize) -> Vec<BigComplex> {
        let n = z.len();
        let coeffs: Vec<BigComplex> = self.coeffs.iter().map(|c| c.with_precision(prec)).collect();
        let mut z: Vec<BigComplex> = z.iter().map(|c| c.with_precision(prec)).collect();
        let (target_log2, bound_log2) = if last {
            (
                -(self.ctx.dprec() as f64) / 2.0 * LOG2_10,
                self.residual_bound_log10() * LOG2_10,
            )
        } else {
            (-(prec as f64) + 12.0, -(prec as f64) / 2.0)
        };
        let mut progress = vec![Progress::fresh(); n];
        while *sweeps < self.options.max_sweeps && progress.iter().any(|p| !p.done) {
            *sweeps += 1;
            let zext: Vec<ExtComplex> = z.iter().map(ExtComplex::from_big).collect();
            let updates = self.options.exec.map_range(n, |i| {
                if progress[i].done {
                    return None;
                }
                let zero = || BigComplex::from_floats(Float::new(prec), Float::new(prec));
                let (p, dp) = horner(&coeffs, &z[i], prec);
                if p.is_zero() {
                    return Some((zero(), f64::NEG_INFINITY));
                }
                let pe = ExtComplex::from_big(&p);
                let dpe = ExtComplex::from_big(&dp);
                let back = self.backward_log2(pe, zext[i]);
                if dpe.is_zero() {
                    return Some((zero(), back));
                }
                // The Aberth correction only rescales the Newton step, so it
                // is formed in extended double precision.
                let newton_ext = pe.div(dpe);
                let s = Self::repulsion(&zext, i);
                let denom = ExtComplex::new(1.0, 0.0).sub(newton_ext.mul(s));
                let factor = if denom.is_zero() { ExtComplex::new(1.0, 0.0) } else { denom.recip() };
                let newton = p.div_ref(&dp).expect("nonzero derivative");
                let w = newton.mul_ref(&factor.to_big(prec));
                Some((w, back))
            });
            for (i, u) in updates.into_iter().enumerate() {
                let Some((w, back)) = u else { continue };
                let lw = w.log2_abs().unwrap_or(f64::NEG_INFINITY);
                z[i].sub_assign_ref(&w);
                let scale = z[i].log2_abs().unwrap_or(f64::NEG_INFINITY).max(0.0);
                let stalled = progress[i].stalled(lw - scale);
                if lw - scale <= target_log2 || (stalled && back <= bound_log2) {
                    progress[i].done = true;
                }
            }
        }
        z
    }

    fn certify(&self, z: &BigComplex) -> Root {
        let bits = self.ctx.bits();
        let (p, dp) = horner(&self.coeffs, z, bits);
        let residual_log10 = self.backward_log2(ExtComplex::from_big(&p), ExtComplex::from_big(z)) / LOG2_10;
        let radius_log10 = match (p.log2_abs(), dp.log2_abs()) {
            (None, _) => f64::NEG_INFINITY,
            (Some(_), None) => f64::INFINITY,
            (Some(a), Some(b)) => (a - b) / LOG2_10 + (self.degree() as f64).log10(),
        };
        Root {
            value: z.clone(),
            residual_log10,
            radius_log10,
        }
    }
}

/// `P(z)` and `P'(z)` at precision `prec`.
fn horner(coeffs: &[BigComplex], z: &BigComplex, prec: u32) -> (BigComplex, BigComplex) {
    let n = coeffs.len() - 1;
    let mut p = coeffs[n].with_precision(prec);
    let mut dp = BigComplex::from_floats(Float::new(prec), Float::new(prec));
    let mut tmp = dp.clone();
    for c in coeffs[..n].iter().rev() {
        tmp.assign_mul(&dp, z);
        std::mem::swap(&mut dp, &mut tmp);
        dp.add_assign_ref(&p);
        tmp.assign_mul(&p, z);
        std::mem::swap(&mut p, &mut tmp);
        p.add_assign_ref(c);
    }
    (p, dp)
}
