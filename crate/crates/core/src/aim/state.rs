use std::sync::Arc;

use super::{AimError, Seed};
use crate::numerics::{EPoly, Scalar};
use crate::parallel::Execution;

/// Coefficient arrays `c_n^i`, `d_n^i` for `i = 0..=I_n` at level `n`.
#[derive(Clone, Debug)]
pub struct AimState<T: Scalar> {
    n: usize,
    c: Vec<EPoly<T>>,
    d: Vec<EPoly<T>>,
    seed: Arc<Seed<T>>,
}

/// `δ_n(E) = d_n^0 c_{n-1}^0 - d_{n-1}^0 c_n^0`.
#[derive(Clone, Debug)]
pub struct QuantizationDelta<T: Scalar> {
    pub n: usize,
    pub poly: EPoly<T>,
}

impl<T: Scalar> AimState<T> {
    /// Level 0: the Taylor coefficients of λ0 and s0 themselves.
    pub fn seed(seed: Arc<Seed<T>>) -> Self {
        AimState {
            n: 0,
            c: seed.c0.clone(),
            d: seed.d0.clone(),
            seed,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Retained truncation order `I_n`.
    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn c(&self) -> &[EPoly<T>] {
        &self.c
    }

    pub fn d(&self) -> &[EPoly<T>] {
        &self.d
    }

    /// Level `n + 1`:
    /// `c_{n+1}^i = (i+1) c_n^{i+1} + d_n^i + Σ_j λ0_j c_n^{i-j}` and
    /// `d_{n+1}^i = (i+1) d_n^{i+1} + Σ_j s0_j c_n^{i-j}`.
    pub fn iterate(&self, exec: Execution) -> Result<Self, AimError> {
        let len = self.order();
        if len == 0 {
            return Err(AimError::Exhausted { n: self.n });
        }
        let (lam, s) = exec.join(
            || self.seed.convolve_lambda(&self.c, len, exec),
            || self.seed.convolve_s(&self.c, len, exec),
        );
        let rows = exec.map_range(len, |i| {
            let k = (i + 1) as u32;
            let mut c = self.c[i + 1].clone();
            c.mul_u32_assign(k);
            c.add_assign_unchecked(&self.d[i]);
            c.add_assign_unchecked(&lam[i]);
            let mut d = self.d[i + 1].clone();
            d.mul_u32_assign(k);
            d.add_assign_unchecked(&s[i]);
            (c, d)
        });
        let (c, d) = rows.into_iter().unzip();
        Ok(AimState {
            n: self.n + 1,
            c,
            d,
            seed: Arc::clone(&self.seed),
        })
    }
}

/// Quantization polynomial from two consecutive levels.
pub fn delta<T: Scalar>(curr: &AimState<T>, prev: &AimState<T>) -> Result<QuantizationDelta<T>, AimError> {
    if curr.n != prev.n + 1 || !Arc::ptr_eq(&curr.seed, &prev.seed) {
        return Err(AimError::NonConsecutive {
            curr: curr.n,
            prev: prev.n,
        });
    }
    let ctx = &curr.seed.ctx;
    let mut tmp = T::zero(ctx);
    let mut a = EPoly::zero(ctx);
    a.add_mul_assign(&curr.d[0], &prev.c[0], &mut tmp);
    let mut b = EPoly::zero(ctx);
    b.add_mul_assign(&prev.d[0], &curr.c[0], &mut tmp);
    a.sub_assign_unchecked(&b);
    Ok(QuantizationDelta { n: curr.n, poly: a })
}
