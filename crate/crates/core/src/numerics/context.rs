use std::fmt;

use super::NumericsError;

/// Guard digits carried beyond the requested decimal precision unless
/// configured otherwise.
pub const DEFAULT_GUARD: u32 = 20;

/// Smallest accepted working precision in decimal digits.
pub const MIN_DPREC: u32 = 15;

pub(crate) const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision shared by every arbitrary-precision value of one
/// computation.
///
/// The context is a plain value: there is no global precision state, and two
/// values built under different contexts are never mixed silently.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    dprec: u32,
    guard: u32,
}

impl PrecisionContext {
    pub fn new(dprec: u32, guard: u32) -> Result<Self, NumericsError> {
        if dprec < MIN_DPREC {
            return Err(NumericsError::Precision { dprec });
        }
        Ok(Self { dprec, guard })
    }

    /// Context with [`DEFAULT_GUARD`] guard digits.
    pub fn with_dprec(dprec: u32) -> Result<Self, NumericsError> {
        Self::new(dprec, DEFAULT_GUARD)
    }

    pub fn dprec(&self) -> u32 {
        self.dprec
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Binary precision of every working value: `ceil(dprec log2 10)` plus
    /// the guard digits converted to bits.
    pub fn bits(&self) -> u32 {
        (self.dprec as f64 * LOG2_10).ceil() as u32 + (self.guard as f64 * LOG2_10).ceil() as u32
    }

    /// Same guard, twice the decimal precision.
    pub fn doubled(&self) -> Self {
        Self {
            dprec: self.dprec * 2,
            guard: self.guard,
        }
    }

    /// log2 of the relative size below which the result of a cancelling
    /// addition is treated as rounding noise: `10^-(dprec - guard)`, never
    /// looser than `10^-(dprec/2)`.
    pub(crate) fn cancellation_log2(&self) -> f64 {
        let digits = self.dprec.saturating_sub(self.guard).max(self.dprec / 2);
        -(digits as f64) * LOG2_10
    }
}

impl fmt::Display for PrecisionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} digits (+{} guard, {} bits)", self.dprec, self.guard, self.bits())
    }
}
