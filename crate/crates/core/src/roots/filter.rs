use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Root;
use crate::numerics::LOG2_10;

/// Which roots of a quantization polynomial are reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RootFilter {
    /// `-r`: real, negative real part. Bound states.
    NegativeReal,
    /// `+r`: real, real part zero or positive.
    PositiveReal,
    /// `r`: real.
    Real,
    /// `+i`: imaginary part above `real_eps`.
    UpperHalf,
    /// `-i`: imaginary part below `-real_eps`. Decaying quasinormal modes.
    LowerHalf,
    /// `c`: everything.
    All,
}

impl RootFilter {
    pub const ALL: [RootFilter; 6] = [
        RootFilter::NegativeReal,
        RootFilter::PositiveReal,
        RootFilter::Real,
        RootFilter::UpperHalf,
        RootFilter::LowerHalf,
        RootFilter::All,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RootFilter::NegativeReal => "-r",
            RootFilter::PositiveReal => "+r",
            RootFilter::Real => "r",
            RootFilter::UpperHalf => "+i",
            RootFilter::LowerHalf => "-i",
            RootFilter::All => "c",
        }
    }

    /// Classifies one root. `real_eps_log10` is `log10` of the largest
    /// imaginary part still counted as real.
    pub fn accepts(self, root: &Root, real_eps_log10: f64) -> bool {
        let im = root.value.im();
        let is_real = im.is_zero() || {
            let (m, e) = im.to_f64_exp();
            e as f64 + m.abs().log2() <= real_eps_log10 * LOG2_10
        };
        let re_negative = root.value.re().is_sign_negative() && !root.value.re().is_zero();
        match self {
            RootFilter::NegativeReal => is_real && re_negative,
            RootFilter::PositiveReal => is_real && !re_negative,
            RootFilter::Real => is_real,
            RootFilter::UpperHalf => !is_real && im.is_sign_positive(),
            RootFilter::LowerHalf => !is_real && im.is_sign_negative(),
            RootFilter::All => true,
        }
    }
}

impl fmt::Display for RootFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RootFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RootFilter::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown root filter '{s}' (expected one of -r, +r, r, +i, -i, c)"))
    }
}

impl TryFrom<String> for RootFilter {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<RootFilter> for String {
    fn from(f: RootFilter) -> String {
        f.as_str().to_string()
    }
}

/// Roots accepted by `filter`, sorted by real part, then imaginary part.
pub fn filter_roots(roots: &[Root], filter: RootFilter, real_eps_log10: f64) -> Vec<Root> {
    let mut out: Vec<Root> = roots
        .iter()
        .filter(|r| filter.accepts(r, real_eps_log10))
        .cloned()
        .collect();
    out.sort_by(compare_roots);
    out
}

pub(crate) fn compare_roots(a: &Root, b: &Root) -> Ordering {
    a.value
        .re()
        .partial_cmp(b.value.re())
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.value.im().partial_cmp(b.value.im()).unwrap_or(Ordering::Equal))
}
