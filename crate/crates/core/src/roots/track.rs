use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::filter::compare_roots;
use super::Root;
use crate::numerics::{BigComplex, LOG2_10};

/// Filtered, sorted roots of `δ_n` at one checkpoint.
#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub n: usize,
    pub roots: Vec<Root>,
    /// Degree of `δ_n`.
    pub degree: usize,
}

/// How the tolerance is applied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TolMode {
    /// The value moved by less than `tol` since the previous checkpoint.
    #[default]
    Distance,
    /// As `Distance`, and additionally the root's inclusion radius is below
    /// `tol`.
    Strict,
}

#[derive(Clone, Debug)]
pub struct ConvergedRoot {
    /// Rank among the converged roots, by real part.
    pub index: usize,
    pub value: BigComplex,
    /// First checkpoint of the final run of steps below `tol`.
    pub converged_at: usize,
    /// `log10` of the last checkpoint-to-checkpoint change.
    pub last_change_log10: f64,
    pub radius_log10: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceTrace {
    pub checkpoints: Vec<Checkpoint>,
    pub converged: Vec<ConvergedRoot>,
}

#[derive(Debug)]
struct Chain {
    /// Root index at each checkpoint, starting at `start`.
    members: Vec<usize>,
    start: usize,
    /// `log10 |v_k - v_{k-1}|` for each link.
    steps: Vec<f64>,
}

fn distance_log10(a: &BigComplex, b: &BigComplex) -> f64 {
    let d = a.sub(b);
    let re = d.re().clone().abs();
    let im = d.im().clone().abs();
    let m = if re > im { re } else { im };
    if m.is_zero() {
        return f64::NEG_INFINITY;
    }
    // The max norm is within a factor √2 of the modulus; that slack is
    // irrelevant next to tolerances measured in decades.
    let (mant, exp) = m.to_f64_exp();
    (exp as f64 + mant.log2()) / LOG2_10
}

/// Links each checkpoint's roots to the previous checkpoint's by greedy
/// global nearest-neighbour matching and reports the chains that settled.
///
/// A chain is converged when it is present at the last checkpoint and its
/// last step is below `10^tol_log10` (and, in strict mode, its inclusion
/// radius too). Sorting happens internally, so the order of the input root
/// lists does not matter.
pub fn track(mut checkpoints: Vec<Checkpoint>, tol_log10: f64, mode: TolMode) -> ConvergenceTrace {
    for cp in &mut checkpoints {
        cp.roots.sort_by(compare_roots);
    }
    let mut chains: Vec<Chain> = Vec::new();
    // Chain index of each root of the previous checkpoint.
    let mut owner: Vec<usize> = Vec::new();
    for (k, cp) in checkpoints.iter().enumerate() {
        let mut next_owner = vec![usize::MAX; cp.roots.len()];
        if k > 0 {
            let prev = &checkpoints[k - 1].roots;
            let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(prev.len() * cp.roots.len());
            for (i, a) in prev.iter().enumerate() {
                for (j, b) in cp.roots.iter().enumerate() {
                    pairs.push((distance_log10(&a.value, &b.value), i, j));
                }
            }
            pairs.sort_by(|x, y| {
                x.0.partial_cmp(&y.0)
                    .unwrap_or(Ordering::Equal)
                    .then(x.1.cmp(&y.1))
                    .then(x.2.cmp(&y.2))
            });
            let mut used_prev = vec![false; prev.len()];
            for (d, i, j) in pairs {
                if used_prev[i] || next_owner[j] != usize::MAX {
                    continue;
                }
                used_prev[i] = true;
                let c = owner[i];
                chains[c].members.push(j);
                chains[c].steps.push(d);
                next_owner[j] = c;
            }
        }
        for (j, o) in next_owner.iter_mut().enumerate() {
            if *o == usize::MAX {
                *o = chains.len();
                chains.push(Chain {
                    members: vec![j],
                    start: k,
                    steps: Vec::new(),
                });
            }
        }
        owner = next_owner;
    }

    let mut converged = Vec::new();
    if let Some(last) = checkpoints.len().checked_sub(1) {
        for chain in &chains {
            if chain.start + chain.members.len() - 1 != last || chain.steps.is_empty() {
                continue;
            }
            let root = &checkpoints[last].roots[*chain.members.last().unwrap()];
            let step = *chain.steps.last().unwrap();
            let ok = step < tol_log10 && (mode == TolMode::Distance || root.radius_log10 < tol_log10);
            if !ok {
                continue;
            }
            let run = chain.steps.iter().rev().take_while(|s| **s < tol_log10).count();
            // steps[t] links checkpoint start+t to start+t+1.
            let first_step = chain.steps.len() - run;
            let at = chain.start + first_step + 1;
            converged.push(ConvergedRoot {
                index: 0,
                value: root.value.clone(),
                converged_at: checkpoints[at].n,
                last_change_log10: step,
                radius_log10: root.radius_log10,
            });
        }
    }
    converged.sort_by(|a, b| {
        a.value
            .re()
            .partial_cmp(b.value.re())
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.value.im().partial_cmp(b.value.im()).unwrap_or(Ordering::Equal))
    });
    for (k, c) in converged.iter_mut().enumerate() {
        c.index = k;
    }
    ConvergenceTrace {
        checkpoints,
        converged,
    }
}
