//! Action selection: epsilon-greedy over a single (possibly summed) score, or a
//! uniform draw from the Pareto-optimal actions across heuristic scores.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::xcs::match_set::SystemArrays;
use crate::xcs::params::EngineParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Argmax of one score; several heuristics are combined by weighted sum.
    #[default]
    Greedy,
    /// Uniform choice among actions not Pareto-dominated across heuristics.
    Pareto,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub action: usize,
    pub explored: bool,
    /// Actions the exploit branch chose from (the argmax or the Pareto set).
    pub candidates: Vec<usize>,
}

/// True when `a` is at least as good as `b` everywhere and better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly = true;
        }
    }
    strictly
}

/// Actions whose score vectors no other action dominates, in input order.
pub fn pareto_optimal(scores: &[(usize, Vec<f64>)]) -> Vec<usize> {
    scores
        .iter()
        .filter(|(a, s)| !scores.iter().any(|(b, t)| b != a && dominates(t, s)))
        .map(|(a, _)| *a)
        .collect()
}

/// Most likely opponent action; lowest index on ties.
pub fn modal_action(tau: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in tau.iter().enumerate() {
        if p > tau[best] {
            best = i;
        }
    }
    best
}

/// First index of the maximum.
pub(crate) fn argmax_first(values: &[(usize, f64)]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &(a, v) in values {
        if best.map_or(true, |(_, bv)| v > bv) {
            best = Some((a, v));
        }
    }
    best.map(|b| b.0)
}

/// Per-action score vectors: one entry per heuristic, or the expected payoff
/// alone when no heuristic is configured.
pub fn heuristic_scores(
    arrays: &SystemArrays,
    tau: &[f64],
    kappa: f64,
    heuristics: usize,
) -> Result<Vec<(usize, Vec<f64>)>> {
    let o_hat = modal_action(tau);
    arrays
        .covered_actions()
        .into_iter()
        .map(|a| {
            let scores = if heuristics == 0 {
                vec![arrays.expected(a, tau)?]
            } else {
                (0..heuristics)
                    .map(|j| arrays.eph(a, j, tau, o_hat, kappa))
                    .collect::<Result<Vec<_>>>()?
            };
            Ok((a, scores))
        })
        .collect()
}

pub fn select_action<R: Rng + ?Sized>(
    arrays: &SystemArrays,
    tau: &[f64],
    params: &EngineParams,
    mode: SelectionMode,
    weights: &[f64],
    rng: &mut R,
) -> Result<Selection> {
    let covered = arrays.covered_actions();
    if covered.is_empty() {
        return Err(Error::EmptyMatchSet);
    }
    let explore = rng.gen_bool(params.explore_rate);
    let candidates = match mode {
        SelectionMode::Greedy => {
            let o_hat = modal_action(tau);
            let scored = covered
                .iter()
                .map(|&a| Ok((a, arrays.eph_weighted(a, weights, tau, o_hat, params.heuristic_weight)?)))
                .collect::<Result<Vec<_>>>()?;
            vec![argmax_first(&scored).expect("covered is non-empty")]
        }
        SelectionMode::Pareto => {
            let scores = heuristic_scores(arrays, tau, params.heuristic_weight, weights.len())?;
            pareto_optimal(&scores)
        }
    };
    let action = if explore {
        *covered.choose(rng).expect("covered is non-empty")
    } else if candidates.len() == 1 {
        candidates[0]
    } else {
        *candidates.choose(rng).expect("Pareto set is never empty")
    };
    Ok(Selection { action, explored: explore, candidates })
}
