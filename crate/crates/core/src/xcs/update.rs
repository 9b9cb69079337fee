//! Reinforcement of the previous step's action set.

use crate::classifier::{ClassifierId, Population};
use crate::xcs::match_set::{ActionSet, SystemArrays};
use crate::xcs::params::EngineParams;

/// Payoff target for the previous action set. `current` is `None` on the
/// terminal step, where no bootstrap term is added.
pub fn target_prediction(
    reward: f64,
    current: Option<&SystemArrays>,
    tau: &[f64],
    discount: f64,
) -> f64 {
    match current {
        Some(arrays) => reward + discount * arrays.max_expected(tau),
        None => reward,
    }
}

/// Absolute accuracy of a rule with the given prediction error.
pub fn accuracy(error: f64, params: &EngineParams) -> f64 {
    if error < params.error_threshold {
        1.0
    } else {
        params.accuracy_coefficient * (error / params.error_threshold).powf(-params.accuracy_power)
    }
}

/// Inputs for one reinforcement of `[A]-1`.
#[derive(Clone, Copy, Debug)]
pub struct Reinforcement<'a> {
    pub target: f64,
    pub opponent_action: usize,
    /// Opponent model output at the previous situation.
    pub tau: &'a [f64],
    /// Advice of each heuristic at the previous situation.
    pub advice: &'a [Option<usize>],
    /// Arrays of the previous match set, taken before this update.
    pub previous: &'a SystemArrays,
}

/// Updates prediction, error, fitness, heuristic values and bookkeeping of
/// every live member of `aset`.
pub fn reinforce_action_set(
    pop: &mut Population,
    aset: &ActionSet,
    r: &Reinforcement<'_>,
    params: &EngineParams,
) {
    let members: Vec<ClassifierId> =
        aset.members().iter().copied().filter(|&id| pop.contains(id)).collect();
    if members.is_empty() {
        return;
    }
    let set_size: f64 = members.iter().map(|&id| pop.get(id).unwrap().numerosity as f64).sum();
    let o = r.opponent_action;

    for &id in &members {
        let c = pop.get_mut(id).unwrap();
        c.experience += 1;
        c.prediction[o] += params.prediction_rate * (r.target - c.prediction[o]);
        let expected = c.expected_prediction(r.tau);
        c.error += params.error_rate * ((r.target - expected).abs() - c.error);
        c.action_set_size += params.prediction_rate * (set_size - c.action_set_size);
    }

    let weighted: Vec<f64> = members
        .iter()
        .map(|&id| {
            let c = pop.get(id).unwrap();
            accuracy(c.error, params) * c.numerosity as f64
        })
        .collect();
    let total: f64 = weighted.iter().sum();
    if total > 0.0 {
        for (&id, &kn) in members.iter().zip(&weighted) {
            let c = pop.get_mut(id).unwrap();
            c.fitness += params.fitness_rate * (kn / total - c.fitness);
        }
    }

    refresh_heuristics(pop, &members, aset.action(), r, params);
}

/// Heuristic values of the reinforced rules at the observed opponent action.
/// Rules advocating the advised action get the payoff gap to the best action
/// plus the update margin; rules advocating anything else get zero. A
/// heuristic without advice leaves its values untouched.
fn refresh_heuristics(
    pop: &mut Population,
    members: &[ClassifierId],
    action: usize,
    r: &Reinforcement<'_>,
    params: &EngineParams,
) {
    let o = r.opponent_action;
    let best = r
        .previous
        .covered_actions()
        .into_iter()
        .filter_map(|a| r.previous.prediction(a).ok().map(|p| p[o]))
        .fold(f64::NEG_INFINITY, f64::max);
    for (j, advice) in r.advice.iter().enumerate() {
        let Some(advised) = *advice else { continue };
        let value = if action == advised {
            match r.previous.prediction(advised) {
                Ok(p) => best - p[o] + params.heuristic_magnitude,
                Err(_) => continue,
            }
        } else {
            0.0
        };
        for &id in members {
            let c = pop.get_mut(id).unwrap();
            if let Some(h) = c.heuristics.get_mut(j) {
                h[o] = value;
            }
        }
    }
}

/// True when `c` is accurate and experienced enough to absorb others.
pub fn could_subsume(c: &crate::classifier::Classifier, params: &EngineParams) -> bool {
    c.experience > params.subsumption_threshold && c.error < params.error_threshold
}

/// Lets the most general capable member absorb every strictly more specific
/// member of the set.
pub fn action_set_subsumption(pop: &mut Population, aset: &mut ActionSet, params: &EngineParams) {
    aset.retain_live(pop);
    let mut subsumer: Option<ClassifierId> = None;
    for &id in aset.members() {
        let c = pop.get(id).unwrap();
        if !could_subsume(c, params) {
            continue;
        }
        let better = match subsumer {
            None => true,
            Some(s) => {
                let cur = pop.get(s).unwrap();
                c.condition().wildcard_count() > cur.condition().wildcard_count()
            }
        };
        if better {
            subsumer = Some(id);
        }
    }
    let Some(sid) = subsumer else { return };
    let general = *pop.get(sid).unwrap().condition();
    let absorbed: Vec<ClassifierId> = aset
        .members()
        .iter()
        .copied()
        .filter(|&id| id != sid && general.is_more_general_unchecked(pop.get(id).unwrap().condition()))
        .collect();
    for id in absorbed {
        if let Some(c) = pop.remove(id) {
            pop.get_mut(sid).unwrap().numerosity += c.numerosity;
        }
    }
    aset.retain_live(pop);
}
