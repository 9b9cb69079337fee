//! Match and action sets, covering, and the fitness-weighted system arrays.

use rand::Rng;

use crate::classifier::{Classifier, ClassifierId, Population};
use crate::condition::{Condition, Situation};
use crate::error::{Error, Result};
use crate::xcs::deletion::delete_from_population;
use crate::xcs::params::EngineParams;

/// Shape of the problem a population is built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dimensions {
    pub width: usize,
    pub actions: usize,
    pub opponent_actions: usize,
    pub heuristics: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchSet {
    situation: Situation,
    members: Vec<ClassifierId>,
}

impl MatchSet {
    /// Every population member whose condition matches `s`, without covering.
    pub fn scan(pop: &Population, s: &Situation) -> Self {
        let members = pop.iter().filter(|(_, c)| c.matches(s)).map(|(id, _)| id).collect();
        MatchSet { situation: *s, members }
    }

    pub fn situation(&self) -> &Situation {
        &self.situation
    }

    pub fn members(&self) -> &[ClassifierId] {
        &self.members
    }

    /// Members still alive in `pop`.
    pub fn live<'a>(
        &'a self,
        pop: &'a Population,
    ) -> impl Iterator<Item = (ClassifierId, &'a Classifier)> + 'a {
        self.members.iter().filter_map(move |&id| pop.get(id).map(|c| (id, c)))
    }

    /// Distinct advocated actions, ascending.
    pub fn actions(&self, pop: &Population) -> Vec<usize> {
        let mut acts: Vec<usize> = self.live(pop).map(|(_, c)| c.action()).collect();
        acts.sort_unstable();
        acts.dedup();
        acts
    }

    pub fn action_set(&self, pop: &Population, action: usize) -> ActionSet {
        let members =
            self.live(pop).filter(|(_, c)| c.action() == action).map(|(id, _)| id).collect();
        ActionSet { action, members }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionSet {
    action: usize,
    members: Vec<ClassifierId>,
}

impl ActionSet {
    pub fn new(action: usize, members: Vec<ClassifierId>) -> Self {
        ActionSet { action, members }
    }

    pub fn action(&self) -> usize {
        self.action
    }

    pub fn members(&self) -> &[ClassifierId] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Drops handles of members deleted since the set was formed.
    pub fn retain_live(&mut self, pop: &Population) {
        self.members.retain(|&id| pop.contains(id));
    }
}

/// Forms the match set for `s`, covering missing actions until at least the
/// configured minimum number of actions is represented.
pub fn build_match_set<R: Rng + ?Sized>(
    pop: &mut Population,
    s: &Situation,
    dims: &Dimensions,
    params: &EngineParams,
    rng: &mut R,
) -> Result<MatchSet> {
    if s.width() != dims.width {
        return Err(Error::WidthMismatch { expected: dims.width, actual: s.width() });
    }
    let needed = params.min_actions_for(dims.actions);
    loop {
        let m = MatchSet::scan(pop, s);
        let present = m.actions(pop);
        if present.len() >= needed {
            return Ok(m);
        }
        for action in (0..dims.actions).filter(|a| !present.contains(a)) {
            let condition = Condition::cover(s, params.wildcard_prob, rng);
            pop.insert(Classifier::new(
                condition,
                action,
                dims.opponent_actions,
                dims.heuristics,
                params.initial_value,
                pop.clock,
            ));
        }
        delete_from_population(pop, params, rng);
    }
}

/// Fitness-weighted averages of one action's advocates.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionEstimate {
    pub prediction: Vec<f64>,
    pub heuristics: Vec<Vec<f64>>,
}

impl ActionEstimate {
    fn from_advocates<'a>(advocates: impl Iterator<Item = &'a Classifier>) -> Option<Self> {
        let members: Vec<&Classifier> = advocates.collect();
        let first = members.first()?;
        let total: f64 = members.iter().map(|c| c.fitness).sum();
        // Fitness only underflows to zero in pathological runs; use the plain
        // mean there.
        let (weight, norm): (fn(&Classifier) -> f64, f64) = if total > 0.0 {
            (|c| c.fitness, total)
        } else {
            (|_| 1.0, members.len() as f64)
        };
        let mut prediction = vec![0.0; first.prediction.len()];
        let mut heuristics: Vec<Vec<f64>> =
            first.heuristics.iter().map(|h| vec![0.0; h.len()]).collect();
        for c in &members {
            let w = weight(c);
            for (acc, &p) in prediction.iter_mut().zip(&c.prediction) {
                *acc += w * p;
            }
            for (acc, h) in heuristics.iter_mut().zip(&c.heuristics) {
                for (a, &v) in acc.iter_mut().zip(h) {
                    *a += w * v;
                }
            }
        }
        prediction.iter_mut().for_each(|v| *v /= norm);
        heuristics.iter_mut().flatten().for_each(|v| *v /= norm);
        Some(ActionEstimate { prediction, heuristics })
    }

    pub fn expected(&self, tau: &[f64]) -> f64 {
        self.prediction.iter().zip(tau).map(|(p, t)| p * t).sum()
    }
}

/// Per-action prediction and heuristic arrays for one match set.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemArrays {
    per_action: Vec<Option<ActionEstimate>>,
}

impl SystemArrays {
    pub fn compute(pop: &Population, m: &MatchSet, actions: usize) -> Self {
        let per_action = (0..actions)
            .map(|a| {
                ActionEstimate::from_advocates(
                    m.live(pop).filter(|(_, c)| c.action() == a).map(|(_, c)| c),
                )
            })
            .collect();
        SystemArrays { per_action }
    }

    pub fn from_estimates(per_action: Vec<Option<ActionEstimate>>) -> Self {
        SystemArrays { per_action }
    }

    pub fn action_count(&self) -> usize {
        self.per_action.len()
    }

    pub fn covered_actions(&self) -> Vec<usize> {
        (0..self.per_action.len()).filter(|&a| self.per_action[a].is_some()).collect()
    }

    pub fn estimate(&self, action: usize) -> Result<&ActionEstimate> {
        self.per_action
            .get(action)
            .and_then(Option::as_ref)
            .ok_or(Error::MissingAction(action))
    }

    pub fn prediction(&self, action: usize) -> Result<&[f64]> {
        Ok(&self.estimate(action)?.prediction)
    }

    pub fn heuristic(&self, action: usize, j: usize) -> Result<&[f64]> {
        self.estimate(action)?.heuristics.get(j).map(Vec::as_slice).ok_or_else(|| {
            Error::InvalidConfig(format!("heuristic index {j} out of range"))
        })
    }

    /// Expected payoff of `action` when the opponent plays `tau`.
    pub fn expected(&self, action: usize, tau: &[f64]) -> Result<f64> {
        Ok(self.estimate(action)?.expected(tau))
    }

    /// Largest expected payoff over covered actions (0 for an empty set).
    pub fn max_expected(&self, tau: &[f64]) -> f64 {
        self.per_action
            .iter()
            .flatten()
            .map(|e| e.expected(tau))
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
            .unwrap_or(0.0)
    }

    /// Selection score of `action` under heuristic `j`.
    pub fn eph(&self, action: usize, j: usize, tau: &[f64], o_hat: usize, kappa: f64) -> Result<f64> {
        let h = self.heuristic(action, j)?;
        Ok(kappa * h[o_hat] + self.expected(action, tau)?)
    }

    /// Selection score using a weighted sum of the heuristics.
    pub fn eph_weighted(
        &self,
        action: usize,
        weights: &[f64],
        tau: &[f64],
        o_hat: usize,
        kappa: f64,
    ) -> Result<f64> {
        let est = self.estimate(action)?;
        let h: f64 = est.heuristics.iter().zip(weights).map(|(h, w)| w * h[o_hat]).sum();
        Ok(kappa * h + est.expected(tau))
    }
}

fn single_action(pop: &Population, m: &MatchSet, action: usize) -> Result<ActionEstimate> {
    ActionEstimate::from_advocates(m.live(pop).filter(|(_, c)| c.action() == action).map(|(_, c)| c))
        .ok_or(Error::MissingAction(action))
}

pub fn fw_prediction(pop: &Population, m: &MatchSet, action: usize) -> Result<Vec<f64>> {
    Ok(single_action(pop, m, action)?.prediction)
}

pub fn fw_heuristic(pop: &Population, m: &MatchSet, action: usize, j: usize) -> Result<Vec<f64>> {
    let est = single_action(pop, m, action)?;
    est.heuristics
        .into_iter()
        .nth(j)
        .ok_or_else(|| Error::InvalidConfig(format!("heuristic index {j} out of range")))
}

pub fn expected_action_prediction(
    pop: &Population,
    m: &MatchSet,
    action: usize,
    tau: &[f64],
) -> Result<f64> {
    Ok(single_action(pop, m, action)?.expected(tau))
}

pub fn eph(
    pop: &Population,
    m: &MatchSet,
    action: usize,
    j: usize,
    tau: &[f64],
    o_hat: usize,
    kappa: f64,
) -> Result<f64> {
    let est = single_action(pop, m, action)?;
    let h = est
        .heuristics
        .get(j)
        .ok_or_else(|| Error::InvalidConfig(format!("heuristic index {j} out of range")))?;
    Ok(kappa * h[o_hat] + est.expected(tau))
}
