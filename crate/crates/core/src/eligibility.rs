//! Replacing eligibility traces over (situation, action, opponent action)
//! tuples, and the fitness-weighted retroactive update they drive.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::classifier::{ClassifierId, Population};
use crate::condition::Situation;
use crate::xcs::params::EngineParams;

pub type TraceKey = (Situation, usize, usize);

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceSet {
    entries: BTreeMap<TraceKey, f64>,
}

impl TraceSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, s: &Situation, action: usize, opponent: usize) -> Option<f64> {
        self.entries.get(&(*s, action, opponent)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TraceKey, f64)> {
        self.entries.iter().map(|(k, &e)| (k, e))
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Sets the tuple's trace to 1 and drops every other tuple for `s`.
    pub fn record(&mut self, s: &Situation, action: usize, opponent: usize) {
        self.entries.retain(|(k, _, _), _| k != s);
        self.entries.insert((*s, action, opponent), 1.0);
    }

    /// Multiplies every trace by `lambda * gamma` and prunes those below
    /// `threshold`.
    pub fn decay(&mut self, lambda: f64, gamma: f64, threshold: f64) {
        let factor = lambda * gamma;
        self.entries.retain(|_, e| {
            *e *= factor;
            *e >= threshold
        });
    }

    /// Entries in descending trace order, ties broken by key.
    pub fn by_descending_trace(&self) -> Vec<(TraceKey, f64)> {
        let mut v: Vec<(TraceKey, f64)> = self.entries.iter().map(|(k, &e)| (*k, e)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    /// One line per entry: situation bits, action labels, trace value.
    pub fn dump(&self, action_label: impl Fn(usize) -> String, opponent_label: impl Fn(usize) -> String) -> String {
        let mut out = String::new();
        for ((s, a, o), e) in self.by_descending_trace() {
            let _ = writeln!(out, "{s} {} {} {e:.6}", action_label(a), opponent_label(o));
        }
        out
    }
}

pub fn record_trace(ts: &mut TraceSet, s: &Situation, action: usize, opponent: usize) {
    ts.record(s, action, opponent);
}

pub fn decay_traces(ts: &mut TraceSet, lambda: f64, gamma: f64, threshold: f64) {
    ts.decay(lambda, gamma, threshold);
}

/// Moves the predictions and errors of every rule matching a traced tuple
/// toward the current temporal-difference signal, weighted by the rule's
/// share of fitness in its traced set and by the trace. Fitness, experience,
/// action-set size and numerosity are left alone. Members of `exclude` have
/// already been reinforced this step and are skipped.
pub fn apply_trace_updates(
    ts: &TraceSet,
    pop: &mut Population,
    target: f64,
    phi_prev: f64,
    exclude: &[ClassifierId],
    params: &EngineParams,
) {
    let delta = target - phi_prev;
    for ((s, a, o), e) in ts.by_descending_trace() {
        let members: Vec<ClassifierId> = pop
            .iter()
            .filter(|(id, c)| c.action() == a && c.matches(&s) && !exclude.contains(id))
            .map(|(id, _)| id)
            .collect();
        let total: f64 = members.iter().map(|&id| pop.get(id).unwrap().fitness).sum();
        if total <= 0.0 {
            continue;
        }
        for id in members {
            let c = pop.get_mut(id).unwrap();
            let share = c.fitness / total * e;
            c.prediction[o] += params.trace_prediction_rate * delta * share;
            c.error += params.trace_error_rate * (delta.abs() - c.error) * share;
        }
    }
}
