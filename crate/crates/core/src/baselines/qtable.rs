//! Q-values over (state, own action, opponent action).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::condition::Situation;

/// States are keyed by their encoded bits.
pub type StateKey = u64;

#[derive(Clone, Debug, PartialEq)]
pub struct JointQTable {
    actions: usize,
    opponent_actions: usize,
    rows: BTreeMap<StateKey, Vec<f64>>,
}

impl JointQTable {
    pub fn new(actions: usize, opponent_actions: usize) -> Self {
        JointQTable { actions, opponent_actions, rows: BTreeMap::new() }
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn opponent_actions(&self) -> usize {
        self.opponent_actions
    }

    /// Number of states with at least one stored value.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, s: StateKey, a: usize, o: usize) -> f64 {
        self.rows.get(&s).map_or(0.0, |row| row[a * self.opponent_actions + o])
    }

    pub fn get_mut(&mut self, s: StateKey, a: usize, o: usize) -> &mut f64 {
        let width = self.actions * self.opponent_actions;
        let row = self.rows.entry(s).or_insert_with(|| vec![0.0; width]);
        &mut row[a * self.opponent_actions + o]
    }

    pub fn set(&mut self, s: StateKey, a: usize, o: usize, q: f64) {
        *self.get_mut(s, a, o) = q;
    }

    /// Worst case of action `a` over opponent replies.
    pub fn security_value(&self, s: StateKey, a: usize) -> f64 {
        (0..self.opponent_actions).map(|o| self.get(s, a, o)).fold(f64::INFINITY, f64::min)
    }

    /// Pure-strategy maximin action; lowest index on ties.
    pub fn minimax_action(&self, s: StateKey) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for a in 0..self.actions {
            let v = self.security_value(s, a);
            if v > best.1 {
                best = (a, v);
            }
        }
        best.0
    }

    /// `max_a min_o Q(s, a, o)`.
    pub fn minimax_value(&self, s: StateKey) -> f64 {
        self.security_value(s, self.minimax_action(s))
    }

    /// Expected value of `a` against an opponent distribution.
    pub fn expected_value(&self, s: StateKey, a: usize, dist: &[f64]) -> f64 {
        dist.iter().enumerate().map(|(o, p)| p * self.get(s, a, o)).sum()
    }

    /// Best response to `dist`; lowest index on ties.
    pub fn best_response(&self, s: StateKey, dist: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for a in 0..self.actions {
            let v = self.expected_value(s, a, dist);
            if v > best.1 {
                best = (a, v);
            }
        }
        best
    }

    /// Sorted lines `state-bits action opponent-action q`.
    pub fn dump(&self, width: usize) -> String {
        let mut out = String::new();
        for (&s, row) in &self.rows {
            let bits = Situation::new(s, width).map(|x| x.to_string()).unwrap_or_else(|_| s.to_string());
            for a in 0..self.actions {
                for o in 0..self.opponent_actions {
                    let _ = writeln!(out, "{bits} {a} {o} {:.6}", row[a * self.opponent_actions + o]);
                }
            }
        }
        out
    }
}

/// One Minimax-Q backup. `next` is `None` for a terminal transition.
pub fn minimax_q_update(
    q: &mut JointQTable,
    s: StateKey,
    a: usize,
    o: usize,
    reward: f64,
    next: Option<StateKey>,
    alpha: f64,
    gamma: f64,
) -> f64 {
    let bootstrap = next.map_or(0.0, |n| q.minimax_value(n));
    let cell = q.get_mut(s, a, o);
    let td = reward + gamma * bootstrap - *cell;
    *cell += alpha * td;
    td
}

/// One Minimax-SARSA backup toward the value of the joint action actually
/// taken next.
pub fn minimax_sarsa_update(
    q: &mut JointQTable,
    s: StateKey,
    a: usize,
    o: usize,
    reward: f64,
    next: Option<(StateKey, usize, usize)>,
    alpha: f64,
    gamma: f64,
) -> f64 {
    let bootstrap = next.map_or(0.0, |(n, na, no)| q.get(n, na, no));
    let cell = q.get_mut(s, a, o);
    let td = reward + gamma * bootstrap - *cell;
    *cell += alpha * td;
    td
}
