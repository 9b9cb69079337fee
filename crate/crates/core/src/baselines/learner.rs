//! Minimax-Q, Minimax-SARSA, their trace variants, HAMMQ and NSCP behind one
//! agent type.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::qtable::{JointQTable, StateKey};
use crate::agent::{Agent, Feedback, Observation};
use crate::error::{Error, Result};
use crate::rng::SessionRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    MinimaxQ,
    MinimaxSarsa,
    MinimaxQLambda,
    MinimaxSarsaLambda,
    /// Minimax-Q with heuristically accelerated action selection.
    Hammq,
    /// Best response to per-state opponent action counts.
    Nscp,
}

impl Algorithm {
    fn on_policy(self) -> bool {
        matches!(self, Algorithm::MinimaxSarsa | Algorithm::MinimaxSarsaLambda)
    }

    fn traced(self) -> bool {
        matches!(self, Algorithm::MinimaxQLambda | Algorithm::MinimaxSarsaLambda)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineParams {
    pub learning_rate: f64,
    /// Multiplies the learning rate after every backup.
    pub learning_rate_decay: f64,
    pub explore_rate: f64,
    pub discount: f64,
    pub trace_decay: f64,
    pub trace_threshold: f64,
    /// Weight of the heuristic term in HAMMQ selection.
    pub heuristic_weight: f64,
    /// Margin given to the advised action in HAMMQ.
    pub heuristic_magnitude: f64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        BaselineParams {
            learning_rate: 1.0,
            learning_rate_decay: 0.9999954,
            explore_rate: 0.2,
            discount: 0.9,
            trace_decay: 0.5,
            trace_threshold: 1e-6,
            heuristic_weight: 1.0,
            heuristic_magnitude: 1.0,
        }
    }
}

impl BaselineParams {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, ok: bool, v: f64| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} = {v} out of range")))
            }
        };
        check("learning_rate", self.learning_rate > 0.0 && self.learning_rate <= 1.0, self.learning_rate)?;
        check(
            "learning_rate_decay",
            self.learning_rate_decay > 0.0 && self.learning_rate_decay <= 1.0,
            self.learning_rate_decay,
        )?;
        check("explore_rate", (0.0..=1.0).contains(&self.explore_rate), self.explore_rate)?;
        check("discount", (0.0..=1.0).contains(&self.discount), self.discount)?;
        check("trace_decay", (0.0..=1.0).contains(&self.trace_decay), self.trace_decay)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Transition {
    s: StateKey,
    a: usize,
    o: usize,
    r: f64,
}

#[derive(Clone, Copy, Debug)]
enum Next {
    Terminal,
    State(StateKey),
    Joint(StateKey, usize, usize),
}

#[derive(Clone, Debug)]
pub struct TabularAgent {
    algorithm: Algorithm,
    params: BaselineParams,
    width: usize,
    q: JointQTable,
    alpha: f64,
    backups: u64,
    traces: BTreeMap<(StateKey, usize, usize), f64>,
    counts: BTreeMap<StateKey, Vec<u64>>,
    heuristic: BTreeMap<StateKey, Vec<f64>>,
    chosen: Option<(StateKey, usize)>,
    pending: Option<Transition>,
}

impl TabularAgent {
    pub fn new(
        algorithm: Algorithm,
        params: BaselineParams,
        width: usize,
        actions: usize,
        opponent_actions: usize,
    ) -> Result<Self> {
        params.validate()?;
        if actions == 0 || opponent_actions == 0 {
            return Err(Error::InvalidConfig("action counts must be positive".into()));
        }
        Ok(TabularAgent {
            algorithm,
            alpha: params.learning_rate,
            params,
            width,
            q: JointQTable::new(actions, opponent_actions),
            backups: 0,
            traces: BTreeMap::new(),
            counts: BTreeMap::new(),
            heuristic: BTreeMap::new(),
            chosen: None,
            pending: None,
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn q(&self) -> &JointQTable {
        &self.q
    }

    pub fn q_mut(&mut self) -> &mut JointQTable {
        &mut self.q
    }

    /// Current learning rate.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn backups(&self) -> u64 {
        self.backups
    }

    pub fn trace(&self, s: StateKey, a: usize, o: usize) -> Option<f64> {
        self.traces.get(&(s, a, o)).copied()
    }

    pub fn heuristic_values(&self, s: StateKey) -> Option<&[f64]> {
        self.heuristic.get(&s).map(Vec::as_slice)
    }

    /// Empirical opponent action distribution in `s`; uniform if unseen.
    pub fn opponent_frequencies(&self, s: StateKey) -> Vec<f64> {
        let n = self.q.opponent_actions();
        match self.counts.get(&s) {
            Some(c) if c.iter().sum::<u64>() > 0 => {
                let total = c.iter().sum::<u64>() as f64;
                c.iter().map(|&x| x as f64 / total).collect()
            }
            _ => vec![1.0 / n as f64; n],
        }
    }

    /// Greedy choice in `s`, ignoring exploration.
    pub fn greedy_action(&self, s: StateKey) -> usize {
        match self.algorithm {
            Algorithm::Hammq => {
                let h = self.heuristic.get(&s);
                let mut best = (0, f64::NEG_INFINITY);
                for a in 0..self.q.actions() {
                    let v = self.q.security_value(s, a)
                        + self.params.heuristic_weight * h.map_or(0.0, |h| h[a]);
                    if v > best.1 {
                        best = (a, v);
                    }
                }
                best.0
            }
            Algorithm::Nscp => self.q.best_response(s, &self.opponent_frequencies(s)).0,
            _ => self.q.minimax_action(s),
        }
    }

    /// Epsilon-greedy choice; the flag reports an exploratory move.
    pub fn select(&self, s: StateKey, rng: &mut SessionRng) -> (usize, bool) {
        if rng.gen_bool(self.params.explore_rate) {
            (rng.gen_range(0..self.q.actions()), true)
        } else {
            (self.greedy_action(s), false)
        }
    }

    /// Sets the heuristic values of `s` from the advised action: the advised
    /// action gets its maximin gap plus the margin, every other action zero.
    pub fn refresh_heuristic(&mut self, s: StateKey, advice: Option<usize>) {
        let Some(advised) = advice.filter(|&a| a < self.q.actions()) else { return };
        let best = self.q.minimax_value(s);
        let mut h = vec![0.0; self.q.actions()];
        h[advised] = best - self.q.security_value(s, advised) + self.params.heuristic_magnitude;
        self.heuristic.insert(s, h);
    }

    fn bootstrap(&self, next: Next) -> f64 {
        match next {
            Next::Terminal => 0.0,
            Next::Joint(s, a, o) => self.q.get(s, a, o),
            Next::State(s) => match self.algorithm {
                Algorithm::Nscp => self.q.best_response(s, &self.opponent_frequencies(s)).1,
                _ => self.q.minimax_value(s),
            },
        }
    }

    fn backup(&mut self, t: Transition, next: Next) {
        let target = t.r + self.params.discount * self.bootstrap(next);
        let td = target - self.q.get(t.s, t.a, t.o);
        if self.algorithm.traced() {
            self.traces.retain(|&(s, _, _), _| s != t.s);
            self.traces.insert((t.s, t.a, t.o), 1.0);
            for (&(s, a, o), &e) in &self.traces {
                *self.q.get_mut(s, a, o) += self.alpha * td * e;
            }
            let factor = self.params.discount * self.params.trace_decay;
            let threshold = self.params.trace_threshold;
            self.traces.retain(|_, e| {
                *e *= factor;
                *e >= threshold
            });
        } else {
            *self.q.get_mut(t.s, t.a, t.o) += self.alpha * td;
        }
        self.alpha *= self.params.learning_rate_decay;
        self.backups += 1;
    }

    /// Starts a step in `s`: completes any off-policy backup, then chooses.
    pub fn choose(&mut self, s: StateKey, advice: Option<usize>, rng: &mut SessionRng) -> usize {
        if !self.algorithm.on_policy() {
            if let Some(t) = self.pending.take() {
                self.backup(t, Next::State(s));
            }
        }
        if self.algorithm == Algorithm::Hammq {
            self.refresh_heuristic(s, advice);
        }
        let (a, explored) = self.select(s, rng);
        if explored && self.algorithm == Algorithm::MinimaxQLambda {
            self.traces.clear();
        }
        self.chosen = Some((s, a));
        a
    }

    /// Finishes a step with the observed opponent move and reward.
    pub fn record(&mut self, opponent: usize, reward: f64, terminal: bool) {
        let Some((s, a)) = self.chosen.take() else { return };
        if self.algorithm == Algorithm::Nscp {
            let n = self.q.opponent_actions();
            self.counts.entry(s).or_insert_with(|| vec![0; n])[opponent] += 1;
        }
        let t = Transition { s, a, o: opponent, r: reward };
        if self.algorithm.on_policy() {
            if let Some(prev) = self.pending.take() {
                self.backup(prev, Next::Joint(s, a, opponent));
            }
        }
        if terminal {
            self.backup(t, Next::Terminal);
            self.traces.clear();
            self.pending = None;
        } else {
            self.pending = Some(t);
        }
    }
}

impl Agent for TabularAgent {
    fn act(&mut self, obs: &Observation, rng: &mut SessionRng) -> usize {
        let advice = obs.advice.iter().copied().flatten().next();
        self.choose(obs.situation.bits(), advice, rng)
    }

    fn observe(&mut self, fb: &Feedback, _: &mut SessionRng) {
        self.record(fb.other_action, fb.reward, fb.terminal);
    }

    fn snapshot(&self, _: &dyn Fn(usize) -> String) -> Option<String> {
        Some(self.q.dump(self.width))
    }
}
