//! The full learner: match set, selection, delayed reinforcement, GA,
//! eligibility traces and the opponent model, driven one step at a time.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::agent::{Agent, Feedback, Observation};
use crate::classifier::{Census, Population};
use crate::condition::Situation;
use crate::eligibility::{apply_trace_updates, TraceSet};
use crate::error::{Error, Result};
use crate::opponent_model::{EpisodeBuffer, ModelParams, OpponentModel};
use crate::rng::SessionRng;
use crate::xcs::ga::run_ga;
use crate::xcs::match_set::{build_match_set, Dimensions, MatchSet, SystemArrays};
use crate::xcs::params::EngineParams;
use crate::xcs::selection::{select_action, SelectionMode};
use crate::xcs::update::{action_set_subsumption, reinforce_action_set, target_prediction, Reinforcement};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HamxcsConfig {
    pub engine: EngineParams,
    pub selection: SelectionMode,
    /// One weight per heuristic used; empty disables heuristics.
    pub heuristic_weights: Vec<f64>,
    pub use_traces: bool,
    pub use_opponent_model: bool,
    pub model: ModelParams,
}

impl Default for HamxcsConfig {
    fn default() -> Self {
        HamxcsConfig {
            engine: EngineParams::default(),
            selection: SelectionMode::Pareto,
            heuristic_weights: vec![1.0, 1.0],
            use_traces: true,
            use_opponent_model: true,
            model: ModelParams::default(),
        }
    }
}

impl HamxcsConfig {
    /// Plain accuracy-based learner: no heuristics, no traces, no model.
    pub fn plain() -> Self {
        HamxcsConfig {
            selection: SelectionMode::Greedy,
            heuristic_weights: Vec::new(),
            use_traces: false,
            use_opponent_model: false,
            ..Default::default()
        }
    }
}

/// The step awaiting reinforcement.
#[derive(Clone, Debug)]
struct Pending {
    match_set: MatchSet,
    arrays: SystemArrays,
    action: usize,
    tau: Vec<f64>,
    advice: Vec<Option<usize>>,
    outcome: Option<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct HamxcsAgent {
    config: HamxcsConfig,
    dims: Dimensions,
    population: Population,
    model: Option<OpponentModel>,
    buffer: EpisodeBuffer,
    traces: TraceSet,
    pending: Option<Pending>,
}

impl HamxcsAgent {
    pub fn new(
        config: HamxcsConfig,
        width: usize,
        actions: usize,
        opponent_actions: usize,
        rng: &mut SessionRng,
    ) -> Result<Self> {
        config.engine.validate()?;
        if actions == 0 || opponent_actions == 0 {
            return Err(Error::InvalidConfig("action counts must be positive".into()));
        }
        if config.selection == SelectionMode::Pareto && config.heuristic_weights.is_empty() {
            // Pareto over the expected payoff alone degenerates to greedy; allowed.
        }
        let dims = Dimensions { width, actions, opponent_actions, heuristics: config.heuristic_weights.len() };
        let model = config
            .use_opponent_model
            .then(|| OpponentModel::new(width, opponent_actions, &config.model, rng));
        Ok(HamxcsAgent {
            population: Population::new(config.engine.population_size),
            config,
            dims,
            model,
            buffer: EpisodeBuffer::new(),
            traces: TraceSet::new(),
            pending: None,
        })
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn traces(&self) -> &TraceSet {
        &self.traces
    }

    pub fn model(&self) -> Option<&OpponentModel> {
        self.model.as_ref()
    }

    pub fn dimensions(&self) -> Dimensions {
        self.dims
    }

    fn tau(&self, s: &Situation) -> Result<Vec<f64>> {
        match &self.model {
            Some(m) => m.predict(s),
            None => Ok(vec![1.0 / self.dims.opponent_actions as f64; self.dims.opponent_actions]),
        }
    }

    /// One decision step. Fails only on malformed observations.
    pub fn step(&mut self, obs: &Observation, rng: &mut SessionRng) -> Result<usize> {
        let s = obs.situation;
        self.population.clock += 1;
        let m = build_match_set(&mut self.population, &s, &self.dims, &self.config.engine, rng)?;
        let tau = self.tau(&s)?;
        let arrays = SystemArrays::compute(&self.population, &m, self.dims.actions);
        let mut advice: Vec<Option<usize>> = obs.advice.iter().copied().take(self.dims.heuristics).collect();
        advice.resize(self.dims.heuristics, None);
        let weights = self.config.heuristic_weights.clone();
        let selection = select_action(&arrays, &tau, &self.config.engine, self.config.selection, &weights, rng)?;

        if let Some(prev) = self.pending.take() {
            if prev.outcome.is_some() {
                let target = target_prediction(
                    prev.outcome.unwrap().1,
                    Some(&arrays),
                    &tau,
                    self.config.engine.discount,
                );
                self.learn(&prev, target, rng);
            }
        }
        self.pending = Some(Pending { match_set: m, arrays, action: selection.action, tau, advice, outcome: None });
        Ok(selection.action)
    }

    /// Records the joint move's outcome; closes the episode when terminal.
    pub fn feedback(&mut self, fb: &Feedback, rng: &mut SessionRng) {
        let Some(pending) = self.pending.as_mut() else { return };
        pending.outcome = Some((fb.other_action, fb.reward));
        if self.model.is_some() {
            self.buffer.record(*pending.match_set.situation(), fb.other_action);
        }
        if fb.terminal {
            let prev = self.pending.take().expect("checked above");
            self.learn(&prev, fb.reward, rng);
            self.end_episode();
        }
    }

    /// Drops per-episode state without learning from an unfinished step.
    pub fn end_episode(&mut self) {
        self.pending = None;
        self.traces.clear();
        if let Some(model) = self.model.as_mut() {
            model.train_episode(&mut self.buffer);
        }
        self.buffer.clear();
    }

    fn learn(&mut self, prev: &Pending, target: f64, rng: &mut SessionRng) {
        let Some((opponent, _)) = prev.outcome else { return };
        let params = &self.config.engine;
        let s = *prev.match_set.situation();
        let mut aset = prev.match_set.action_set(&self.population, prev.action);
        if !aset.is_empty() {
            let r = Reinforcement {
                target,
                opponent_action: opponent,
                tau: &prev.tau,
                advice: &prev.advice,
                previous: &prev.arrays,
            };
            reinforce_action_set(&mut self.population, &aset, &r, params);
            if params.action_set_subsumption {
                action_set_subsumption(&mut self.population, &mut aset, params);
            }
            run_ga(&mut self.population, &aset, &s, params, rng);
            aset.retain_live(&self.population);
        }
        if self.config.use_traces {
            let phi = prev.arrays.max_expected(&prev.tau);
            apply_trace_updates(&self.traces, &mut self.population, target, phi, aset.members(), params);
            self.traces.record(&s, prev.action, opponent);
            self.traces.decay(params.trace_decay, params.discount, params.trace_threshold);
        }
    }

    pub fn census(&self) -> Census {
        self.population.census()
    }

    pub fn snapshot(&self, action_label: impl Fn(usize) -> String) -> String {
        population_snapshot(&self.population, action_label)
    }
}

impl Agent for HamxcsAgent {
    fn act(&mut self, obs: &Observation, rng: &mut SessionRng) -> usize {
        self.step(obs, rng).expect("observation matches the agent's dimensions")
    }

    fn observe(&mut self, feedback: &Feedback, rng: &mut SessionRng) {
        self.feedback(feedback, rng);
    }

    fn census(&self) -> Option<Census> {
        Some(self.population.census())
    }

    fn snapshot(&self, action_label: &dyn Fn(usize) -> String) -> Option<String> {
        Some(population_snapshot(&self.population, action_label))
    }

    fn model_bytes(&self) -> Option<Vec<u8>> {
        self.model.as_ref().map(OpponentModel::to_bytes)
    }
}

fn vector(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.2}")).collect();
    format!("[{}]", items.join(","))
}

/// One line per macroclassifier, most numerous first:
/// `condition action p=[..] h=[..;..] eps F num exp`.
pub fn population_snapshot(pop: &Population, action_label: impl Fn(usize) -> String) -> String {
    let mut rows: Vec<_> = pop.iter().map(|(_, c)| c).collect();
    rows.sort_by(|a, b| {
        b.numerosity
            .cmp(&a.numerosity)
            .then(a.action().cmp(&b.action()))
            .then(a.condition().to_string().cmp(&b.condition().to_string()))
    });
    let mut out = String::new();
    for c in rows {
        let h: Vec<String> = c.heuristics.iter().map(|h| vector(h)).collect();
        let _ = writeln!(
            out,
            "{} {} p={} h=[{}] eps={:.2} F={:.2} num={} exp={}",
            c.condition(),
            action_label(c.action()),
            vector(&c.prediction),
            h.join(";"),
            c.error,
            c.fitness,
            c.numerosity,
            c.experience
        );
    }
    out
}

/// One parsed snapshot line.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotRow {
    pub condition: String,
    pub action: String,
    pub prediction: Vec<f64>,
    pub heuristics: Vec<Vec<f64>>,
    pub error: f64,
    pub fitness: f64,
    pub numerosity: u32,
    pub experience: u64,
}

fn parse_vector(s: &str) -> Result<Vec<f64>> {
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [..], got {s:?}")))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|x| x.parse::<f64>().map_err(|e| Error::Parse(format!("{x:?}: {e}"))))
        .collect()
}

fn field<'a>(token: Option<&'a str>, key: &str) -> Result<&'a str> {
    token
        .and_then(|t| t.strip_prefix(key))
        .ok_or_else(|| Error::Parse(format!("missing field {key}")))
}

pub fn parse_snapshot(text: &str) -> Result<Vec<SnapshotRow>> {
    let mut rows = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let mut t = line.split_whitespace();
        let condition = t.next().ok_or_else(|| Error::Parse("empty line".into()))?.to_string();
        condition.parse::<crate::condition::Condition>()?;
        let action = t.next().ok_or_else(|| Error::Parse("missing action".into()))?.to_string();
        let prediction = parse_vector(field(t.next(), "p=")?)?;
        let h = field(t.next(), "h=")?;
        let h_inner = h
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("bad heuristic field {h:?}")))?;
        let heuristics = if h_inner.is_empty() {
            Vec::new()
        } else {
            h_inner.split(';').map(parse_vector).collect::<Result<_>>()?
        };
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        let error = num(field(t.next(), "eps=")?)?;
        let fitness = num(field(t.next(), "F=")?)?;
        let numerosity = field(t.next(), "num=")?.parse().map_err(|e| Error::Parse(format!("num: {e}")))?;
        let experience = field(t.next(), "exp=")?.parse().map_err(|e| Error::Parse(format!("exp: {e}")))?;
        rows.push(SnapshotRow { condition, action, prediction, heuristics, error, fitness, numerosity, experience });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::session_rng;

    fn obs(bits: u64, advice: Vec<Option<usize>>) -> Observation {
        Observation { situation: Situation::new(bits, 4).unwrap(), advice, actions: 3 }
    }

    fn agent(config: HamxcsConfig) -> HamxcsAgent {
        let mut rng = session_rng(1, 0);
        HamxcsAgent::new(config, 4, 3, 2, &mut rng).unwrap()
    }

    #[test]
    fn first_step_covers_every_action() {
        let mut a = agent(HamxcsConfig::default());
        let mut rng = session_rng(1, 1);
        let act = a.step(&obs(0b1010, vec![Some(1), None]), &mut rng).unwrap();
        assert!(act < 3);
        let m = MatchSet::scan(a.population(), &Situation::new(0b1010, 4).unwrap());
        assert_eq!(m.actions(a.population()), vec![0, 1, 2]);
    }

    #[test]
    fn wrong_width_is_an_error() {
        let mut a = agent(HamxcsConfig::default());
        let mut rng = session_rng(1, 1);
        let bad = Observation { situation: Situation::new(0, 5).unwrap(), advice: vec![], actions: 3 };
        assert!(a.step(&bad, &mut rng).is_err());
    }

    #[test]
    fn terminal_reward_reaches_the_action_set() {
        let config = HamxcsConfig { engine: EngineParams { explore_rate: 0.0, ..Default::default() }, ..HamxcsConfig::plain() };
        let mut a = agent(config);
        let mut rng = session_rng(1, 2);
        let act = a.step(&obs(0b0001, vec![]), &mut rng).unwrap();
        a.feedback(&Feedback { own_action: act, other_action: 1, reward: 100.0, terminal: true }, &mut rng);
        let s = Situation::new(0b0001, 4).unwrap();
        let aset = MatchSet::scan(a.population(), &s).action_set(a.population(), act);
        for &id in aset.members() {
            let c = a.population().get(id).unwrap();
            assert_eq!(c.experience, 1);
            assert!((c.prediction[1] - (0.00001 + 0.15 * (100.0 - 0.00001))).abs() < 1e-9);
            assert_eq!(c.prediction[0], 0.00001);
        }
        assert!(a.traces().is_empty());
    }

    #[test]
    fn traces_follow_the_trajectory_and_reset_per_episode() {
        let mut a = agent(HamxcsConfig::default());
        let mut rng = session_rng(1, 3);
        let mut last = 0;
        for t in 0..3 {
            last = a.step(&obs(t, vec![Some(0), Some(2)]), &mut rng).unwrap();
            a.feedback(&Feedback { own_action: last, other_action: 0, reward: 0.0, terminal: false }, &mut rng);
        }
        // The two completed steps before the pending one are traced.
        assert_eq!(a.traces().len(), 2);
        a.step(&obs(3, vec![None, None]), &mut rng).unwrap();
        assert!(a.traces().get(&Situation::new(2, 4).unwrap(), last, 0).is_some());
        a.feedback(&Feedback { own_action: 0, other_action: 1, reward: -100.0, terminal: true }, &mut rng);
        assert!(a.traces().is_empty());
    }

    #[test]
    fn snapshot_round_trips_through_parser() {
        let mut a = agent(HamxcsConfig::default());
        let mut rng = session_rng(1, 4);
        for t in 0..40 {
            let act = a.step(&obs(t % 16, vec![Some(1), None]), &mut rng).unwrap();
            a.feedback(&Feedback { own_action: act, other_action: (t % 2) as usize, reward: t as f64, terminal: t % 7 == 6 }, &mut rng);
        }
        let text = a.snapshot(|x| format!("a{x}"));
        let rows = parse_snapshot(&text).unwrap();
        assert_eq!(rows.len(), a.population().len());
        assert_eq!(rows.iter().map(|r| r.numerosity as u64).sum::<u64>(), a.population().numerosity());
        assert!(rows.iter().all(|r| r.prediction.len() == 2 && r.heuristics.len() == 2));
        assert!(parse_snapshot("1#01 a0 p=[1.00] h=[] eps=x F=0.1 num=1 exp=0").is_err());
    }
}
