//! The session loop: fresh players and game, matches of several games, both
//! players learning in lockstep.

use serde::{Deserialize, Serialize};

use super::config::{Environment, ExperimentConfig, PlayerSpec};
use crate::agent::{Agent, FixedAgent, Feedback, HeuristicAgent, Observation, RandomAgent};
use crate::baselines::TabularAgent;
use crate::classifier::Census;
use crate::env::hexcer::{self, HexBoard};
use crate::env::thief_hunter::{self, ThiefHunterMap};
use crate::env::{Game, Hexcer, Side, ThiefHunter};
use crate::error::{Error, Result};
use crate::rng::{session_rng, SessionRng};
use crate::xcs::{HamxcsAgent, HamxcsConfig, SelectionMode};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub session: usize,
    #[serde(rename = "match")]
    pub match_index: usize,
    pub agent_wins: u32,
    pub opponent_wins: u32,
    pub draws: u32,
    pub steps: u64,
    pub net_wins: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionResult {
    pub session: usize,
    pub records: Vec<MatchRecord>,
    /// Final population census of a classifier-system agent.
    pub census: Option<Census>,
    pub agent_snapshot: Option<String>,
    pub opponent_snapshot: Option<String>,
    /// Final opponent-model weights of the agent.
    pub agent_model: Option<Vec<u8>>,
}

impl SessionResult {
    pub fn total_net_wins(&self) -> i64 {
        self.records.iter().map(|r| r.net_wins).sum()
    }
}

pub fn make_game(cfg: &ExperimentConfig) -> Result<Box<dyn Game>> {
    Ok(match cfg.environment {
        Environment::ThiefHunter => {
            let map = match &cfg.map {
                Some(p) => ThiefHunterMap::load(p)?,
                None => ThiefHunterMap::default(),
            };
            Box::new(ThiefHunter::new(map, cfg.step_limit))
        }
        Environment::Hexcer => {
            let board = match &cfg.map {
                Some(p) => HexBoard::load(p)?,
                None => HexBoard::default(),
            };
            Box::new(Hexcer::new(board, cfg.step_limit))
        }
    })
}

fn standby_action(env: Environment) -> usize {
    match env {
        Environment::ThiefHunter => thief_hunter::STANDBY,
        Environment::Hexcer => hexcer::STANDBY,
    }
}

fn classifier_config(cfg: &ExperimentConfig, spec: &PlayerSpec, heuristics: usize) -> HamxcsConfig {
    let base = match spec {
        PlayerSpec::Xcs => HamxcsConfig::plain(),
        PlayerSpec::Hamxcs => HamxcsConfig { selection: SelectionMode::Greedy, ..Default::default() },
        _ => HamxcsConfig { selection: SelectionMode::Pareto, ..Default::default() },
    };
    let uses_heuristics = cfg.heuristics.unwrap_or(!base.heuristic_weights.is_empty());
    let heuristic_weights = match (&cfg.heuristic_weights, uses_heuristics) {
        (_, false) => Vec::new(),
        (Some(w), true) => w.clone(),
        (None, true) => vec![1.0; heuristics],
    };
    HamxcsConfig {
        engine: cfg.engine.clone(),
        model: cfg.model.clone(),
        selection: cfg.selection.unwrap_or(base.selection),
        heuristic_weights,
        use_traces: cfg.traces.unwrap_or(base.use_traces),
        use_opponent_model: cfg.opponent_model.unwrap_or(base.use_opponent_model),
    }
}

pub fn make_player(
    cfg: &ExperimentConfig,
    spec: &PlayerSpec,
    game: &dyn Game,
    side: Side,
    rng: &mut SessionRng,
) -> Result<Box<dyn Agent>> {
    let other = match side {
        Side::Agent => Side::Opponent,
        Side::Opponent => Side::Agent,
    };
    let width = game.situation_width();
    let (actions, opponent_actions) = (game.action_count(side), game.action_count(other));
    Ok(match spec {
        PlayerSpec::HamxcsPareto | PlayerSpec::Hamxcs | PlayerSpec::Xcs => {
            let hc = classifier_config(cfg, spec, game.advice(side).len());
            Box::new(HamxcsAgent::new(hc, width, actions, opponent_actions, rng)?)
        }
        PlayerSpec::Tabular(alg) => {
            Box::new(TabularAgent::new(*alg, cfg.baseline.clone(), width, actions, opponent_actions)?)
        }
        PlayerSpec::Random => Box::new(RandomAgent),
        PlayerSpec::Heuristic => Box::new(HeuristicAgent),
        PlayerSpec::Standby => Box::new(FixedAgent(standby_action(cfg.environment))),
        PlayerSpec::Fixed(a) => {
            if *a >= actions {
                return Err(Error::InvalidAction { action: *a, count: actions });
            }
            Box::new(FixedAgent(*a))
        }
    })
}

fn observation(game: &dyn Game, side: Side) -> Observation {
    Observation { situation: game.situation(side), advice: game.advice(side), actions: game.action_count(side) }
}

/// Plays one game to the end and returns the winner, if any.
pub fn play_game(
    game: &mut dyn Game,
    agent: &mut dyn Agent,
    opponent: &mut dyn Agent,
    rng: &mut SessionRng,
) -> Result<Option<Side>> {
    game.reset(rng);
    loop {
        let a = agent.act(&observation(game, Side::Agent), rng);
        let o = opponent.act(&observation(game, Side::Opponent), rng);
        let r = game.step(a, o, rng)?;
        agent.observe(&Feedback { own_action: a, other_action: o, reward: r.agent_reward, terminal: r.terminal }, rng);
        opponent.observe(
            &Feedback { own_action: o, other_action: a, reward: r.opponent_reward, terminal: r.terminal },
            rng,
        );
        if r.terminal {
            return Ok(r.winner);
        }
    }
}

/// One full session; deterministic in (config, session index).
pub fn run_session(cfg: &ExperimentConfig, session: usize) -> Result<SessionResult> {
    cfg.validate()?;
    let mut rng = session_rng(cfg.seed, session as u64);
    let mut game = make_game(cfg)?;
    let mut agent = make_player(cfg, &cfg.agent, game.as_ref(), Side::Agent, &mut rng)?;
    let mut opponent = make_player(cfg, &cfg.opponent, game.as_ref(), Side::Opponent, &mut rng)?;
    let mut records = Vec::with_capacity(cfg.matches);
    for m in 0..cfg.matches {
        let mut rec = MatchRecord { session, match_index: m, ..Default::default() };
        for _ in 0..cfg.games {
            match play_game(game.as_mut(), agent.as_mut(), opponent.as_mut(), &mut rng)? {
                Some(Side::Agent) => rec.agent_wins += 1,
                Some(Side::Opponent) => rec.opponent_wins += 1,
                None => rec.draws += 1,
            }
            rec.steps += game.steps() as u64;
        }
        rec.net_wins = rec.agent_wins as i64 - rec.opponent_wins as i64;
        records.push(rec);
    }
    let snapshot = |player: &dyn Agent, side: Side| {
        if cfg.snapshots {
            player.snapshot(&|a| game.action_label(side, a))
        } else {
            None
        }
    };
    Ok(SessionResult {
        session,
        census: agent.census(),
        agent_snapshot: snapshot(agent.as_ref(), Side::Agent),
        opponent_snapshot: snapshot(opponent.as_ref(), Side::Opponent),
        agent_model: if cfg.snapshots { agent.model_bytes() } else { None },
        records,
    })
}

/// Runs sessions one after another.
pub fn run_sessions_sequential(cfg: &ExperimentConfig) -> Result<Vec<SessionResult>> {
    cfg.validate()?;
    (0..cfg.sessions).map(|s| run_session(cfg, s)).collect()
}

/// Runs sessions on the rayon pool; results come back in session order.
#[cfg(feature = "parallel")]
pub fn run_sessions_parallel(cfg: &ExperimentConfig) -> Result<Vec<SessionResult>> {
    use rayon::prelude::*;
    cfg.validate()?;
    (0..cfg.sessions).into_par_iter().map(|s| run_session(cfg, s)).collect()
}

/// Parallel when built with the `parallel` feature and enabled in the
/// config; sequential otherwise. Output is identical either way.
pub fn run_sessions(cfg: &ExperimentConfig) -> Result<Vec<SessionResult>> {
    #[cfg(feature = "parallel")]
    if cfg.parallel {
        return run_sessions_parallel(cfg);
    }
    run_sessions_sequential(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::Algorithm;

    fn small(agent: &str, opponent: &str) -> ExperimentConfig {
        ExperimentConfig {
            agent: agent.parse().unwrap(),
            opponent: opponent.parse().unwrap(),
            sessions: 2,
            matches: 3,
            games: 2,
            ..Default::default()
        }
    }

    #[test]
    fn standby_players_draw_at_the_limit() {
        for env in [Environment::ThiefHunter, Environment::Hexcer] {
            let cfg = ExperimentConfig { environment: env, matches: 1, games: 1, ..small("standby", "standby") };
            let r = run_session(&cfg, 0).unwrap();
            assert_eq!(r.records.len(), 1);
            let m = r.records[0];
            assert_eq!((m.agent_wins, m.opponent_wins, m.draws, m.steps), (0, 0, 1, 50));
        }
    }

    #[test]
    fn records_are_consistent() {
        let cfg = small("hamxcs_p", "minimax_q");
        let r = run_session(&cfg, 1).unwrap();
        for m in &r.records {
            assert_eq!(m.agent_wins + m.opponent_wins + m.draws, 2);
            assert_eq!(m.net_wins, m.agent_wins as i64 - m.opponent_wins as i64);
            assert!(m.steps <= 2 * 50);
            assert_eq!(m.session, 1);
        }
        let census = r.census.unwrap();
        assert!(census.microclassifiers <= 500);
        assert!(r.agent_snapshot.is_some() && r.opponent_snapshot.is_some());
    }

    #[test]
    fn same_seed_same_records() {
        let cfg = small("hamxcs", "nscp");
        assert_eq!(run_session(&cfg, 0).unwrap().records, run_session(&cfg, 0).unwrap().records);
        let other = ExperimentConfig { seed: 2, ..cfg.clone() };
        let a = run_sessions(&ExperimentConfig { matches: 20, ..cfg }).unwrap();
        let b = run_sessions(&ExperimentConfig { matches: 20, ..other }).unwrap();
        assert_ne!(a[0].records, b[0].records);
    }

    #[test]
    fn sequential_and_default_runs_agree() {
        let cfg = small("xcs", "random");
        let a = run_sessions_sequential(&cfg).unwrap();
        let b = run_sessions(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_player_kind_runs_on_both_games() {
        for env in [Environment::ThiefHunter, Environment::Hexcer] {
            for p in ["hamxcs_p", "hamxcs", "xcs", "minimax_sarsa_lambda", "hammq", "heuristic", "fixed:1"] {
                let cfg = ExperimentConfig { environment: env, sessions: 1, matches: 1, ..small(p, "minimax_q_lambda") };
                run_sessions(&cfg).unwrap();
                let cfg = ExperimentConfig { environment: env, sessions: 1, matches: 1, ..small("random", p) };
                run_sessions(&cfg).unwrap();
            }
        }
    }

    #[test]
    fn invalid_configs_fail_before_play() {
        let cfg = ExperimentConfig { games: 0, ..small("random", "random") };
        assert!(run_sessions(&cfg).is_err());
        let cfg = small("fixed:9", "random");
        assert!(run_session(&cfg, 0).is_err());
        let cfg = ExperimentConfig {
            opponent: PlayerSpec::Tabular(Algorithm::MinimaxQ),
            baseline: crate::baselines::BaselineParams { explore_rate: 2.0, ..Default::default() },
            ..small("random", "random")
        };
        assert!(run_session(&cfg, 0).is_err());
    }

    #[test]
    fn flags_shape_the_classifier_config() {
        let cfg = ExperimentConfig { traces: Some(false), heuristics: Some(false), ..Default::default() };
        let hc = classifier_config(&cfg, &PlayerSpec::HamxcsPareto, 2);
        assert!(!hc.use_traces && hc.heuristic_weights.is_empty() && hc.use_opponent_model);
        let hc = classifier_config(&ExperimentConfig::default(), &PlayerSpec::Hamxcs, 2);
        assert_eq!(hc.heuristic_weights, vec![1.0, 1.0]);
        assert_eq!(hc.selection, SelectionMode::Greedy);
        let hc = classifier_config(&ExperimentConfig::default(), &PlayerSpec::Xcs, 2);
        assert!(hc.heuristic_weights.is_empty() && !hc.use_traces && !hc.use_opponent_model);
    }
}
