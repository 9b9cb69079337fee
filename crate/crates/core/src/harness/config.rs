//! Experiment configuration, read from a flat JSON object.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{Algorithm, BaselineParams};
use crate::env::DEFAULT_STEP_LIMIT;
use crate::error::{Error, Result};
use crate::opponent_model::ModelParams;
use crate::xcs::{EngineParams, SelectionMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Environment {
    ThiefHunter,
    Hexcer,
}

/// Who plays one side of the game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlayerSpec {
    /// Pareto selection over every heuristic, traces and opponent model.
    HamxcsPareto,
    /// Greedy selection over the summed heuristics, traces and opponent model.
    Hamxcs,
    /// Classifier system without heuristics, traces or opponent model.
    Xcs,
    Tabular(Algorithm),
    Random,
    Standby,
    Heuristic,
    Fixed(usize),
}

impl FromStr for PlayerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hamxcs_p" | "hamxcs_pareto" => PlayerSpec::HamxcsPareto,
            "hamxcs" => PlayerSpec::Hamxcs,
            "xcs" => PlayerSpec::Xcs,
            "minimax_q" => PlayerSpec::Tabular(Algorithm::MinimaxQ),
            "minimax_sarsa" => PlayerSpec::Tabular(Algorithm::MinimaxSarsa),
            "minimax_q_lambda" => PlayerSpec::Tabular(Algorithm::MinimaxQLambda),
            "minimax_sarsa_lambda" => PlayerSpec::Tabular(Algorithm::MinimaxSarsaLambda),
            "hammq" => PlayerSpec::Tabular(Algorithm::Hammq),
            "nscp" => PlayerSpec::Tabular(Algorithm::Nscp),
            "random" => PlayerSpec::Random,
            "standby" => PlayerSpec::Standby,
            "heuristic" => PlayerSpec::Heuristic,
            other => match other.strip_prefix("fixed:") {
                Some(n) => PlayerSpec::Fixed(
                    n.parse().map_err(|_| Error::InvalidConfig(format!("bad fixed action {n:?}")))?,
                ),
                None => return Err(Error::InvalidConfig(format!("unknown player {other:?}"))),
            },
        })
    }
}

impl std::fmt::Display for PlayerSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PlayerSpec::HamxcsPareto => "hamxcs_p",
            PlayerSpec::Hamxcs => "hamxcs",
            PlayerSpec::Xcs => "xcs",
            PlayerSpec::Tabular(Algorithm::MinimaxQ) => "minimax_q",
            PlayerSpec::Tabular(Algorithm::MinimaxSarsa) => "minimax_sarsa",
            PlayerSpec::Tabular(Algorithm::MinimaxQLambda) => "minimax_q_lambda",
            PlayerSpec::Tabular(Algorithm::MinimaxSarsaLambda) => "minimax_sarsa_lambda",
            PlayerSpec::Tabular(Algorithm::Hammq) => "hammq",
            PlayerSpec::Tabular(Algorithm::Nscp) => "nscp",
            PlayerSpec::Random => "random",
            PlayerSpec::Standby => "standby",
            PlayerSpec::Heuristic => "heuristic",
            PlayerSpec::Fixed(n) => return write!(f, "fixed:{n}"),
        };
        f.write_str(s)
    }
}

impl Serialize for PlayerSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PlayerSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// 5 sessions x 500 matches.
    Desk,
    /// 50 sessions x 3000 matches.
    Paper,
}

impl Profile {
    pub fn sessions_and_matches(self) -> (usize, usize) {
        match self {
            Profile::Desk => (5, 500),
            Profile::Paper => (50, 3000),
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(Error::InvalidConfig(format!("unknown profile {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: Environment,
    /// Board or map file; the bundled layout when absent.
    pub map: Option<PathBuf>,
    pub agent: PlayerSpec,
    pub opponent: PlayerSpec,
    /// Overrides the selection mode of classifier-system players.
    pub selection: Option<SelectionMode>,
    /// Overrides whether classifier-system players use heuristics.
    pub heuristics: Option<bool>,
    pub traces: Option<bool>,
    pub opponent_model: Option<bool>,
    /// Weight per heuristic in greedy selection; unit weights when absent.
    pub heuristic_weights: Option<Vec<f64>>,
    pub sessions: usize,
    pub matches: usize,
    pub games: usize,
    pub step_limit: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Run sessions on the thread pool when the parallel feature is built.
    pub parallel: bool,
    /// Write each session's learned structure next to the CSV files.
    pub snapshots: bool,
    pub engine: EngineParams,
    pub model: ModelParams,
    pub baseline: BaselineParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let (sessions, matches) = Profile::Desk.sessions_and_matches();
        ExperimentConfig {
            environment: Environment::ThiefHunter,
            map: None,
            agent: PlayerSpec::HamxcsPareto,
            opponent: PlayerSpec::Tabular(Algorithm::MinimaxQ),
            selection: None,
            heuristics: None,
            traces: None,
            opponent_model: None,
            heuristic_weights: None,
            sessions,
            matches,
            games: 10,
            step_limit: DEFAULT_STEP_LIMIT,
            seed: 1,
            out: PathBuf::from("results"),
            parallel: true,
            snapshots: true,
            engine: EngineParams::default(),
            model: ModelParams::default(),
            baseline: BaselineParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text).map_err(|source| Error::Json { path: path.into(), source })?;
        // Relative map paths are relative to the config file.
        if let (Some(map), Some(dir)) = (cfg.map.as_mut(), path.parent()) {
            if map.is_relative() {
                *map = dir.join(&*map);
            }
        }
        Ok(cfg)
    }

    pub fn apply_profile(&mut self, profile: Profile) {
        (self.sessions, self.matches) = profile.sessions_and_matches();
    }

    pub fn validate(&self) -> Result<()> {
        if self.sessions == 0 {
            return Err(Error::InvalidConfig("sessions must be at least 1".into()));
        }
        if self.games == 0 {
            return Err(Error::InvalidConfig("games per match must be at least 1".into()));
        }
        if self.step_limit == 0 {
            return Err(Error::InvalidConfig("step limit must be at least 1".into()));
        }
        self.engine.validate()?;
        self.baseline.validate()?;
        Ok(())
    }
}
