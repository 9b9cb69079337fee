use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Learning-system constants. Defaults reproduce the reference HAMXCS setup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineParams {
    /// Maximum number of microclassifiers.
    pub population_size: usize,
    /// Learning rate for the payoff prediction of the reinforced action set.
    pub prediction_rate: f64,
    /// Learning rate for the prediction error of the reinforced action set.
    pub error_rate: f64,
    /// Learning rate for fitness.
    pub fitness_rate: f64,
    /// Learning rate for traced predictions.
    pub trace_prediction_rate: f64,
    /// Learning rate for traced prediction errors.
    pub trace_error_rate: f64,
    pub accuracy_coefficient: f64,
    pub error_threshold: f64,
    pub accuracy_power: f64,
    pub discount: f64,
    pub ga_threshold: f64,
    pub deletion_threshold: u64,
    pub subsumption_threshold: u64,
    /// Minimum number of distinct actions in a match set; `None` means all.
    pub min_actions: Option<usize>,
    pub fitness_threshold: f64,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub wildcard_prob: f64,
    /// Weight of the fitness-averaged heuristic in the selection score.
    pub heuristic_weight: f64,
    /// Margin added when a heuristic value is refreshed.
    pub heuristic_magnitude: f64,
    pub explore_rate: f64,
    pub trace_decay: f64,
    pub trace_threshold: f64,
    /// Initial prediction, heuristic, error and fitness of covering rules.
    pub initial_value: f64,
    pub action_set_subsumption: bool,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams {
            population_size: 500,
            prediction_rate: 0.15,
            error_rate: 0.15,
            fitness_rate: 0.15,
            trace_prediction_rate: 0.15,
            trace_error_rate: 0.15,
            accuracy_coefficient: 0.1,
            error_threshold: 0.01,
            accuracy_power: 5.0,
            discount: 0.71,
            ga_threshold: 35.0,
            deletion_threshold: 20,
            subsumption_threshold: 20,
            min_actions: None,
            fitness_threshold: 0.1,
            crossover_prob: 0.75,
            mutation_prob: 0.03,
            wildcard_prob: 0.33,
            heuristic_weight: 1.0,
            heuristic_magnitude: 10.0,
            explore_rate: 0.1,
            trace_decay: 0.05,
            trace_threshold: 0.001,
            initial_value: 0.00001,
            action_set_subsumption: true,
        }
    }
}

impl EngineParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64, zero_ok: bool| {
            let ok = if zero_ok { (0.0..=1.0).contains(&v) } else { v > 0.0 && v <= 1.0 };
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} = {v} out of range")))
            }
        };
        if self.population_size == 0 {
            return Err(Error::InvalidConfig("population_size must be positive".into()));
        }
        unit("prediction_rate", self.prediction_rate, false)?;
        unit("error_rate", self.error_rate, false)?;
        unit("fitness_rate", self.fitness_rate, false)?;
        unit("trace_prediction_rate", self.trace_prediction_rate, false)?;
        unit("trace_error_rate", self.trace_error_rate, false)?;
        unit("crossover_prob", self.crossover_prob, true)?;
        unit("mutation_prob", self.mutation_prob, true)?;
        unit("wildcard_prob", self.wildcard_prob, true)?;
        unit("explore_rate", self.explore_rate, true)?;
        unit("fitness_threshold", self.fitness_threshold, true)?;
        if !(0.0..1.0).contains(&self.discount) {
            return Err(Error::InvalidConfig(format!("discount = {} not in [0,1)", self.discount)));
        }
        if !(self.trace_decay > 0.0 && self.trace_decay < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "trace_decay = {} not in (0,1)",
                self.trace_decay
            )));
        }
        if self.error_threshold <= 0.0 {
            return Err(Error::InvalidConfig("error_threshold must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn min_actions_for(&self, action_count: usize) -> usize {
        self.min_actions.unwrap_or(action_count).min(action_count)
    }
}
