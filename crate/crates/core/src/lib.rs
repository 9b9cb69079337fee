//! Accuracy-based classifier system for two-player zero-sum Markov games,
//! with heuristic guidance, an opponent model and eligibility traces, plus
//! tabular baselines, two grid games and an experiment harness.

pub mod agent;
pub mod baselines;
pub mod classifier;
pub mod condition;
pub mod eligibility;
pub mod env;
pub mod error;
pub mod harness;
pub mod opponent_model;
pub mod rng;
pub mod xcs;

pub use classifier::{Census, Classifier, ClassifierId, Population};
pub use condition::{Condition, Situation};
pub use error::{Error, Result};
