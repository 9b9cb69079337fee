//! Tabular joint-action learners used as comparison agents and opponents.

pub mod learner;
pub mod qtable;

pub use learner::{Algorithm, BaselineParams, TabularAgent};
pub use qtable::{minimax_q_update, minimax_sarsa_update, JointQTable, StateKey};
