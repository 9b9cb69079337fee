//! The classifier-system learning cycle.

pub mod agent;
pub mod deletion;
pub mod ga;
pub mod match_set;
pub mod params;
pub mod selection;
pub mod update;

pub use agent::{HamxcsAgent, HamxcsConfig};
pub use match_set::{build_match_set, ActionSet, Dimensions, MatchSet, SystemArrays};
pub use params::EngineParams;
pub use selection::{select_action, SelectionMode};
