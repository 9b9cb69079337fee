//! Experiment orchestration: configuration, the session loop, aggregation,
//! significance tests and result files.

pub mod aggregate;
pub mod config;
pub mod output;
pub mod session;
pub mod stats;

pub use aggregate::{aggregate, CurvePoint};
pub use config::{ExperimentConfig, PlayerSpec, Profile};
pub use output::{emit_results, read_matches_csv, Summary};
pub use session::{run_session, run_sessions, MatchRecord, SessionResult};
pub use stats::{welch_t_test, TTest};
