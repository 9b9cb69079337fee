//! Two-player simultaneous-move grid games.

pub mod hexcer;
pub mod thief_hunter;

pub use hexcer::Hexcer;
pub use thief_hunter::ThiefHunter;

use crate::condition::Situation;
use crate::error::Result;
use crate::rng::SessionRng;

/// Episode length cap used when a config does not set one.
pub const DEFAULT_STEP_LIMIT: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Agent,
    Opponent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepResult {
    pub agent_reward: f64,
    pub opponent_reward: f64,
    pub terminal: bool,
    /// `None` while running, and on a draw at the step limit.
    pub winner: Option<Side>,
}

pub trait Game: Send {
    /// Restores the initial configuration and the step counter.
    fn reset(&mut self, rng: &mut SessionRng);

    /// Applies both moves at once. Fails on an invalid action or after the
    /// game has ended.
    fn step(&mut self, agent: usize, opponent: usize, rng: &mut SessionRng) -> Result<StepResult>;

    /// The state encoded from `side`'s point of view: own position first.
    fn situation(&self, side: Side) -> Situation;

    /// One entry per heuristic policy for `side`.
    fn advice(&self, side: Side) -> Vec<Option<usize>>;

    fn action_count(&self, side: Side) -> usize;

    fn situation_width(&self) -> usize;

    /// Steps taken in the current episode.
    fn steps(&self) -> usize;

    fn action_label(&self, side: Side, action: usize) -> String;
}

/// Content lines of a board file: comments and blank lines dropped.
fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}
