//! The interface every player in a game loop implements, and a few scripted
//! players.

use rand::Rng;

use crate::classifier::Census;
use crate::condition::Situation;
use crate::rng::SessionRng;

/// What a player sees before moving.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub situation: Situation,
    /// Advice of each heuristic policy available for this player.
    pub advice: Vec<Option<usize>>,
    /// Actions available to this player.
    pub actions: usize,
}

/// Outcome of the joint move, from this player's point of view.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Feedback {
    pub own_action: usize,
    pub other_action: usize,
    pub reward: f64,
    pub terminal: bool,
}

pub trait Agent: Send {
    fn act(&mut self, obs: &Observation, rng: &mut SessionRng) -> usize;

    fn observe(&mut self, feedback: &Feedback, rng: &mut SessionRng);

    /// Population census for rule-based learners.
    fn census(&self) -> Option<Census> {
        None
    }

    /// Text snapshot of the learned structure, if there is one.
    fn snapshot(&self, _action_label: &dyn Fn(usize) -> String) -> Option<String> {
        None
    }

    /// Binary weights of a learned opponent model, if there is one.
    fn model_bytes(&self) -> Option<Vec<u8>> {
        None
    }
}

/// Always plays the same action.
#[derive(Clone, Debug)]
pub struct FixedAgent(pub usize);

impl Agent for FixedAgent {
    fn act(&mut self, _: &Observation, _: &mut SessionRng) -> usize {
        self.0
    }

    fn observe(&mut self, _: &Feedback, _: &mut SessionRng) {}
}

/// Uniformly random legal action index.
#[derive(Clone, Debug, Default)]
pub struct RandomAgent;

impl Agent for RandomAgent {
    fn act(&mut self, obs: &Observation, rng: &mut SessionRng) -> usize {
        rng.gen_range(0..obs.actions)
    }

    fn observe(&mut self, _: &Feedback, _: &mut SessionRng) {}
}

/// Follows the first heuristic that offers advice; otherwise picks at random.
#[derive(Clone, Debug, Default)]
pub struct HeuristicAgent;

impl Agent for HeuristicAgent {
    fn act(&mut self, obs: &Observation, rng: &mut SessionRng) -> usize {
        match obs.advice.iter().flatten().next() {
            Some(&a) => a,
            None => rng.gen_range(0..obs.actions),
        }
    }

    fn observe(&mut self, _: &Feedback, _: &mut SessionRng) {}
}
