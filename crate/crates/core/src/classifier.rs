//! Classifiers and the macroclassifier population.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::condition::{Condition, Situation};

/// A condition-action rule carrying one payoff prediction and one value per
/// heuristic for each opponent action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    condition: Condition,
    action: usize,
    pub prediction: Vec<f64>,
    pub heuristics: Vec<Vec<f64>>,
    pub error: f64,
    pub fitness: f64,
    pub numerosity: u32,
    pub experience: u64,
    pub time_stamp: u64,
    pub action_set_size: f64,
}

impl Classifier {
    /// A classifier with every prediction, heuristic, error and fitness value
    /// set to `initial`.
    pub fn new(
        condition: Condition,
        action: usize,
        opponent_actions: usize,
        heuristic_count: usize,
        initial: f64,
        time_stamp: u64,
    ) -> Self {
        Classifier {
            condition,
            action,
            prediction: vec![initial; opponent_actions],
            heuristics: vec![vec![initial; opponent_actions]; heuristic_count],
            error: initial,
            fitness: initial,
            numerosity: 1,
            experience: 0,
            time_stamp,
            action_set_size: 1.0,
        }
    }

    pub fn condition(&self) -> &Condition {
        &self.condition
    }

    pub fn action(&self) -> usize {
        self.action
    }

    pub(crate) fn with_condition(mut self, condition: Condition) -> Self {
        self.condition = condition;
        self
    }

    pub fn matches(&self, s: &Situation) -> bool {
        self.condition.matches_unchecked(s)
    }

    /// Expected payoff of this rule under an opponent distribution.
    pub fn expected_prediction(&self, tau: &[f64]) -> f64 {
        self.prediction.iter().zip(tau).map(|(p, t)| p * t).sum()
    }
}

/// Stable handle to a population member. Handles of deleted members never
/// resolve again, even after their slot is reused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassifierId {
    slot: u32,
    generation: u32,
}

#[derive(Clone, Debug)]
struct Slot {
    generation: u32,
    classifier: Option<Classifier>,
}

/// Fixed-capacity multiset of macroclassifiers.
#[derive(Clone, Debug)]
pub struct Population {
    slots: Vec<Slot>,
    free: Vec<u32>,
    index: HashMap<(Condition, usize), ClassifierId>,
    capacity: usize,
    /// Global learning-step counter used for GA time stamps.
    pub clock: u64,
}

impl Population {
    pub fn new(capacity: usize) -> Self {
        Population {
            slots: Vec::new(),
            free: Vec::new(),
            index: HashMap::new(),
            capacity,
            clock: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Number of macroclassifiers.
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Number of microclassifiers.
    pub fn numerosity(&self) -> u64 {
        self.iter().map(|(_, c)| c.numerosity as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClassifierId, &Classifier)> + '_ {
        self.slots.iter().enumerate().filter_map(|(i, slot)| {
            slot.classifier.as_ref().map(|c| {
                (ClassifierId { slot: i as u32, generation: slot.generation }, c)
            })
        })
    }

    pub fn ids(&self) -> Vec<ClassifierId> {
        self.iter().map(|(id, _)| id).collect()
    }

    pub fn get(&self, id: ClassifierId) -> Option<&Classifier> {
        let slot = self.slots.get(id.slot as usize)?;
        if slot.generation != id.generation {
            return None;
        }
        slot.classifier.as_ref()
    }

    /// Mutable access to a member. Condition and action are not reachable
    /// through this reference, which keeps the duplicate index valid.
    pub fn get_mut(&mut self, id: ClassifierId) -> Option<&mut Classifier> {
        let slot = self.slots.get_mut(id.slot as usize)?;
        if slot.generation != id.generation {
            return None;
        }
        slot.classifier.as_mut()
    }

    pub fn contains(&self, id: ClassifierId) -> bool {
        self.get(id).is_some()
    }

    pub fn find(&self, condition: &Condition, action: usize) -> Option<ClassifierId> {
        self.index.get(&(*condition, action)).copied()
    }

    /// Adds a classifier. If a member with the same condition and action
    /// exists, its numerosity absorbs the newcomer's and its handle is
    /// returned instead.
    pub fn insert(&mut self, classifier: Classifier) -> ClassifierId {
        let key = (classifier.condition, classifier.action);
        if let Some(&id) = self.index.get(&key) {
            let existing = self.get_mut(id).expect("index points at a live classifier");
            existing.numerosity += classifier.numerosity;
            return id;
        }
        let id = match self.free.pop() {
            Some(slot) => {
                let s = &mut self.slots[slot as usize];
                s.classifier = Some(classifier);
                ClassifierId { slot, generation: s.generation }
            }
            None => {
                self.slots.push(Slot { generation: 0, classifier: Some(classifier) });
                ClassifierId { slot: self.slots.len() as u32 - 1, generation: 0 }
            }
        };
        self.index.insert(key, id);
        id
    }

    pub fn remove(&mut self, id: ClassifierId) -> Option<Classifier> {
        let slot = self.slots.get_mut(id.slot as usize)?;
        if slot.generation != id.generation {
            return None;
        }
        let classifier = slot.classifier.take()?;
        slot.generation = slot.generation.wrapping_add(1);
        self.free.push(id.slot);
        self.index.remove(&(classifier.condition, classifier.action));
        Some(classifier)
    }

    /// Removes one microclassifier; the macroclassifier goes when its
    /// numerosity reaches zero.
    pub fn decrement(&mut self, id: ClassifierId) {
        let Some(c) = self.get_mut(id) else { return };
        if c.numerosity > 1 {
            c.numerosity -= 1;
        } else {
            self.remove(id);
        }
    }

    pub fn mean_fitness(&self) -> f64 {
        let (f, n) = self
            .iter()
            .fold((0.0, 0u64), |(f, n), (_, c)| (f + c.fitness, n + c.numerosity as u64));
        if n == 0 {
            0.0
        } else {
            f / n as f64
        }
    }

    pub fn census(&self) -> Census {
        Census {
            macroclassifiers: self.len(),
            microclassifiers: self.numerosity(),
            used: self.iter().filter(|(_, c)| c.experience > 0).count(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub macroclassifiers: usize,
    pub microclassifiers: u64,
    /// Macroclassifiers that have been in at least one action set.
    pub used: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(cond: &str, action: usize) -> Classifier {
        Classifier::new(cond.parse().unwrap(), action, 2, 1, 0.00001, 0)
    }

    #[test]
    fn duplicate_insert_merges_numerosity() {
        let mut pop = Population::new(10);
        let a = pop.insert(cl("1#0", 0));
        let b = pop.insert(cl("1#0", 0));
        assert_eq!(a, b);
        assert_eq!(pop.len(), 1);
        assert_eq!(pop.get(a).unwrap().numerosity, 2);
        pop.insert(cl("1#0", 1));
        assert_eq!(pop.len(), 2);
        assert_eq!(pop.numerosity(), 3);
    }

    #[test]
    fn stale_handles_do_not_resolve() {
        let mut pop = Population::new(10);
        let a = pop.insert(cl("1#0", 0));
        pop.decrement(a);
        assert!(pop.get(a).is_none());
        let b = pop.insert(cl("000", 1));
        assert_ne!(a, b);
        assert!(pop.get(a).is_none());
        assert_eq!(pop.get(b).unwrap().action(), 1);
        assert!(pop.find(&"1#0".parse().unwrap(), 0).is_none());
    }

    #[test]
    fn census_counts_used_members() {
        let mut pop = Population::new(10);
        let a = pop.insert(cl("1#0", 0));
        pop.insert(cl("1##", 0));
        pop.get_mut(a).unwrap().experience = 3;
        pop.get_mut(a).unwrap().numerosity = 4;
        let c = pop.census();
        assert_eq!(c, Census { macroclassifiers: 2, microclassifiers: 5, used: 1 });
    }
}
