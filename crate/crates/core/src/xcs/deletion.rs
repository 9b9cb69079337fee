use rand::Rng;

use crate::classifier::{Classifier, Population};
use crate::xcs::params::EngineParams;

/// Deletion vote of one macroclassifier. Experienced members whose
/// per-micro fitness falls below `fitness_threshold * mean_fitness` are
/// penalised in proportion to the shortfall.
pub fn deletion_vote(c: &Classifier, mean_fitness: f64, params: &EngineParams) -> f64 {
    let num = c.numerosity as f64;
    let vote = c.action_set_size * num;
    let micro_fitness = c.fitness / num;
    if c.experience > params.deletion_threshold
        && micro_fitness < params.fitness_threshold * mean_fitness
        && micro_fitness > 0.0
    {
        vote * mean_fitness / micro_fitness
    } else {
        vote
    }
}

/// Roulette-deletes microclassifiers until the population fits its capacity.
pub fn delete_from_population<R: Rng + ?Sized>(
    pop: &mut Population,
    params: &EngineParams,
    rng: &mut R,
) {
    while pop.numerosity() > params.population_size as u64 {
        let mean = pop.mean_fitness();
        let votes: Vec<_> =
            pop.iter().map(|(id, c)| (id, deletion_vote(c, mean, params))).collect();
        let total: f64 = votes.iter().map(|v| v.1).sum();
        let mut point = rng.gen::<f64>() * total;
        let mut chosen = votes.last().map(|v| v.0);
        for &(id, v) in &votes {
            point -= v;
            if point < 0.0 {
                chosen = Some(id);
                break;
            }
        }
        match chosen {
            Some(id) => pop.decrement(id),
            None => break,
        }
    }
}
