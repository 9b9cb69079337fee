//! Niche genetic algorithm over action sets.

use rand::Rng;

use crate::classifier::{Classifier, ClassifierId, Population};
use crate::condition::{Condition, Situation};
use crate::error::{Error, Result};
use crate::xcs::deletion::delete_from_population;
use crate::xcs::match_set::ActionSet;
use crate::xcs::params::EngineParams;
use crate::xcs::update::could_subsume;

/// Swaps the symbols in positions `lo..hi` between the two conditions.
pub fn crossover_at(c1: &Condition, c2: &Condition, lo: usize, hi: usize) -> Result<(Condition, Condition)> {
    if c1.width() != c2.width() {
        return Err(Error::WidthMismatch { expected: c1.width(), actual: c2.width() });
    }
    let (mut a, mut b) = (*c1, *c2);
    for i in lo..hi.min(c1.width()) {
        a.set_symbol(i, c2.symbol(i));
        b.set_symbol(i, c1.symbol(i));
    }
    Ok((a, b))
}

/// Two-point crossover with cut points drawn uniformly from `0..=width`.
pub fn ga_crossover<R: Rng + ?Sized>(
    c1: &Condition,
    c2: &Condition,
    rng: &mut R,
) -> Result<(Condition, Condition)> {
    let w = c1.width();
    let x = rng.gen_range(0..=w);
    let y = rng.gen_range(0..=w);
    crossover_at(c1, c2, x.min(y), x.max(y))
}

/// Niche mutation: each position flips between `#` and the situation's bit
/// with probability `mu`, so the result always matches `s`.
pub fn ga_mutate<R: Rng + ?Sized>(c: &Condition, s: &Situation, mu: f64, rng: &mut R) -> Condition {
    let mut out = *c;
    for i in 0..c.width() {
        if rng.gen_bool(mu.clamp(0.0, 1.0)) {
            let next = match c.symbol(i) {
                None => Some(s.bit(i)),
                Some(_) => None,
            };
            out.set_symbol(i, next);
        } else if let Some(b) = c.symbol(i) {
            // Keep specified symbols that already agree; repair the rest so
            // offspring stay in the niche.
            if b != s.bit(i) {
                out.set_symbol(i, Some(s.bit(i)));
            }
        }
    }
    out
}

/// Absorbs `candidate` into `subsumer` when the latter is accurate,
/// experienced and strictly more general.
pub fn try_subsume(subsumer: &mut Classifier, candidate: &Classifier, params: &EngineParams) -> bool {
    if subsumer.action() == candidate.action()
        && could_subsume(subsumer, params)
        && subsumer.condition().is_more_general_unchecked(candidate.condition())
    {
        subsumer.numerosity += candidate.numerosity;
        true
    } else {
        false
    }
}

fn roulette<R: Rng + ?Sized>(pop: &Population, members: &[ClassifierId], rng: &mut R) -> ClassifierId {
    let total: f64 = members.iter().map(|&id| pop.get(id).unwrap().fitness).sum();
    let mut point = rng.gen::<f64>() * total;
    for &id in members {
        point -= pop.get(id).unwrap().fitness;
        if point < 0.0 {
            return id;
        }
    }
    *members.last().unwrap()
}

fn mean(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (x + y) / 2.0).collect()
}

/// Runs the GA in `aset` if the numerosity-weighted mean time stamp lags the
/// population clock by more than the GA threshold. Returns whether it ran.
pub fn run_ga<R: Rng + ?Sized>(
    pop: &mut Population,
    aset: &ActionSet,
    s: &Situation,
    params: &EngineParams,
    rng: &mut R,
) -> bool {
    let members: Vec<ClassifierId> =
        aset.members().iter().copied().filter(|&id| pop.contains(id)).collect();
    if members.is_empty() {
        return false;
    }
    let (ts_sum, num_sum) = members.iter().fold((0.0, 0.0), |(t, n), &id| {
        let c = pop.get(id).unwrap();
        (t + c.time_stamp as f64 * c.numerosity as f64, n + c.numerosity as f64)
    });
    let clock = pop.clock;
    if clock as f64 - ts_sum / num_sum <= params.ga_threshold {
        return false;
    }
    for &id in &members {
        pop.get_mut(id).unwrap().time_stamp = clock;
    }

    let p1 = roulette(pop, &members, rng);
    let p2 = roulette(pop, &members, rng);
    let parent1 = pop.get(p1).unwrap().clone();
    let parent2 = pop.get(p2).unwrap().clone();

    let (mut c1, mut c2) = (*parent1.condition(), *parent2.condition());
    if rng.gen_bool(params.crossover_prob) {
        (c1, c2) = ga_crossover(&c1, &c2, rng).expect("parents share a width");
    }
    c1 = ga_mutate(&c1, s, params.mutation_prob, rng);
    c2 = ga_mutate(&c2, s, params.mutation_prob, rng);

    let mut template = parent1.clone();
    template.prediction = mean(&parent1.prediction, &parent2.prediction);
    template.heuristics = parent1
        .heuristics
        .iter()
        .zip(&parent2.heuristics)
        .map(|(a, b)| mean(a, b))
        .collect();
    template.error = (parent1.error + parent2.error) / 2.0;
    template.fitness = 0.1 * (parent1.fitness + parent2.fitness) / 2.0;
    template.numerosity = 1;
    template.experience = 0;
    template.time_stamp = clock;
    template.action_set_size = (parent1.action_set_size + parent2.action_set_size) / 2.0;

    for condition in [c1, c2] {
        let child = template.clone().with_condition(condition);
        let absorbed = [p1, p2].iter().any(|&pid| match pop.get_mut(pid) {
            Some(parent) => try_subsume(parent, &child, params),
            None => false,
        });
        if !absorbed {
            pop.insert(child);
        }
    }
    delete_from_population(pop, params, rng);
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cond(s: &str) -> Condition {
        s.parse().unwrap()
    }

    #[test]
    fn crossover_identity_and_full_swap() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = cond("1#0#1");
        assert_eq!(ga_crossover(&a, &a, &mut rng).unwrap(), (a, a));
        let b = cond("0110#");
        assert_eq!(crossover_at(&a, &b, 0, 5).unwrap(), (b, a));
        assert_eq!(crossover_at(&a, &b, 2, 2).unwrap(), (a, b));
        assert!(crossover_at(&a, &cond("01"), 0, 1).is_err());
    }

    #[test]
    fn mutation_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s: Situation = "10110".parse().unwrap();
        let c = cond("1#1#0");
        assert_eq!(ga_mutate(&c, &s, 0.0, &mut rng), c);
        assert_eq!(ga_mutate(&c, &s, 1.0, &mut rng).to_string(), "#0#1#");
    }

    #[test]
    fn mutation_rate_per_position() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s: Situation = "101100110101".parse().unwrap();
        let c = cond("1#1#00##0#0#");
        let samples = 10_000;
        let mut flips = vec![0usize; 12];
        for _ in 0..samples {
            let m = ga_mutate(&c, &s, 0.03, &mut rng);
            for (i, f) in flips.iter_mut().enumerate() {
                if m.symbol(i) != c.symbol(i) {
                    *f += 1;
                }
            }
        }
        let rate = flips.iter().sum::<usize>() as f64 / (samples * 12) as f64;
        assert!((rate - 0.03).abs() < 0.005, "rate {rate}");
        for f in flips {
            // Per position: sd = sqrt(0.03 * 0.97 / 1e4) ~ 0.0017.
            assert!((f as f64 / samples as f64 - 0.03).abs() < 0.007);
        }
    }

    fn classifier(c: &str, exp: u64, error: f64) -> Classifier {
        let mut cl = Classifier::new(cond(c), 0, 2, 1, 0.00001, 0);
        cl.experience = exp;
        cl.error = error;
        cl
    }

    #[test]
    fn subsumption_rules() {
        let params = EngineParams::default();
        let mut inexperienced = classifier("####", 20, 0.0);
        assert!(!try_subsume(&mut inexperienced, &classifier("1#0#", 0, 0.0), &params));
        let mut equal = classifier("1#0#", 50, 0.0);
        assert!(!try_subsume(&mut equal, &classifier("1#0#", 0, 0.0), &params));
        let mut general = classifier("####", 21, 0.001);
        assert!(try_subsume(&mut general, &classifier("1#0#", 0, 3.0), &params));
        assert_eq!(general.numerosity, 2);
        let mut inaccurate = classifier("####", 50, 0.5);
        assert!(!try_subsume(&mut inaccurate, &classifier("1#0#", 0, 0.0), &params));
    }

    #[test]
    fn ga_gate_respects_threshold() {
        let params = EngineParams::default();
        let mut pop = Population::new(500);
        let id = pop.insert(classifier("1#", 0, 0.0));
        pop.clock = 35;
        let aset = ActionSet::new(0, vec![id]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(!run_ga(&mut pop, &aset, &"10".parse().unwrap(), &params, &mut rng));
        assert_eq!(pop.numerosity(), 1);
        pop.clock = 36;
        assert!(run_ga(&mut pop, &aset, &"10".parse().unwrap(), &params, &mut rng));
        assert_eq!(pop.get(id).unwrap().time_stamp, 36);
    }

    #[test]
    fn identical_parents_without_mutation_merge() {
        let params = EngineParams { mutation_prob: 0.0, ..Default::default() };
        let mut pop = Population::new(500);
        let mut parent = classifier("1#0#", 0, 0.5);
        parent.fitness = 0.4;
        let id = pop.insert(parent);
        pop.clock = 100;
        let aset = ActionSet::new(0, vec![id]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(run_ga(&mut pop, &aset, &"1101".parse().unwrap(), &params, &mut rng));
        assert_eq!(pop.len(), 1);
        assert_eq!(pop.get(id).unwrap().numerosity, 3);
    }

    #[test]
    fn offspring_initialisation() {
        // Crossover of these parents can yield conditions neither parent has;
        // those offspring must carry the averaged parameters.
        let params = EngineParams { mutation_prob: 0.0, crossover_prob: 1.0, ..Default::default() };
        let mut fresh = 0;
        for seed in 0..20 {
            let mut pop = Population::new(500);
            let mut a = classifier("1###", 3, 0.2);
            a.prediction = vec![2.0, 4.0];
            a.fitness = 0.6;
            a.experience = 5;
            let mut b = classifier("##1#", 3, 0.4);
            b.prediction = vec![6.0, 0.0];
            b.fitness = 0.6;
            b.experience = 5;
            let ia = pop.insert(a);
            let ib = pop.insert(b);
            pop.clock = 100;
            let aset = ActionSet::new(3, vec![ia, ib]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assert!(run_ga(&mut pop, &aset, &"1111".parse().unwrap(), &params, &mut rng));
            for (_, c) in pop.iter().filter(|(_, c)| c.experience == 0) {
                fresh += 1;
                assert_eq!(c.prediction, vec![4.0, 2.0]);
                assert!((c.error - 0.3).abs() < 1e-12);
                assert!((c.fitness - 0.06).abs() < 1e-12);
                assert_eq!(c.time_stamp, 100);
            }
        }
        assert!(fresh > 0);
    }

    #[test]
    fn offspring_always_match_situation() {
        let params = EngineParams { ga_threshold: 0.0, mutation_prob: 0.2, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut pop = Population::new(500);
        for trial in 0..1_000u64 {
            let s = Situation::new(rng.gen_range(0..4096), 12).unwrap();
            let ids: Vec<ClassifierId> = (0..3)
                .map(|_| {
                    let mut c = Classifier::new(Condition::cover(&s, 0.5, &mut rng), 0, 2, 1, 0.00001, 0);
                    c.fitness = rng.gen_range(0.01..1.0);
                    pop.insert(c)
                })
                .collect();
            pop.clock = trial + 1;
            let before: Vec<ClassifierId> = pop.ids();
            assert!(run_ga(&mut pop, &ActionSet::new(0, ids), &s, &params, &mut rng));
            for (id, c) in pop.iter() {
                if !before.contains(&id) {
                    assert!(c.matches(&s), "offspring {} vs {}", c.condition(), s);
                }
            }
            assert!(pop.numerosity() <= 500);
        }
    }

    proptest! {
        #[test]
        fn crossover_conserves_symbols(a in "[01#]{10}", b in "[01#]{10}", seed in any::<u64>()) {
            let (ca, cb) = (cond(&a), cond(&b));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, y) = ga_crossover(&ca, &cb, &mut rng).unwrap();
            for i in 0..10 {
                let mut before = [ca.symbol(i), cb.symbol(i)];
                let mut after = [x.symbol(i), y.symbol(i)];
                before.sort();
                after.sort();
                prop_assert_eq!(before, after);
            }
        }
    }
}
