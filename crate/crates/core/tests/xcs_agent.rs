use std::collections::BTreeSet;

use hamxcs::agent::{Agent, HeuristicAgent, RandomAgent};
use hamxcs::env::hexcer::Hexcer;
use hamxcs::env::thief_hunter::ThiefHunter;
use hamxcs::env::{Game, Side};
use hamxcs::harness::session::play_game;
use hamxcs::opponent_model::{ModelParams, OpponentModel};
use hamxcs::rng::session_rng;
use hamxcs::xcs::agent::parse_snapshot;
use hamxcs::xcs::{HamxcsAgent, HamxcsConfig, SelectionMode};
use hamxcs::Population;
use proptest::prelude::*;

fn check_population(pop: &Population) {
    assert!(pop.numerosity() <= pop.capacity() as u64, "numerosity {}", pop.numerosity());
    let mut seen = BTreeSet::new();
    for (_, c) in pop.iter() {
        assert!(c.fitness > 0.0 && c.fitness <= 1.0, "fitness {}", c.fitness);
        assert!(c.numerosity >= 1);
        assert!(seen.insert((c.condition().to_string(), c.action())), "duplicate {} {}", c.condition(), c.action());
    }
}

fn new_agent(game: &dyn Game, config: HamxcsConfig, seed: u64) -> (HamxcsAgent, hamxcs::rng::SessionRng) {
    let mut rng = session_rng(seed, 0);
    let agent = HamxcsAgent::new(
        config,
        game.situation_width(),
        game.action_count(Side::Agent),
        game.action_count(Side::Opponent),
        &mut rng,
    )
    .unwrap();
    (agent, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn population_invariants_hold_between_games(
        seed in any::<u64>(),
        hexcer in any::<bool>(),
        pareto in any::<bool>(),
        traces in any::<bool>(),
    ) {
        let mut game: Box<dyn Game> = if hexcer { Box::new(Hexcer::default()) } else { Box::new(ThiefHunter::default()) };
        let config = HamxcsConfig {
            selection: if pareto { SelectionMode::Pareto } else { SelectionMode::Greedy },
            use_traces: traces,
            ..Default::default()
        };
        let (mut agent, mut rng) = new_agent(game.as_ref(), config, seed);
        let mut opponent: Box<dyn Agent> = if seed % 2 == 0 { Box::new(RandomAgent) } else { Box::new(HeuristicAgent) };
        for _ in 0..30 {
            play_game(game.as_mut(), &mut agent, opponent.as_mut(), &mut rng).unwrap();
            check_population(agent.population());
            prop_assert!(agent.traces().is_empty());
            prop_assert!(agent.traces().iter().all(|(_, e)| e >= 0.001));
        }
    }
}

#[test]
fn snapshot_lists_every_macroclassifier() {
    let mut game = ThiefHunter::default();
    let (mut agent, mut rng) = new_agent(&game, HamxcsConfig::default(), 3);
    let mut opponent = RandomAgent;
    for _ in 0..40 {
        play_game(&mut game, &mut agent, &mut opponent, &mut rng).unwrap();
    }
    let text = agent.snapshot(|a| game.action_label(Side::Agent, a));
    let rows = parse_snapshot(&text).unwrap();
    assert_eq!(rows.len(), agent.population().len());
    let micro: u64 = rows.iter().map(|r| r.numerosity as u64).sum();
    assert_eq!(micro, agent.population().numerosity());
    assert!(rows.windows(2).all(|w| w[0].numerosity >= w[1].numerosity));
}

#[test]
fn opponent_model_survives_a_file_round_trip() {
    let mut game = ThiefHunter::default();
    let (mut agent, mut rng) = new_agent(&game, HamxcsConfig::default(), 8);
    let mut opponent = HeuristicAgent;
    for _ in 0..10 {
        play_game(&mut game, &mut agent, &mut opponent, &mut rng).unwrap();
    }
    let model = agent.model().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.bin");
    model.save(&path).unwrap();
    let back = OpponentModel::load(&path, &ModelParams::default()).unwrap();
    game.reset(&mut rng);
    let s = game.situation(Side::Agent);
    assert_eq!(model.predict(&s).unwrap(), back.predict(&s).unwrap());
    assert_eq!(model.parameters(), back.parameters());
}
