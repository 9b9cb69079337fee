use hamxcs::harness::config::Environment;
use hamxcs::harness::session::{run_sessions_sequential, SessionResult};
use hamxcs::harness::{aggregate, emit_results, read_matches_csv, run_session, run_sessions, ExperimentConfig, Summary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(agent: &str, opponent: &str, sessions: usize, matches: usize) -> ExperimentConfig {
    ExperimentConfig {
        agent: agent.parse().unwrap(),
        opponent: opponent.parse().unwrap(),
        sessions,
        matches,
        seed: 77,
        ..Default::default()
    }
}

/// Straight re-implementation of one thief-and-hunter game with a uniformly
/// random thief and a hunter that never moves. Returns +1 for a goal, -1 for
/// a catch and 0 for a draw.
fn oracle_game(rng: &mut ChaCha8Rng) -> i32 {
    let blocked = |r: i64, c: i64| !(0..7).contains(&r) || !(0..7).contains(&c) || (c == 3 && r != 3);
    let hunter = (3, 6);
    let (mut r, mut c) = (3i64, 0i64);
    for _ in 0..50 {
        let (dr, dc) = [(-1, 0), (1, 0), (0, -1), (0, 1), (0, 0)][rng.gen_range(0..5)];
        if !blocked(r + dr, c + dc) {
            r += dr;
            c += dc;
        }
        if (r, c) == hunter {
            return -1;
        }
        if c == 6 && (r == 1 || r == 5) {
            return 1;
        }
    }
    0
}

#[test]
fn random_thief_outcome_rates_match_monte_carlo_oracle() {
    let cfg = config("random", "standby", 1, 2_000);
    let result = run_session(&cfg, 0).unwrap();
    let games = (cfg.matches * cfg.games) as f64;
    let wins: u64 = result.records.iter().map(|r| r.agent_wins as u64).sum();
    let losses: u64 = result.records.iter().map(|r| r.opponent_wins as u64).sum();

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut ow, mut ol) = (0u64, 0u64);
    let n = 40_000;
    for _ in 0..n {
        match oracle_game(&mut rng) {
            1 => ow += 1,
            -1 => ol += 1,
            _ => {}
        }
    }
    let (hw, hl) = (wins as f64 / games, losses as f64 / games);
    let (mw, ml) = (ow as f64 / n as f64, ol as f64 / n as f64);
    assert!((hw - mw).abs() < 0.02, "win rate {hw} vs oracle {mw}");
    assert!((hl - ml).abs() < 0.02, "loss rate {hl} vs oracle {ml}");
}

#[test]
fn records_are_consistent() {
    let cfg = config("hamxcs_p", "minimax_q", 2, 15);
    for s in run_sessions(&cfg).unwrap() {
        assert_eq!(s.records.len(), 15);
        for (m, r) in s.records.iter().enumerate() {
            assert_eq!(r.match_index, m);
            assert_eq!(r.agent_wins + r.opponent_wins + r.draws, cfg.games as u32);
            assert_eq!(r.net_wins, r.agent_wins as i64 - r.opponent_wins as i64);
            assert!(r.steps as usize <= cfg.games * cfg.step_limit);
            assert!(r.steps as usize >= cfg.games);
        }
    }
}

fn records(results: &[SessionResult]) -> Vec<Vec<hamxcs::harness::MatchRecord>> {
    results.iter().map(|r| r.records.clone()).collect()
}

#[test]
fn parallel_and_sequential_runs_agree() {
    for (agent, opponent) in [("hamxcs_p", "minimax_q"), ("xcs", "hammq"), ("minimax_sarsa_lambda", "random")] {
        let cfg = config(agent, opponent, 3, 12);
        let a = run_sessions(&cfg).unwrap();
        let b = run_sessions_sequential(&cfg).unwrap();
        assert_eq!(records(&a), records(&b), "{agent} vs {opponent}");
        assert_eq!(
            a.iter().map(|r| r.agent_snapshot.clone()).collect::<Vec<_>>(),
            b.iter().map(|r| r.agent_snapshot.clone()).collect::<Vec<_>>()
        );
    }
}

#[test]
fn different_seeds_give_different_runs() {
    let mut cfg = config("hamxcs_p", "random", 1, 20);
    let a = run_sessions(&cfg).unwrap();
    cfg.seed += 1;
    let b = run_sessions(&cfg).unwrap();
    assert_ne!(records(&a), records(&b));
}

#[test]
fn hexcer_sessions_run_and_round_trip_through_csv() {
    let mut cfg = config("hamxcs_p", "minimax_q", 2, 8);
    cfg.environment = Environment::Hexcer;
    let results = run_sessions(&cfg).unwrap();
    let curves = aggregate(&records(&results)).unwrap();
    assert_eq!(curves.len(), 8);
    let summary = Summary::new(&cfg, &results, &curves, 0.0);
    let dir = tempfile::tempdir().unwrap();
    let paths = emit_results(dir.path(), &results, &summary).unwrap();
    let back = read_matches_csv(&paths.matches).unwrap();
    let flat: Vec<_> = records(&results).into_iter().flatten().collect();
    assert_eq!(back, flat);
    let census = results[0].census.as_ref().unwrap();
    assert!(census.macroclassifiers > 0 && census.microclassifiers <= 500);
}
