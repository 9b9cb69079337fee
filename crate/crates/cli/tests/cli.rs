use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hamxcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamxcs")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, agent: &str) -> PathBuf {
    let path = dir.join(format!("{agent}.json"));
    let text = format!(
        r#"{{ "environment": "thief_hunter", "agent": "{agent}", "opponent": "minimax_q",
             "sessions": 2, "matches": 6, "games": 4, "seed": 5 }}"#
    );
    fs::write(&path, text).unwrap();
    path
}

fn run(dir: &Path, agent: &str, seed: &str) -> PathBuf {
    let cfg = write_config(dir, agent);
    let out = dir.join(format!("{agent}-{seed}"));
    let o = hamxcs(&["run", "--config", cfg.to_str().unwrap(), "--seed", seed, "--out", out.to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("2 sessions x 6 matches"), "{text}");
    out
}

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "hamxcs_p", "1");
    let matches = fs::read_to_string(out.join("matches.csv")).unwrap();
    let mut lines = matches.lines();
    assert_eq!(lines.next(), Some("session,match,agent_wins,opponent_wins,draws,steps,net_wins"));
    assert_eq!(lines.count(), 12);
    let curves = fs::read_to_string(out.join("curves.csv")).unwrap();
    assert_eq!(curves.lines().next(), Some("match,mean_net_wins,std_net_wins,mean_accumulated"));
    assert_eq!(curves.lines().count(), 7);
    let summary = fs::read_to_string(out.join("summary.json")).unwrap();
    for key in ["totals", "census", "wall_clock_seconds"] {
        assert!(summary.contains(key), "summary lacks {key}");
    }
    assert!(out.join("agent_session0.txt").exists());
    assert!(out.join("opponent_session1.txt").exists());
    let model = fs::read(out.join("agent_session1_model.bin")).unwrap();
    // Three little-endian u64 dimensions: 12 inputs, 100 hidden, 5 outputs.
    let dims: Vec<u64> = model[..24].chunks(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
    assert_eq!(dims, vec![12, 100, 5]);
    assert_eq!(model.len(), 24 + 8 * (12 * 100 + 100 + 100 * 5 + 5));
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(dir.path(), "xcs", "3");
    let b_dir = dir.path().join("again");
    fs::create_dir(&b_dir).unwrap();
    let b = run(&b_dir, "xcs", "3");
    assert_eq!(fs::read(a.join("matches.csv")).unwrap(), fs::read(b.join("matches.csv")).unwrap());
}

#[test]
fn ttest_compares_session_totals() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("a.csv"),
        "session,match,agent_wins,opponent_wins,draws,steps,net_wins\n\
         0,0,1,0,0,5,1\n0,1,2,0,0,5,2\n1,0,3,0,0,5,3\n1,1,0,0,0,5,0\n2,0,4,0,0,5,4\n2,1,1,0,0,5,1\n\
         3,0,2,0,0,5,2\n3,1,2,0,0,5,2\n4,0,5,0,0,5,5\n4,1,0,0,0,5,0\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("b.csv"),
        "session,match,agent_wins,opponent_wins,draws,steps,net_wins\n\
         0,0,2,0,0,5,2\n1,0,3,0,0,5,3\n2,0,4,0,0,5,4\n3,0,5,0,0,5,5\n4,0,6,0,0,5,6\n",
    )
    .unwrap();
    // Session totals are 3,3,5,4,5 and 2,3,4,5,6.
    let (xa, xb) = ([3.0, 3.0, 5.0, 4.0, 5.0], [2.0, 3.0, 4.0, 5.0, 6.0]);
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let var = |x: &[f64]| {
        let m = mean(x);
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
    };
    let t = (mean(&xa) - mean(&xb)) / (var(&xa) / 5.0 + var(&xb) / 5.0).sqrt();

    let o = hamxcs(&[
        "ttest",
        "--a",
        dir.path().join("a.csv").to_str().unwrap(),
        "--b",
        dir.path().join("b.csv").to_str().unwrap(),
        "--column",
        "net_wins",
    ]);
    let text = stdout(&o);
    assert!(text.contains("n_a=5 mean_a=4.0000 n_b=5 mean_b=4.0000"), "{text}");
    assert!(text.contains(&format!("t={t:.6}")), "{text}");
    assert!(text.contains("p=1.000000"), "{text}");
}

#[test]
fn dump_population_reads_a_run_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "hamxcs_p", "2");
    let snap = out.join("agent_session0.txt");
    let rows = fs::read_to_string(&snap).unwrap().lines().filter(|l| !l.trim().is_empty()).count();
    let o = hamxcs(&["dump-population", "--snapshot", snap.to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.starts_with("condition"));
    assert!(text.contains(&format!("macroclassifiers {rows} ")), "{text}");
}

#[test]
fn bad_inputs_fail_cleanly() {
    let o = hamxcs(&["run", "--config", "/nonexistent/config.json"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("nonexistent"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{ "agent": "hamxcs_p", "colour": "blue" }"#).unwrap();
    let o = hamxcs(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());

    let o = hamxcs(&["ttest", "--a", "x.csv", "--b", "y.csv", "--column", "nope"]);
    assert!(!o.status.success());
}
