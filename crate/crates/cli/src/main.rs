use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use hamxcs::harness::output::{read_matches_csv, Summary};
use hamxcs::harness::{aggregate, emit_results, run_sessions, welch_t_test, ExperimentConfig, MatchRecord, Profile};
use hamxcs::xcs::agent::parse_snapshot;

#[derive(Parser)]
#[command(name = "hamxcs", version, about = "Classifier-system experiments on zero-sum grid games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write matches.csv, curves.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        sessions: Option<usize>,
        #[arg(long)]
        matches: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// desk (5 x 500) or paper (50 x 3000); explicit counts win.
        #[arg(long)]
        profile: Option<String>,
    },
    /// Welch t-test between two matches.csv files.
    Ttest {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "net_wins")]
        column: String,
        /// Compare individual rows instead of per-session totals.
        #[arg(long)]
        per_match: bool,
    },
    /// Print a population snapshot as a table with a census line.
    DumpPopulation {
        #[arg(long)]
        snapshot: PathBuf,
    },
}

/// Writes to stdout; a reader that hangs up early (`| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn column(r: &MatchRecord, name: &str) -> Result<f64> {
    Ok(match name {
        "agent_wins" => r.agent_wins as f64,
        "opponent_wins" => r.opponent_wins as f64,
        "draws" => r.draws as f64,
        "steps" => r.steps as f64,
        "net_wins" => r.net_wins as f64,
        other => bail!("unknown column {other:?}"),
    })
}

fn sample(path: &Path, name: &str, per_match: bool) -> Result<Vec<f64>> {
    let records = read_matches_csv(path)?;
    if per_match {
        return records.iter().map(|r| column(r, name)).collect();
    }
    let mut totals: BTreeMap<usize, f64> = BTreeMap::new();
    for r in &records {
        *totals.entry(r.session).or_default() += column(r, name)?;
    }
    Ok(totals.into_values().collect())
}

fn run(
    config: &Path,
    sessions: Option<usize>,
    matches: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    profile: Option<String>,
) -> Result<()> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(p) = profile {
        cfg.apply_profile(p.parse::<Profile>()?);
    }
    if let Some(s) = sessions {
        cfg.sessions = s;
    }
    if let Some(m) = matches {
        cfg.matches = m;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.out = o;
    }
    cfg.validate()?;

    let start = Instant::now();
    let results = run_sessions(&cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    let curves = aggregate(&results.iter().map(|r| r.records.clone()).collect::<Vec<_>>())?;
    let summary = Summary::new(&cfg, &results, &curves, seconds);
    let paths = emit_results(&cfg.out, &results, &summary)
        .with_context(|| format!("writing results to {}", cfg.out.display()))?;

    let mut out = String::new();
    writeln!(
        out,
        "{} vs {}: {} sessions x {} matches in {:.1}s",
        cfg.agent, cfg.opponent, cfg.sessions, cfg.matches, seconds
    )?;
    let t = summary.totals;
    writeln!(
        out,
        "wins {} / losses {} / draws {}; mean accumulated net wins {:.2}",
        t.agent_wins, t.opponent_wins, t.draws, summary.final_mean_accumulated
    )?;
    if let Some(m) = summary.mean_macroclassifiers {
        writeln!(out, "mean final macroclassifiers {m:.1}")?;
    }
    writeln!(out, "wrote {}", paths.matches.parent().unwrap_or(Path::new(".")).display())?;
    emit(&out)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, sessions, matches, seed, out, profile } => {
            run(&config, sessions, matches, seed, out, profile)
        }
        Command::Ttest { a, b, column, per_match } => {
            let xa = sample(&a, &column, per_match)?;
            let xb = sample(&b, &column, per_match)?;
            let r = welch_t_test(&xa, &xb)?;
            let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
            emit(&format!(
                "n_a={} mean_a={:.4} n_b={} mean_b={:.4}\nt={:.6} df={:.4} p={:.6}\n",
                xa.len(),
                mean(&xa),
                xb.len(),
                mean(&xb),
                r.t,
                r.df,
                r.p
            ))
        }
        Command::DumpPopulation { snapshot } => {
            let text = std::fs::read_to_string(&snapshot)
                .with_context(|| format!("reading {}", snapshot.display()))?;
            let rows = parse_snapshot(&text)?;
            let mut out = String::new();
            writeln!(out, "{:<16} {:<12} {:>8} {:>6} {:>5} {:>6}  prediction", "condition", "action", "error", "F", "num", "exp")?;
            for r in &rows {
                let p: Vec<String> = r.prediction.iter().map(|x| format!("{x:.2}")).collect();
                writeln!(
                    out,
                    "{:<16} {:<12} {:>8.2} {:>6.2} {:>5} {:>6}  [{}]",
                    r.condition,
                    r.action,
                    r.error,
                    r.fitness,
                    r.numerosity,
                    r.experience,
                    p.join(", ")
                )?;
            }
            let micro: u64 = rows.iter().map(|r| r.numerosity as u64).sum();
            let used = rows.iter().filter(|r| r.experience > 0).count();
            writeln!(out, "macroclassifiers {} microclassifiers {} used {}", rows.len(), micro, used)?;
            emit(&out)
        }
    }
}
