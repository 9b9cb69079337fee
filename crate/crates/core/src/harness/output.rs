//! Result files: matches.csv, curves.csv, summary.json and snapshots.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate, CurvePoint};
use super::config::ExperimentConfig;
use super::session::{MatchRecord, SessionResult};
use crate::classifier::Census;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub agent_wins: u64,
    pub opponent_wins: u64,
    pub draws: u64,
    pub steps: u64,
    pub net_wins: i64,
}

impl Totals {
    pub fn of(records: &[MatchRecord]) -> Self {
        records.iter().fold(Totals::default(), |t, r| Totals {
            agent_wins: t.agent_wins + r.agent_wins as u64,
            opponent_wins: t.opponent_wins + r.opponent_wins as u64,
            draws: t.draws + r.draws as u64,
            steps: t.steps + r.steps,
            net_wins: t.net_wins + r.net_wins,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub totals: Totals,
    /// Net wins summed over each session's matches.
    pub session_net_wins: Vec<i64>,
    pub final_mean_accumulated: f64,
    /// Final census of each session's classifier-system agent.
    pub census: Vec<Census>,
    pub mean_macroclassifiers: Option<f64>,
    pub wall_clock_seconds: f64,
}

impl Summary {
    pub fn new(config: &ExperimentConfig, results: &[SessionResult], curves: &[CurvePoint], seconds: f64) -> Self {
        let records: Vec<MatchRecord> = results.iter().flat_map(|r| r.records.iter().copied()).collect();
        let census: Vec<Census> = results.iter().filter_map(|r| r.census).collect();
        let mean_macroclassifiers = (!census.is_empty())
            .then(|| census.iter().map(|c| c.macroclassifiers as f64).sum::<f64>() / census.len() as f64);
        Summary {
            config: config.clone(),
            totals: Totals::of(&records),
            session_net_wins: results.iter().map(SessionResult::total_net_wins).collect(),
            final_mean_accumulated: curves.last().map_or(0.0, |c| c.mean_accumulated),
            census,
            mean_macroclassifiers,
            wall_clock_seconds: seconds,
        }
    }
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_error(path))?;
    w.write_record(header).map_err(csv_error(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_error(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub const MATCH_COLUMNS: [&str; 7] =
    ["session", "match", "agent_wins", "opponent_wins", "draws", "steps", "net_wins"];
pub const CURVE_COLUMNS: [&str; 4] = ["match", "mean_net_wins", "std_net_wins", "mean_accumulated"];

pub fn write_matches_csv(path: &Path, records: &[MatchRecord]) -> Result<()> {
    write_csv(path, records, &MATCH_COLUMNS)
}

pub fn write_curves_csv(path: &Path, curves: &[CurvePoint]) -> Result<()> {
    write_csv(path, curves, &CURVE_COLUMNS)
}

pub fn read_matches_csv(path: &Path) -> Result<Vec<MatchRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error(path))?;
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_error(path))
}

/// Files written by [`emit_results`].
#[derive(Clone, Debug, PartialEq)]
pub struct OutputPaths {
    pub matches: PathBuf,
    pub curves: PathBuf,
    pub summary: PathBuf,
    pub snapshots: Vec<PathBuf>,
}

/// Writes every result file into `dir`, creating it if needed and
/// overwriting earlier results.
pub fn emit_results(dir: &Path, results: &[SessionResult], summary: &Summary) -> Result<OutputPaths> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let records: Vec<MatchRecord> = results.iter().flat_map(|r| r.records.iter().copied()).collect();
    let per_session: Vec<Vec<MatchRecord>> = results.iter().map(|r| r.records.clone()).collect();
    let curves = aggregate(&per_session)?;

    let paths = OutputPaths {
        matches: dir.join("matches.csv"),
        curves: dir.join("curves.csv"),
        summary: dir.join("summary.json"),
        snapshots: Vec::new(),
    };
    write_matches_csv(&paths.matches, &records)?;
    write_curves_csv(&paths.curves, &curves)?;
    let json = serde_json::to_string_pretty(summary)
        .map_err(|source| Error::Json { path: paths.summary.clone(), source })?;
    fs::write(&paths.summary, json + "\n").map_err(|e| Error::io(&paths.summary, e))?;

    let mut paths = paths;
    for r in results {
        for (who, text) in [("agent", &r.agent_snapshot), ("opponent", &r.opponent_snapshot)] {
            if let Some(text) = text {
                let p = dir.join(format!("{who}_session{}.txt", r.session));
                fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
                paths.snapshots.push(p);
            }
        }
        if let Some(bytes) = &r.agent_model {
            let p = dir.join(format!("agent_session{}_model.bin", r.session));
            fs::write(&p, bytes).map_err(|e| Error::io(&p, e))?;
            paths.snapshots.push(p);
        }
    }
    Ok(paths)
}
