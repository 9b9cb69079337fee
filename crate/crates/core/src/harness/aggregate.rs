//! Per-match statistics across sessions.

use serde::{Deserialize, Serialize};

use super::session::MatchRecord;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    #[serde(rename = "match")]
    pub match_index: usize,
    pub mean_net_wins: f64,
    /// Sample standard deviation (n - 1 denominator); zero for one session.
    pub std_net_wins: f64,
    /// Mean over sessions of net wins accumulated up to this match.
    pub mean_accumulated: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Curves over match index. Every session must have the same match count.
pub fn aggregate(sessions: &[Vec<MatchRecord>]) -> Result<Vec<CurvePoint>> {
    let Some(first) = sessions.first() else { return Ok(Vec::new()) };
    let matches = first.len();
    if let Some(bad) = sessions.iter().position(|s| s.len() != matches) {
        return Err(Error::Ragged(format!(
            "session {bad} has {} matches, session 0 has {matches}",
            sessions[bad].len()
        )));
    }
    let mut accumulated = vec![0.0; sessions.len()];
    let mut curve = Vec::with_capacity(matches);
    for m in 0..matches {
        let net: Vec<f64> = sessions.iter().map(|s| s[m].net_wins as f64).collect();
        for (acc, x) in accumulated.iter_mut().zip(&net) {
            *acc += x;
        }
        let (mean, std) = mean_std(&net);
        curve.push(CurvePoint {
            match_index: m,
            mean_net_wins: mean,
            std_net_wins: std,
            mean_accumulated: accumulated.iter().sum::<f64>() / accumulated.len() as f64,
        });
    }
    Ok(curve)
}
