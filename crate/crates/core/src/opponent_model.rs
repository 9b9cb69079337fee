//! Feed-forward opponent policy model.
//!
//! One ReLU hidden layer and a softmax output over opponent actions, trained
//! by gradient descent on the negative log-likelihood of observed opponent
//! moves minus an entropy bonus.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::condition::Situation;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    pub hidden: usize,
    pub learning_rate: f64,
    pub entropy_weight: f64,
    /// Gradient steps taken per episode.
    pub passes: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { hidden: 100, learning_rate: 0.001, entropy_weight: 0.001, passes: 10 }
    }
}

/// Observed (situation, opponent action) pairs of one episode.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EpisodeBuffer {
    samples: Vec<(Situation, usize)>,
}

impl EpisodeBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, s: Situation, opponent_action: usize) {
        self.samples.push((s, opponent_action));
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[(Situation, usize)] {
        &self.samples
    }

    pub fn clear(&mut self) {
        self.samples.clear();
    }
}

pub fn record_step(buf: &mut EpisodeBuffer, s: Situation, opponent_action: usize) {
    buf.record(s, opponent_action);
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpponentModel {
    inputs: usize,
    hidden: usize,
    outputs: usize,
    /// Row-major `hidden x inputs`.
    w1: Vec<f64>,
    b1: Vec<f64>,
    /// Row-major `outputs x hidden`.
    w2: Vec<f64>,
    b2: Vec<f64>,
    learning_rate: f64,
    entropy_weight: f64,
    passes: usize,
}

/// Gradients in the same layout as the parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl Gradients {
    pub fn flatten(&self) -> Vec<f64> {
        [&self.w1[..], &self.b1, &self.w2, &self.b2].concat()
    }
}

struct Forward {
    pre: Vec<f64>,
    hidden: Vec<f64>,
    log_probs: Vec<f64>,
}

fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
    logits.iter().map(|z| z - lse).collect()
}

impl OpponentModel {
    /// Uniform fan-in scaled weights; hidden biases the same way, output
    /// biases zero.
    pub fn new<R: Rng + ?Sized>(inputs: usize, outputs: usize, params: &ModelParams, rng: &mut R) -> Self {
        let hidden = params.hidden;
        let r1 = 1.0 / (inputs as f64).sqrt();
        let r2 = 1.0 / (hidden as f64).sqrt();
        let w1 = (0..hidden * inputs).map(|_| rng.gen_range(-r1..r1)).collect();
        let b1 = (0..hidden).map(|_| rng.gen_range(-r1..r1)).collect();
        let w2 = (0..outputs * hidden).map(|_| rng.gen_range(-r2..r2)).collect();
        OpponentModel {
            inputs,
            hidden,
            outputs,
            w1,
            b1,
            w2,
            b2: vec![0.0; outputs],
            learning_rate: params.learning_rate,
            entropy_weight: params.entropy_weight,
            passes: params.passes,
        }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn set_entropy_weight(&mut self, eta: f64) {
        self.entropy_weight = eta;
    }

    pub fn set_learning_rate(&mut self, lr: f64) {
        self.learning_rate = lr;
    }

    /// Zeroes the output layer, which makes every prediction uniform.
    pub fn zero_output_layer(&mut self) {
        self.w2.iter_mut().for_each(|w| *w = 0.0);
        self.b2.iter_mut().for_each(|b| *b = 0.0);
    }

    fn forward(&self, s: &Situation) -> Forward {
        let mut pre = self.b1.clone();
        for (h, p) in pre.iter_mut().enumerate() {
            let row = &self.w1[h * self.inputs..(h + 1) * self.inputs];
            for (i, w) in row.iter().enumerate() {
                if s.bit(i) {
                    *p += w;
                }
            }
        }
        let hidden: Vec<f64> = pre.iter().map(|&v| v.max(0.0)).collect();
        let logits: Vec<f64> = (0..self.outputs)
            .map(|k| {
                let row = &self.w2[k * self.hidden..(k + 1) * self.hidden];
                self.b2[k] + row.iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>()
            })
            .collect();
        Forward { pre, hidden, log_probs: log_softmax(&logits) }
    }

    fn check_width(&self, s: &Situation) -> Result<()> {
        if s.width() != self.inputs {
            return Err(Error::WidthMismatch { expected: self.inputs, actual: s.width() });
        }
        Ok(())
    }

    /// Predicted distribution over opponent actions.
    pub fn predict(&self, s: &Situation) -> Result<Vec<f64>> {
        self.check_width(s)?;
        Ok(self.forward(s).log_probs.iter().map(|l| l.exp()).collect())
    }

    /// Mean over samples of `-(log p(o|s) + eta * H(p(.|s)))`.
    pub fn loss(&self, samples: &[(Situation, usize)]) -> f64 {
        let n = samples.len().max(1) as f64;
        samples
            .iter()
            .map(|(s, o)| {
                let lp = self.forward(s).log_probs;
                let entropy: f64 = -lp.iter().map(|l| l.exp() * l).sum::<f64>();
                -(lp[*o] + self.entropy_weight * entropy)
            })
            .sum::<f64>()
            / n
    }

    /// Analytic gradient of [`loss`](Self::loss).
    pub fn gradient(&self, samples: &[(Situation, usize)]) -> Gradients {
        let mut g = Gradients {
            w1: vec![0.0; self.w1.len()],
            b1: vec![0.0; self.b1.len()],
            w2: vec![0.0; self.w2.len()],
            b2: vec![0.0; self.b2.len()],
        };
        let n = samples.len().max(1) as f64;
        for (s, o) in samples {
            let f = self.forward(s);
            let probs: Vec<f64> = f.log_probs.iter().map(|l| l.exp()).collect();
            let entropy: f64 = -probs.iter().zip(&f.log_probs).map(|(p, l)| p * l).sum::<f64>();
            // dL/dz_k = p_k - y_k + eta * p_k * (log p_k + H)
            let dz: Vec<f64> = (0..self.outputs)
                .map(|k| {
                    let y = if k == *o { 1.0 } else { 0.0 };
                    (probs[k] - y + self.entropy_weight * probs[k] * (f.log_probs[k] + entropy)) / n
                })
                .collect();
            let mut dh = vec![0.0; self.hidden];
            for (k, &d) in dz.iter().enumerate() {
                g.b2[k] += d;
                let row = k * self.hidden;
                for h in 0..self.hidden {
                    g.w2[row + h] += d * f.hidden[h];
                    dh[h] += d * self.w2[row + h];
                }
            }
            for h in 0..self.hidden {
                if f.pre[h] <= 0.0 {
                    continue;
                }
                g.b1[h] += dh[h];
                let row = h * self.inputs;
                for i in 0..self.inputs {
                    if s.bit(i) {
                        g.w1[row + i] += dh[h];
                    }
                }
            }
        }
        g
    }

    fn apply(&mut self, g: &Gradients) {
        let lr = self.learning_rate;
        for (w, d) in self.w1.iter_mut().zip(&g.w1) {
            *w -= lr * d;
        }
        for (w, d) in self.b1.iter_mut().zip(&g.b1) {
            *w -= lr * d;
        }
        for (w, d) in self.w2.iter_mut().zip(&g.w2) {
            *w -= lr * d;
        }
        for (w, d) in self.b2.iter_mut().zip(&g.b2) {
            *w -= lr * d;
        }
    }

    /// Stochastic gradient descent over the buffered episode: each pass
    /// visits every sample once, in recorded order. Clears the buffer.
    pub fn train_episode(&mut self, buf: &mut EpisodeBuffer) {
        for _ in 0..self.passes {
            for sample in buf.samples() {
                let g = self.gradient(std::slice::from_ref(sample));
                self.apply(&g);
            }
        }
        buf.clear();
    }

    /// Full-batch gradient steps on `samples`.

    pub fn train_steps(&mut self, samples: &[(Situation, usize)], steps: usize) {
        if samples.is_empty() {
            return;
        }
        for _ in 0..steps {
            let g = self.gradient(samples);
            self.apply(&g);
        }
    }

    /// All parameters, flattened as w1, b1, w2, b2.
    pub fn parameters(&self) -> Vec<f64> {
        [&self.w1[..], &self.b1, &self.w2, &self.b2].concat()
    }

    pub fn set_parameters(&mut self, flat: &[f64]) -> Result<()> {
        let sizes = [self.w1.len(), self.b1.len(), self.w2.len(), self.b2.len()];
        if flat.len() != sizes.iter().sum::<usize>() {
            return Err(Error::WidthMismatch { expected: sizes.iter().sum(), actual: flat.len() });
        }
        let mut rest = flat;
        for (dst, n) in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2].into_iter().zip(sizes) {
            dst.copy_from_slice(&rest[..n]);
            rest = &rest[n..];
        }
        Ok(())
    }

    /// Weight snapshot: three little-endian `u64` widths (inputs, hidden,
    /// outputs) followed by w1, b1, w2, b2 as little-endian `f64`, row-major.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for d in [self.inputs, self.hidden, self.outputs] {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for v in self.parameters() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Restores a snapshot written by [`to_bytes`](Self::to_bytes); training
    /// hyperparameters come from `params`.
    pub fn from_bytes(bytes: &[u8], params: &ModelParams) -> Result<Self> {
        let word = |i: usize| -> Result<[u8; 8]> {
            bytes
                .get(i * 8..i * 8 + 8)
                .map(|b| b.try_into().unwrap())
                .ok_or_else(|| Error::Parse("truncated weight snapshot".into()))
        };
        let inputs = u64::from_le_bytes(word(0)?) as usize;
        let hidden = u64::from_le_bytes(word(1)?) as usize;
        let outputs = u64::from_le_bytes(word(2)?) as usize;
        let count = hidden * inputs + hidden + outputs * hidden + outputs;
        if bytes.len() != (3 + count) * 8 {
            return Err(Error::Parse(format!(
                "weight snapshot has {} bytes, expected {}",
                bytes.len(),
                (3 + count) * 8
            )));
        }
        let flat: Vec<f64> = (0..count).map(|i| word(3 + i).map(f64::from_le_bytes)).collect::<Result<_>>()?;
        let mut model = OpponentModel {
            inputs,
            hidden,
            outputs,
            w1: vec![0.0; hidden * inputs],
            b1: vec![0.0; hidden],
            w2: vec![0.0; outputs * hidden],
            b2: vec![0.0; outputs],
            learning_rate: params.learning_rate,
            entropy_weight: params.entropy_weight,
            passes: params.passes,
        };
        model.set_parameters(&flat)?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path, params: &ModelParams) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, params)
    }
}
