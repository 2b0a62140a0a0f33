//! Gradient-boosted trees on the logit scale with logistic loss.
//!
//! Each round fits a depth-limited regression tree to the residuals
//! `y - p` of a row subsample; leaves take the Newton step
//! `sum(y - p) / max(sum(p (1 - p)), 1e-12)` and the ensemble moves by
//! `learning_rate` times the tree.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::tree::{grow, Bins, Criterion, GrowParams, Targets, Tree};
use crate::math;
use crate::matrix::Dataset;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbtConfig {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub subsample: f64,
    pub min_leaf: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boosted {
    /// Initial score, `logit(mean(y))`.
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
}

impl Boosted {
    pub fn margin_row(&self, row: &[f64]) -> f64 {
        self.base_score + self.learning_rate * self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        math::sigmoid(self.margin_row(row))
    }
}

/// Mean logistic loss of margins `f` against labels.
pub fn log_loss(f: &[f64], y: &[u8]) -> f64 {
    let n = f.len() as f64;
    f.iter()
        .zip(y)
        .map(|(&m, &l)| {
            let p = math::sigmoid(m).clamp(1e-15, 1.0 - 1e-15);
            if l == 1 {
                -math::ln(p)
            } else {
                -math::ln(1.0 - p)
            }
        })
        .sum::<f64>()
        / n
}

/// Ensemble plus raw squared-error reductions per feature. When `trace` is
/// given, the training log-loss after every round is pushed onto it.
pub(crate) fn fit(data: &Dataset, cfg: &GbtConfig, mut trace: Option<&mut Vec<f64>>) -> (Boosted, Vec<f64>) {
    let n = data.n_rows();
    let p = data.x.cols();
    let mean_y = data.y.iter().map(|&l| f64::from(l)).sum::<f64>() / n.max(1) as f64;
    let base_score = math::logit(mean_y);
    let mut margin = vec![base_score; n];
    let mut importance = vec![0.0; p];
    let mut trees = Vec::with_capacity(cfg.n_rounds);
    if n == 0 {
        return (
            Boosted {
                base_score,
                learning_rate: cfg.learning_rate,
                trees,
            },
            importance,
        );
    }
    let bins = Bins::new(&data.x);
    let params = GrowParams {
        max_depth: cfg.max_depth,
        min_leaf: cfg.min_leaf.max(1) as f64,
        min_gain: 1e-15,
        mtry: p,
        criterion: Criterion::Newton,
    };
    let draws = (math::round(n as f64 * cfg.subsample) as usize).clamp(1, n);
    let weight = vec![1.0; n];
    let mut residual = vec![0.0; n];
    let mut hessian = vec![0.0; n];

    for round in 0..cfg.n_rounds {
        for i in 0..n {
            let prob = math::sigmoid(margin[i]);
            residual[i] = f64::from(data.y[i]) - prob;
            hessian[i] = prob * (1.0 - prob);
        }
        let rows: Vec<usize> = if draws >= n {
            (0..n).collect()
        } else {
            let mut stream = rng::stream(cfg.seed, &[rng::tag("round"), round as u64]);
            let mut r = index::sample(&mut stream, n, draws).into_vec();
            r.sort_unstable();
            r
        };
        let targets = Targets {
            weight: &weight,
            target: &residual,
            hessian: &hessian,
        };
        let tree = grow(&bins, rows, &targets, &params, None, &mut importance);
        for i in 0..n {
            margin[i] += cfg.learning_rate * tree.predict_row(data.x.row(i));
        }
        trees.push(tree);
        if let Some(t) = trace.as_deref_mut() {
            t.push(log_loss(&margin, &data.y));
        }
    }
    (
        Boosted {
            base_score,
            learning_rate: cfg.learning_rate,
            trees,
        },
        importance,
    )
}

/// Training log-loss after each boosting round.
pub fn loss_trace(data: &Dataset, cfg: &GbtConfig) -> Vec<f64> {
    let mut trace = Vec::new();
    fit(data, cfg, Some(&mut trace));
    trace
}
