//! L2-penalised logistic regression fitted by gradient descent with a
//! Barzilai-Borwein trial step and Armijo backtracking.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticConfig {
    /// Weight of the `lambda / 2 * ||w||^2` penalty; the intercept is not
    /// penalised.
    pub lambda: f64,
    pub max_iter: usize,
    /// Stop once the gradient max-norm falls below this.
    pub tol: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            lambda: 0.0,
            max_iter: 1000,
            tol: 1e-6,
        }
    }
}

/// Fitted coefficients on the standardised scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub means: Vec<f64>,
    /// Training standard deviations; a zero marks an ignored feature.
    pub scales: Vec<f64>,
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl LogisticModel {
    pub fn decision(&self, row: &[f64]) -> f64 {
        let mut eta = self.intercept;
        for j in 0..self.weights.len() {
            if self.scales[j] > 0.0 {
                eta += self.weights[j] * (row[j] - self.means[j]) / self.scales[j];
            }
        }
        eta
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        math::sigmoid(self.decision(row))
    }
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + math::ln(1.0 + math::exp(-math::abs(x)))
}

/// Mean negative log-likelihood plus `lambda / 2 * ||w||^2` over
/// standardised features. Parameters are laid out as `[w_1 .. w_p, b]`.
pub struct LogisticObjective {
    z: Matrix,
    y: Vec<f64>,
    lambda: f64,
}

impl LogisticObjective {
    /// Standardises `x` with its own means and population standard
    /// deviations; constant columns are zeroed.
    pub fn new(x: &Matrix, y: &[u8], lambda: f64) -> (Self, Vec<f64>, Vec<f64>) {
        let (n, p) = (x.rows(), x.cols());
        let mut means = vec![0.0; p];
        let mut scales = vec![0.0; p];
        let mut z = Matrix::zeros(n, p);
        for j in 0..p {
            let col = x.column(j);
            let m = col.iter().sum::<f64>() / n.max(1) as f64;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n.max(1) as f64;
            let sd = math::sqrt(var);
            means[j] = m;
            if sd > 1e-12 * (1.0 + math::abs(m)) {
                scales[j] = sd;
                for i in 0..n {
                    z.set(i, j, (col[i] - m) / sd);
                }
            }
        }
        let obj = LogisticObjective {
            z,
            y: y.iter().map(|&l| f64::from(l)).collect(),
            lambda,
        };
        (obj, means, scales)
    }

    pub fn dim(&self) -> usize {
        self.z.cols() + 1
    }

    fn eta(&self, params: &[f64], i: usize) -> f64 {
        let p = self.z.cols();
        let row = self.z.row(i);
        let mut e = params[p];
        for j in 0..p {
            e += params[j] * row[j];
        }
        e
    }

    pub fn loss(&self, params: &[f64]) -> f64 {
        let n = self.z.rows() as f64;
        let p = self.z.cols();
        let nll: f64 = (0..self.z.rows())
            .map(|i| {
                let e = self.eta(params, i);
                softplus(e) - self.y[i] * e
            })
            .sum();
        let penalty: f64 = params[..p].iter().map(|w| w * w).sum();
        nll / n + 0.5 * self.lambda * penalty
    }

    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let n = self.z.rows() as f64;
        let p = self.z.cols();
        let mut g = vec![0.0; p + 1];
        for i in 0..self.z.rows() {
            let r = math::sigmoid(self.eta(params, i)) - self.y[i];
            let row = self.z.row(i);
            for j in 0..p {
                g[j] += r * row[j];
            }
            g[p] += r;
        }
        for j in 0..p {
            g[j] = g[j] / n + self.lambda * params[j];
        }
        g[p] /= n;
        g
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(math::abs(*x)))
}

pub(crate) fn fit(x: &Matrix, y: &[u8], cfg: &LogisticConfig) -> Result<LogisticModel> {
    if x.rows() == 0 {
        return Err(Error::Empty);
    }
    if !(cfg.lambda >= 0.0) {
        return Err(Error::InvalidHyperparameter {
            name: "lambda".into(),
            reason: format!("must be >= 0, got {}", cfg.lambda),
        });
    }
    let (obj, means, scales) = LogisticObjective::new(x, y, cfg.lambda);
    let p = x.cols();
    let mut params = vec![0.0; p + 1];
    let mean_y = y.iter().map(|&l| f64::from(l)).sum::<f64>() / y.len() as f64;
    params[p] = math::logit(mean_y);

    let mut f = obj.loss(&params);
    let mut g = obj.gradient(&params);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        if !f.is_finite() {
            return Err(Error::Fit(format!("non-finite loss at iteration {iterations}")));
        }
        if max_abs(&g) < cfg.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let gg = dot(&g, &g);
        let mut t = step;
        let mut candidate;
        let mut f_new;
        let mut halvings = 0;
        loop {
            candidate = params.iter().zip(&g).map(|(w, d)| w - t * d).collect::<Vec<_>>();
            f_new = obj.loss(&candidate);
            if f_new <= f - 1e-4 * t * gg || halvings >= 60 {
                break;
            }
            t *= 0.5;
            halvings += 1;
        }
        if !(f_new <= f) {
            // no descent possible at machine precision
            converged = true;
            break;
        }
        let g_new = obj.gradient(&candidate);
        let s: Vec<f64> = candidate.iter().zip(&params).map(|(a, b)| a - b).collect();
        let dy: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &dy);
        step = if sy > 0.0 {
            (dot(&s, &s) / sy).clamp(1e-10, 1e10)
        } else {
            (t * 2.0).min(1e10)
        };
        params = candidate;
        f = f_new;
        g = g_new;
    }
    if !f.is_finite() {
        return Err(Error::Fit(format!("non-finite loss at iteration {iterations}")));
    }
    let intercept = params[p];
    params.truncate(p);
    for j in 0..p {
        if scales[j] == 0.0 {
            params[j] = 0.0;
        }
    }
    Ok(LogisticModel {
        means,
        scales,
        weights: params,
        intercept,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_feature_is_ignored() {
        let x = Matrix::from_columns(&[vec![1.0, 1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0, 3.0]]).unwrap();
        let m = fit(
            &x,
            &[0, 0, 1, 1],
            &LogisticConfig {
                lambda: 0.1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(m.weights[0], 0.0);
        assert!(m.weights[1] > 0.0);
    }

    #[test]
    fn strong_penalty_gives_null_model() {
        let x = Matrix::from_columns(&[vec![0.3, -1.0, 2.0, 0.5, 1.1, -0.7]]).unwrap();
        let y = [1, 0, 0, 1, 0, 0];
        let m = fit(
            &x,
            &y,
            &LogisticConfig {
                lambda: 1e6,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.weights[0].abs() < 1e-6);
        assert!((m.intercept - math::logit(2.0 / 6.0)).abs() < 1e-6);
    }
}
