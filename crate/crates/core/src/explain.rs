//! Partial dependence and importance ranking.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::TrainedModel;
use crate::matrix::Matrix;
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdpCurve {
    pub feature: String,
    pub grid: Vec<f64>,
    /// Mean model probability over the reference rows at each grid value.
    pub mean_score: Vec<f64>,
}

/// Grid for a feature column: `{0, 1}` for 0/1 columns, every distinct
/// value when there are at most `max_grid`, else the distinct quantiles at
/// 0.05, 0.10, ..., 0.95.
pub fn pdp_grid(values: &[f64], max_grid: usize) -> Vec<f64> {
    let mut distinct = stats::sorted_copy(values);
    distinct.dedup();
    if !distinct.is_empty() && distinct.iter().all(|&v| v == 0.0 || v == 1.0) {
        return alloc::vec![0.0, 1.0];
    }
    if distinct.len() <= max_grid {
        return distinct;
    }
    let sorted = stats::sorted_copy(values);
    let mut grid: Vec<f64> = (1..=19)
        .filter_map(|k| stats::quantile_sorted(&sorted, f64::from(k) * 0.05))
        .collect();
    grid.dedup();
    grid
}

/// Partial dependence of `model` on `feature` over the rows of
/// `reference`, whose columns follow the model's feature list.
pub fn pdp(model: &TrainedModel, reference: &Matrix, feature: &str, max_grid: usize) -> Result<PdpCurve> {
    let j = model
        .features
        .iter()
        .position(|f| f == feature)
        .ok_or_else(|| Error::UnknownFeature(feature.into()))?;
    if reference.cols() != model.features.len() {
        return Err(Error::FeatureCount {
            expected: model.features.len(),
            found: reference.cols(),
        });
    }
    let grid = pdp_grid(&reference.column(j), max_grid);
    let n = reference.rows();
    let mut row = alloc::vec![0.0; reference.cols()];
    let mean_score = grid
        .iter()
        .map(|&v| {
            let mut total = 0.0;
            for i in 0..n {
                row.copy_from_slice(reference.row(i));
                row[j] = v;
                total += model.score_row(&row).clamp(0.0, 1.0);
            }
            if n == 0 {
                0.0
            } else {
                total / n as f64
            }
        })
        .collect();
    Ok(PdpCurve {
        feature: feature.into(),
        grid,
        mean_score,
    })
}

/// The `k` most important features, ties in feature order.
pub fn top_features(model: &TrainedModel, k: usize) -> Vec<(String, f64)> {
    let mut ranked = model.importance();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    ranked.truncate(k);
    ranked
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(pdp_grid(&[1.0, 0.0, 1.0], 20), alloc::vec![0.0, 1.0]);
        assert_eq!(pdp_grid(&[3.0, 1.0, 2.0, 1.0], 20), alloc::vec![1.0, 2.0, 3.0]);
        let many: Vec<f64> = (1..=100).map(f64::from).collect();
        let g = pdp_grid(&many, 20);
        assert_eq!(g.len(), 19);
        assert!((g[0] - 5.95).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
