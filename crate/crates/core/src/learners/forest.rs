//! Random forests: bootstrap bagging (the randomForest analog) or
//! without-replacement subsampling (the ranger analog) of Gini trees with
//! `mtry` candidate features per split.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use super::tree::{grow, Bins, Criterion, GrowParams, Targets, Tree};
use crate::exec;
use crate::math;
use crate::matrix::Dataset;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub mtry: usize,
    pub sample_fraction: f64,
    pub replace: bool,
    pub min_leaf: usize,
    pub max_depth: usize,
    pub seed: u64,
}

/// Trees plus their summed raw impurity decreases.
pub(crate) fn fit(data: &Dataset, cfg: &ForestConfig) -> (Vec<Tree>, Vec<f64>) {
    let bins = Bins::new(&data.x);
    let n = data.n_rows();
    let p = data.x.cols();
    let target: Vec<f64> = data.y.iter().map(|&l| f64::from(l)).collect();
    let params = GrowParams {
        max_depth: cfg.max_depth,
        min_leaf: cfg.min_leaf.max(1) as f64,
        min_gain: 0.0,
        mtry: cfg.mtry.clamp(1, p.max(1)),
        criterion: Criterion::Gini,
    };
    let draws = (math::round(n as f64 * cfg.sample_fraction) as usize).clamp(1, n.max(1));

    let fitted = exec::map((0..cfg.n_trees).collect(), |t| {
        let mut stream = rng::stream(cfg.seed, &[rng::tag("tree"), t as u64]);
        let mut weight = vec![0.0; n];
        if cfg.replace {
            for _ in 0..draws {
                weight[stream.random_range(0..n)] += 1.0;
            }
        } else if draws >= n {
            weight.iter_mut().for_each(|w| *w = 1.0);
        } else {
            for i in index::sample(&mut stream, n, draws) {
                weight[i] = 1.0;
            }
        }
        let rows: Vec<usize> = (0..n).filter(|&i| weight[i] > 0.0).collect();
        let targets = Targets {
            weight: &weight,
            target: &target,
            hessian: &weight,
        };
        let mut importance = vec![0.0; p];
        let tree = grow(&bins, rows, &targets, &params, Some(&mut stream), &mut importance);
        (tree, importance)
    });

    let mut importance = vec![0.0; p];
    let mut trees = Vec::with_capacity(fitted.len());
    for (tree, imp) in fitted {
        for (a, b) in importance.iter_mut().zip(imp) {
            *a += b;
        }
        trees.push(tree);
    }
    (trees, importance)
}
