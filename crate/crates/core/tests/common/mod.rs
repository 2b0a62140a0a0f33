#![allow(dead_code)]

use driveml_core::rng::{self, Stream};
use driveml_core::{Dataset, Matrix};
use rand::Rng;

pub fn stream(seed: u64) -> Stream {
    rng::stream(seed, &[rng::tag("test")])
}

/// `y = 1[x1 + x2 > 1]` with `noise` extra uniform columns.
pub fn additive(n: usize, noise: usize, seed: u64) -> Dataset {
    let mut r = stream(seed);
    let p = 2 + noise;
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..p).map(|_| r.random::<f64>()).collect();
        y.push(u8::from(row[0] + row[1] > 1.0));
        rows.push(row);
    }
    let mut names = vec!["x1".to_string(), "x2".to_string()];
    names.extend((0..noise).map(|k| format!("noise{}", k + 1)));
    Dataset::new(names, Matrix::from_rows(&rows).unwrap(), y).unwrap()
}

/// Scores on a coarse grid so ties are common, labels drawn independently.
pub fn tied_fixture(r: &mut Stream, n: usize) -> (Vec<f64>, Vec<u8>) {
    loop {
        let levels = r.random_range(1..=n.max(2));
        let scores: Vec<f64> = (0..n)
            .map(|_| r.random_range(0..levels) as f64 / levels as f64)
            .collect();
        let labels: Vec<u8> = (0..n).map(|_| u8::from(r.random::<bool>())).collect();
        if labels.contains(&0) && labels.contains(&1) {
            return (scores, labels);
        }
    }
}
