mod common;

use driveml_core::learners::logistic::LogisticObjective;
use driveml_core::Matrix;
use rand::Rng;

fn fixture(seed: u64, n: usize, p: usize) -> (Matrix, Vec<u8>) {
    let mut r = common::stream(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| r.random_range(-3.0..3.0)).collect())
        .collect();
    let y = (0..n).map(|_| u8::from(r.random::<bool>())).collect();
    (Matrix::from_rows(&rows).unwrap(), y)
}

#[test]
fn gradient_matches_central_differences() {
    let shapes = [(20, 1, 0.0), (50, 3, 0.0), (80, 5, 0.1), (120, 8, 0.01), (200, 4, 1.0)];
    for (f, &(n, p, lambda)) in shapes.iter().enumerate() {
        let (x, y) = fixture(f as u64, n, p);
        let (obj, _, _) = LogisticObjective::new(&x, &y, lambda);
        let mut r = common::stream(100 + f as u64);
        for _ in 0..10 {
            let params: Vec<f64> = (0..obj.dim()).map(|_| r.random_range(-2.0..2.0)).collect();
            let g = obj.gradient(&params);
            for k in 0..obj.dim() {
                // Five-point central stencil: O(h^4) truncation, so a wide h
                // keeps rounding in the loss from swamping small components.
                let h = 1e-3;
                let at = |d: f64| {
                    let mut v = params.clone();
                    v[k] += d;
                    obj.loss(&v)
                };
                let fd = (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
                let rel = (g[k] - fd).abs() / g[k].abs().max(fd.abs()).max(1e-8);
                assert!(
                    rel < 1e-5,
                    "fixture {f} coord {k}: analytic {} vs fd {fd} (rel {rel})",
                    g[k]
                );
            }
        }
    }
}
