mod common;

use driveml_core::learners::forest::ForestConfig;
use driveml_core::learners::gbt::{loss_trace, GbtConfig};
use driveml_core::learners::tree::TreeConfig;
use driveml_core::learners::{fit_forest, fit_gbt, fit_tree, Hyperparams, ModelParams, ParamValue};
use driveml_core::metrics::auc;
use driveml_core::tuning::default_space;
use driveml_core::{Dataset, Matrix, ModelId, ModelSpec, TrainedModel};

fn xor() -> Dataset {
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for _ in 0..10 {
        for (a, b) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            rows.push(vec![a, b]);
            y.push(u8::from(a != b));
        }
    }
    Dataset::new(vec!["a".into(), "b".into()], Matrix::from_rows(&rows).unwrap(), y).unwrap()
}

#[test]
fn tree_separates_xor() {
    let data = xor();
    let m = fit_tree(
        &data,
        &TreeConfig {
            max_depth: 2,
            min_leaf: 1,
            min_gain: 0.0,
        },
    )
    .unwrap();
    let s = m.score(&data.x).unwrap();
    for (p, &l) in s.iter().zip(&data.y) {
        assert_eq!(*p, f64::from(l));
    }
}

#[test]
fn single_full_sample_forest_is_a_tree() {
    let data = common::additive(300, 3, 7);
    let p = data.x.cols();
    let tree = fit_tree(
        &data,
        &TreeConfig {
            max_depth: 4,
            min_leaf: 5,
            min_gain: 0.0,
        },
    )
    .unwrap();
    let forest = fit_forest(
        &data,
        &ForestConfig {
            n_trees: 1,
            mtry: p,
            sample_fraction: 1.0,
            replace: false,
            min_leaf: 5,
            max_depth: 4,
            seed: 3,
        },
    )
    .unwrap();
    assert_eq!(tree.score(&data.x).unwrap(), forest.score(&data.x).unwrap());
}

#[test]
fn zero_rounds_predicts_the_base_rate() {
    let data = common::additive(200, 1, 8);
    let m = fit_gbt(
        &data,
        &GbtConfig {
            n_rounds: 0,
            learning_rate: 0.1,
            max_depth: 3,
            subsample: 1.0,
            min_leaf: 5,
            seed: 0,
        },
    )
    .unwrap();
    let rate = data.n_positive() as f64 / data.n_rows() as f64;
    for s in m.score(&data.x).unwrap() {
        assert!((s - rate).abs() < 1e-12);
    }
}

#[test]
fn boosting_loss_never_increases_without_subsampling() {
    let data = common::additive(400, 3, 9);
    let trace = loss_trace(
        &data,
        &GbtConfig {
            n_rounds: 60,
            learning_rate: 0.3,
            max_depth: 3,
            subsample: 1.0,
            min_leaf: 5,
            seed: 0,
        },
    );
    assert_eq!(trace.len(), 60);
    for w in trace.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
    }
}

fn middle_of_space(model: ModelId, p: usize) -> Hyperparams {
    let space = default_space(model, p);
    let mut r = common::stream(1);
    let mut hp = space.sample(&mut r);
    if let Some(v) = hp.get_mut("n_trees") {
        *v = ParamValue::Int(200);
    }
    hp
}

#[test]
fn every_learner_learns_the_additive_rule() {
    let train = common::additive(1500, 5, 10);
    let test = common::additive(500, 5, 11);
    for model in ModelId::ALL {
        let m = ModelSpec::new(model, middle_of_space(model, 7), 5).fit(&train).unwrap();
        let a = auc(&m.score(&test.x).unwrap(), &test.y).unwrap();
        let floor = if model == ModelId::Rpart { 0.85 } else { 0.93 };
        assert!(a >= floor, "{model}: {a}");
        let imp: f64 = m.importance.iter().sum();
        assert!((imp - 1.0).abs() < 1e-9, "{model} importance sums to {imp}");
    }
}

#[test]
fn serialized_models_score_identically() {
    let train = common::additive(300, 2, 12);
    for model in ModelId::ALL {
        let m = ModelSpec::new(model, middle_of_space(model, 4), 5).fit(&train).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: TrainedModel = serde_json::from_str(&json).unwrap();
        assert_eq!(m.score(&train.x).unwrap(), back.score(&train.x).unwrap(), "{model}");
        if let ModelParams::Forest { trees } = &back.params {
            assert!(!trees.is_empty());
        }
    }
}

#[test]
fn fits_are_reproducible_from_the_seed() {
    let train = common::additive(300, 2, 13);
    for model in [ModelId::RandomForest, ModelId::Ranger, ModelId::Xgboost] {
        let hp = middle_of_space(model, 4);
        let a = ModelSpec::new(model, hp.clone(), 9).fit(&train).unwrap();
        let b = ModelSpec::new(model, hp, 9).fit(&train).unwrap();
        assert_eq!(a.score(&train.x).unwrap(), b.score(&train.x).unwrap());
    }
}

#[test]
fn out_of_range_hyperparameters_are_rejected() {
    let train = common::additive(50, 0, 14);
    let hp = Hyperparams::from([("lambda".to_string(), ParamValue::Real(-1.0))]);
    assert!(ModelSpec::new(ModelId::Glmnet, hp, 0).fit(&train).is_err());
    assert!(ModelSpec::new(ModelId::Rpart, Hyperparams::new(), 0)
        .fit(&train)
        .is_err());
}
