//! The six binary classifiers behind one fit/score interface.
//!
//! | id             | learner                                          |
//! |----------------|--------------------------------------------------|
//! | `glmnet`       | L2-penalised logistic regression                 |
//! | `logreg`       | unpenalised logistic regression                  |
//! | `randomForest` | bootstrap forest of Gini trees                   |
//! | `ranger`       | without-replacement subsampled forest            |
//! | `xgboost`      | gradient-boosted trees, logistic loss            |
//! | `rpart`        | single Gini tree                                 |

pub mod forest;
pub mod gbt;
pub mod logistic;
pub mod tree;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

pub use forest::ForestConfig;
pub use gbt::{Boosted, GbtConfig};
pub use logistic::{LogisticConfig, LogisticModel, LogisticObjective};
pub use tree::{Node, Tree, TreeConfig};

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::{Dataset, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelId {
    #[serde(rename = "glmnet")]
    Glmnet,
    #[serde(rename = "logreg")]
    Logreg,
    #[serde(rename = "randomForest")]
    RandomForest,
    #[serde(rename = "ranger")]
    Ranger,
    #[serde(rename = "xgboost")]
    Xgboost,
    #[serde(rename = "rpart")]
    Rpart,
}

impl ModelId {
    pub const ALL: [ModelId; 6] = [
        ModelId::Glmnet,
        ModelId::Logreg,
        ModelId::RandomForest,
        ModelId::Ranger,
        ModelId::Xgboost,
        ModelId::Rpart,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Glmnet => "glmnet",
            ModelId::Logreg => "logreg",
            ModelId::RandomForest => "randomForest",
            ModelId::Ranger => "ranger",
            ModelId::Xgboost => "xgboost",
            ModelId::Rpart => "rpart",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown model `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
}

impl ParamValue {
    pub fn as_f64(self) -> f64 {
        match self {
            ParamValue::Int(i) => i as f64,
            ParamValue::Real(r) => r,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Real(r) => write!(f, "{r:.6}"),
        }
    }
}

pub type Hyperparams = BTreeMap<String, ParamValue>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model_id: ModelId,
    pub hyperparams: Hyperparams,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Logistic(LogisticModel),
    Tree(Tree),
    Forest { trees: Vec<Tree> },
    Boosted(Boosted),
}

/// A fitted classifier. Scoring takes a matrix whose columns follow
/// `features`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub model_id: ModelId,
    pub features: Vec<String>,
    pub hyperparams: Hyperparams,
    pub seed: u64,
    pub fit_time_s: f64,
    /// Normalised to sum to 1, or all zero when the model uses no feature.
    pub importance: Vec<f64>,
    pub params: ModelParams,
}

fn normalise(raw: Vec<f64>) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        raw.into_iter().map(|v| v / total).collect()
    } else {
        raw.into_iter().map(|_| 0.0).collect()
    }
}

fn int(v: usize) -> ParamValue {
    ParamValue::Int(v as i64)
}

impl TrainedModel {
    fn new(
        model_id: ModelId,
        data: &Dataset,
        hyperparams: Hyperparams,
        seed: u64,
        raw_importance: Vec<f64>,
        params: ModelParams,
    ) -> Self {
        TrainedModel {
            model_id,
            features: data.features.clone(),
            hyperparams,
            seed,
            fit_time_s: 0.0,
            importance: normalise(raw_importance),
            params,
        }
    }

    pub fn score_row(&self, row: &[f64]) -> f64 {
        match &self.params {
            ModelParams::Logistic(m) => m.predict_row(row),
            ModelParams::Tree(t) => t.predict_row(row),
            ModelParams::Forest { trees } => {
                if trees.is_empty() {
                    0.5
                } else {
                    trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / trees.len() as f64
                }
            }
            ModelParams::Boosted(b) => b.predict_row(row),
        }
    }

    /// Positive-class probabilities for every row of `x`.
    pub fn score(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.features.len() {
            return Err(Error::FeatureCount {
                expected: self.features.len(),
                found: x.cols(),
            });
        }
        Ok((0..x.rows())
            .map(|i| self.score_row(x.row(i)).clamp(0.0, 1.0))
            .collect())
    }

    /// `(feature, importance)` in feature order.
    pub fn importance(&self) -> Vec<(String, f64)> {
        self.features
            .iter()
            .cloned()
            .zip(self.importance.iter().copied())
            .collect()
    }
}

/// Logistic regression; reported as `glmnet` when penalised, `logreg`
/// otherwise.
pub fn fit_logistic(data: &Dataset, cfg: &LogisticConfig) -> Result<TrainedModel> {
    let model = logistic::fit(&data.x, &data.y, cfg)?;
    let raw = model.weights.iter().map(|w| math::abs(*w)).collect();
    let (id, hp) = if cfg.lambda > 0.0 {
        (
            ModelId::Glmnet,
            Hyperparams::from([("lambda".to_string(), ParamValue::Real(cfg.lambda))]),
        )
    } else {
        (ModelId::Logreg, Hyperparams::new())
    };
    Ok(TrainedModel::new(id, data, hp, 0, raw, ModelParams::Logistic(model)))
}

/// Single Gini tree (the rpart analog).
pub fn fit_tree(data: &Dataset, cfg: &TreeConfig) -> Result<TrainedModel> {
    if data.n_rows() == 0 {
        return Err(Error::Empty);
    }
    let (tree, raw) = tree::fit_gini_tree(data, cfg);
    let hp = Hyperparams::from([
        ("max_depth".to_string(), int(cfg.max_depth)),
        ("min_leaf".to_string(), int(cfg.min_leaf)),
    ]);
    Ok(TrainedModel::new(
        ModelId::Rpart,
        data,
        hp,
        0,
        raw,
        ModelParams::Tree(tree),
    ))
}

/// Forest of Gini trees; `randomForest` when bootstrapping, `ranger` when
/// subsampling without replacement.
pub fn fit_forest(data: &Dataset, cfg: &ForestConfig) -> Result<TrainedModel> {
    if data.n_rows() == 0 {
        return Err(Error::Empty);
    }
    let (trees, raw) = forest::fit(data, cfg);
    let mut hp = Hyperparams::from([
        ("n_trees".to_string(), int(cfg.n_trees)),
        ("mtry".to_string(), int(cfg.mtry)),
    ]);
    let id = if cfg.replace {
        ModelId::RandomForest
    } else {
        hp.insert("sample_fraction".to_string(), ParamValue::Real(cfg.sample_fraction));
        ModelId::Ranger
    };
    Ok(TrainedModel::new(
        id,
        data,
        hp,
        cfg.seed,
        raw,
        ModelParams::Forest { trees },
    ))
}

/// Gradient-boosted trees (the xgboost analog).
pub fn fit_gbt(data: &Dataset, cfg: &GbtConfig) -> Result<TrainedModel> {
    let (model, raw) = gbt::fit(data, cfg, None);
    let hp = Hyperparams::from([
        ("n_rounds".to_string(), int(cfg.n_rounds)),
        ("learning_rate".to_string(), ParamValue::Real(cfg.learning_rate)),
        ("max_depth".to_string(), int(cfg.max_depth)),
        ("subsample".to_string(), ParamValue::Real(cfg.subsample)),
    ]);
    Ok(TrainedModel::new(
        ModelId::Xgboost,
        data,
        hp,
        cfg.seed,
        raw,
        ModelParams::Boosted(model),
    ))
}

fn get(hp: &Hyperparams, name: &str) -> Result<f64> {
    let v = hp
        .get(name)
        .ok_or_else(|| Error::InvalidHyperparameter {
            name: name.to_string(),
            reason: "missing".to_string(),
        })?
        .as_f64();
    if !v.is_finite() {
        return Err(Error::InvalidHyperparameter {
            name: name.to_string(),
            reason: "not finite".to_string(),
        });
    }
    Ok(v)
}

fn get_count(hp: &Hyperparams, name: &str, min: usize) -> Result<usize> {
    let v = get(hp, name)?;
    if v < min as f64 || v != math::floor(v) {
        return Err(Error::InvalidHyperparameter {
            name: name.to_string(),
            reason: format!("must be an integer >= {min}, got {v}"),
        });
    }
    Ok(v as usize)
}

fn get_fraction(hp: &Hyperparams, name: &str) -> Result<f64> {
    let v = get(hp, name)?;
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::InvalidHyperparameter {
            name: name.to_string(),
            reason: format!("must be in (0,1], got {v}"),
        });
    }
    Ok(v)
}

/// Fixed settings of the knobs the search does not tune.
pub mod fixed {
    pub const FOREST_MIN_LEAF: usize = 1;
    pub const GBT_MIN_LEAF: usize = 5;
    pub const LOGISTIC_MAX_ITER: usize = 1000;
    pub const LOGISTIC_TOL: f64 = 1e-6;
}

impl ModelSpec {
    pub fn new(model_id: ModelId, hyperparams: Hyperparams, seed: u64) -> Self {
        ModelSpec {
            model_id,
            hyperparams,
            seed,
        }
    }

    pub fn fit(&self, data: &Dataset) -> Result<TrainedModel> {
        let hp = &self.hyperparams;
        let p = data.x.cols();
        let mut model = match self.model_id {
            ModelId::Logreg | ModelId::Glmnet => {
                let lambda = if self.model_id == ModelId::Glmnet {
                    get(hp, "lambda")?
                } else {
                    0.0
                };
                if lambda < 0.0 {
                    return Err(Error::InvalidHyperparameter {
                        name: "lambda".to_string(),
                        reason: format!("must be >= 0, got {lambda}"),
                    });
                }
                let mut m = fit_logistic(
                    data,
                    &LogisticConfig {
                        lambda,
                        max_iter: fixed::LOGISTIC_MAX_ITER,
                        tol: fixed::LOGISTIC_TOL,
                    },
                )?;
                m.model_id = self.model_id;
                m
            }
            ModelId::Rpart => fit_tree(
                data,
                &TreeConfig {
                    max_depth: get_count(hp, "max_depth", 1)?,
                    min_leaf: get_count(hp, "min_leaf", 1)?,
                    min_gain: 0.0,
                },
            )?,
            ModelId::RandomForest | ModelId::Ranger => {
                let replace = self.model_id == ModelId::RandomForest;
                let mtry = get_count(hp, "mtry", 1)?;
                if mtry > p.max(1) {
                    return Err(Error::InvalidHyperparameter {
                        name: "mtry".to_string(),
                        reason: format!("{mtry} exceeds the {p} features"),
                    });
                }
                fit_forest(
                    data,
                    &ForestConfig {
                        n_trees: get_count(hp, "n_trees", 1)?,
                        mtry,
                        sample_fraction: if replace {
                            1.0
                        } else {
                            get_fraction(hp, "sample_fraction")?
                        },
                        replace,
                        min_leaf: fixed::FOREST_MIN_LEAF,
                        max_depth: usize::MAX,
                        seed: self.seed,
                    },
                )?
            }
            ModelId::Xgboost => {
                let learning_rate = get(hp, "learning_rate")?;
                if !(learning_rate > 0.0) {
                    return Err(Error::InvalidHyperparameter {
                        name: "learning_rate".to_string(),
                        reason: format!("must be > 0, got {learning_rate}"),
                    });
                }
                fit_gbt(
                    data,
                    &GbtConfig {
                        n_rounds: get_count(hp, "n_rounds", 0)?,
                        learning_rate,
                        max_depth: get_count(hp, "max_depth", 1)?,
                        subsample: get_fraction(hp, "subsample")?,
                        min_leaf: fixed::GBT_MIN_LEAF,
                        seed: self.seed,
                    },
                )?
            }
        };
        model.hyperparams = self.hyperparams.clone();
        model.seed = self.seed;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn data(cols: &[Vec<f64>], y: Vec<u8>) -> Dataset {
        let names = (0..cols.len()).map(|j| format!("x{j}")).collect();
        Dataset::new(names, Matrix::from_columns(cols).unwrap(), y).unwrap()
    }

    #[test]
    fn model_id_names_round_trip() {
        for m in ModelId::ALL {
            assert_eq!(m.as_str().parse::<ModelId>().unwrap(), m);
        }
        assert!("irace".parse::<ModelId>().is_err());
    }

    #[test]
    fn empty_matrix_scores_empty() {
        let d = data(&[vec![0.0, 1.0, 2.0, 3.0]], vec![0, 0, 1, 1]);
        let m = fit_tree(&d, &TreeConfig::default()).unwrap();
        assert!(m.score(&Matrix::zeros(0, 1)).unwrap().is_empty());
        assert!(m.score(&Matrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn single_split_importance_is_concentrated() {
        let d = data(
            &[vec![0.0; 6], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]],
            vec![0, 0, 0, 1, 1, 1],
        );
        let m = fit_tree(
            &d,
            &TreeConfig {
                max_depth: 1,
                min_leaf: 1,
                min_gain: 0.0,
            },
        )
        .unwrap();
        assert_eq!(m.importance, vec![0.0, 1.0]);
    }

    #[test]
    fn spec_validation() {
        let d = data(&[vec![0.0, 1.0, 2.0, 3.0]], vec![0, 0, 1, 1]);
        let spec = ModelSpec::new(ModelId::Rpart, Hyperparams::new(), 1);
        assert!(matches!(spec.fit(&d), Err(Error::InvalidHyperparameter { .. })));
        let hp = Hyperparams::from([
            ("n_trees".to_string(), ParamValue::Int(3)),
            ("mtry".to_string(), ParamValue::Int(5)),
        ]);
        assert!(ModelSpec::new(ModelId::RandomForest, hp, 1).fit(&d).is_err());
    }
}
