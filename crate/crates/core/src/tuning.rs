//! Random-search tuning with stratified cross-validation, refit on the full
//! training data, test evaluation and best-model selection.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::learners::{Hyperparams, ModelId, ModelSpec, ParamValue, TrainedModel};
use crate::math;
use crate::matrix::Dataset;
use crate::metrics::{self, ConfusionMetrics, LiftTable, RocCurve};
use crate::rng::{self, Stream};
use crate::table::stratified_counts;
use crate::Clock;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Distribution {
    /// Uniform over the integers `lo..=hi`.
    IntRange {
        lo: i64,
        hi: i64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// `exp` of a uniform draw over `[ln lo, ln hi]`.
    LogUniform {
        lo: f64,
        hi: f64,
    },
}

impl Distribution {
    pub fn sample(&self, rng: &mut Stream) -> ParamValue {
        match *self {
            Distribution::IntRange { lo, hi } => ParamValue::Int(rng.random_range(lo..=hi)),
            Distribution::Uniform { lo, hi } => ParamValue::Real(lo + (hi - lo) * rng.random::<f64>()),
            Distribution::LogUniform { lo, hi } => {
                let (a, b) = (math::ln(lo), math::ln(hi));
                ParamValue::Real(math::exp(a + (b - a) * rng.random::<f64>()).clamp(lo, hi))
            }
        }
    }

    pub fn contains(&self, v: ParamValue) -> bool {
        match (*self, v) {
            (Distribution::IntRange { lo, hi }, ParamValue::Int(i)) => (lo..=hi).contains(&i),
            (Distribution::Uniform { lo, hi } | Distribution::LogUniform { lo, hi }, ParamValue::Real(r)) => {
                lo <= r && r <= hi
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SearchSpace {
    pub params: Vec<(String, Distribution)>,
}

impl SearchSpace {
    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn sample(&self, rng: &mut Stream) -> Hyperparams {
        self.params.iter().map(|(n, d)| (n.clone(), d.sample(rng))).collect()
    }

    pub fn contains(&self, hp: &Hyperparams) -> bool {
        hp.len() == self.params.len()
            && self
                .params
                .iter()
                .all(|(n, d)| hp.get(n).is_some_and(|v| d.contains(*v)))
    }
}

fn space(params: &[(&str, Distribution)]) -> SearchSpace {
    SearchSpace {
        params: params.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
    }
}

/// Search space of one model for `p` features.
pub fn default_space(model: ModelId, p: usize) -> SearchSpace {
    use Distribution::*;
    let p = p.max(1) as i64;
    let mtry_lo = ((math::ceil(math::sqrt(p as f64)) as i64) / 2).clamp(1, p);
    let mtry = IntRange { lo: mtry_lo, hi: p };
    let n_trees = IntRange { lo: 100, hi: 500 };
    match model {
        ModelId::Logreg => SearchSpace::default(),
        ModelId::Glmnet => space(&[("lambda", LogUniform { lo: 1e-4, hi: 10.0 })]),
        ModelId::Rpart => space(&[
            ("max_depth", IntRange { lo: 2, hi: 10 }),
            ("min_leaf", IntRange { lo: 5, hi: 50 }),
        ]),
        ModelId::RandomForest => space(&[("n_trees", n_trees), ("mtry", mtry)]),
        ModelId::Ranger => space(&[
            ("n_trees", n_trees),
            ("mtry", mtry),
            ("sample_fraction", Uniform { lo: 0.5, hi: 1.0 }),
        ]),
        ModelId::Xgboost => space(&[
            ("n_rounds", IntRange { lo: 50, hi: 500 }),
            ("learning_rate", LogUniform { lo: 0.01, hi: 0.3 }),
            ("max_depth", IntRange { lo: 2, hi: 8 }),
            ("subsample", Uniform { lo: 0.5, hi: 1.0 }),
        ]),
    }
}

pub fn default_spaces(p: usize) -> Vec<(ModelId, SearchSpace)> {
    ModelId::ALL.iter().map(|&m| (m, default_space(m, p))).collect()
}

/// `n` draws from `space` on the stream of `(seed, model)`; an empty space
/// gives exactly one empty candidate.
pub fn draw_candidates(model: ModelId, space: &SearchSpace, n: usize, seed: u64) -> Vec<Hyperparams> {
    if space.is_empty() {
        return vec![Hyperparams::new()];
    }
    let mut rng = rng::stream(seed, &[rng::tag("candidates"), rng::tag(model.as_str())]);
    (0..n).map(|_| space.sample(&mut rng)).collect()
}

/// Fold index per row. Each class is shuffled and dealt round-robin, the
/// deal continuing from one class to the next, so fold sizes differ by at
/// most one and each fold's class counts by at most one.
pub fn stratified_folds(labels: &[u8], k: usize, seed: u64) -> Vec<usize> {
    let k = k.max(1);
    let mut rng = rng::stream(seed, &[rng::tag("folds")]);
    let mut folds = vec![0; labels.len()];
    let mut next = 0;
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            folds[i] = next % k;
            next += 1;
        }
    }
    folds
}

/// Rows of a stratified sample of about `max` rows, in original order; all
/// rows when `max >= n`.
pub fn stratified_subsample(labels: &[u8], max: usize, seed: u64) -> Vec<usize> {
    let n = labels.len();
    if max >= n {
        return (0..n).collect();
    }
    let mut rng = rng::stream(seed, &[rng::tag("max_obs")]);
    let by_class: Vec<Vec<usize>> = [0u8, 1]
        .iter()
        .map(|&c| (0..n).filter(|&i| labels[i] == c).collect())
        .collect();
    let counts = stratified_counts(&[by_class[0].len(), by_class[1].len()], max as f64 / n as f64);
    let mut keep = Vec::with_capacity(max);
    for (mut idx, count) in by_class.into_iter().zip(counts) {
        idx.shuffle(&mut rng);
        keep.extend_from_slice(&idx[..count]);
    }
    keep.sort_unstable();
    keep
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneConfig {
    pub tune_iters: usize,
    pub folds: usize,
    /// Candidate scoring uses a stratified sample of at most this many rows.
    pub max_obs: usize,
    pub seed: u64,
}

impl Default for TuneConfig {
    fn default() -> Self {
        TuneConfig {
            tune_iters: 10,
            folds: 5,
            max_obs: 4000,
            seed: 1991,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub hyperparams: Hyperparams,
    pub mean_auc: f64,
    pub fold_aucs: Vec<f64>,
    /// First fold failure; the candidate then scores 0.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub test_auc: f64,
    pub confusion: ConfusionMetrics,
    pub roc: RocCurve,
    pub lift: LiftTable,
    pub score_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub model_id: ModelId,
    pub candidates: Vec<CandidateResult>,
    pub chosen_index: usize,
    pub chosen: Hyperparams,
    pub tuning_rows: usize,
    /// Refit on the full training data.
    pub model: TrainedModel,
    /// In-sample AUC of the refit model.
    pub train_auc: f64,
    /// Search plus refit.
    pub fit_time_s: f64,
    pub evaluation: Option<Evaluation>,
}

impl TuneResult {
    pub fn test_auc(&self) -> Option<f64> {
        self.evaluation.as_ref().map(|e| e.test_auc)
    }
}

fn fold_seed(seed: u64, model: ModelId, candidate: usize, fold: usize) -> u64 {
    rng::derive_seed(seed, &[rng::tag(model.as_str()), candidate as u64, fold as u64])
}

/// Tunes one model. Candidates are scored by mean stratified-CV AUC on at
/// most `max_obs` rows; a failed fold scores the candidate 0. The winner
/// (earliest on ties) is refit on all of `train`.
pub fn random_search(
    train: &Dataset,
    model: ModelId,
    space: &SearchSpace,
    cfg: &TuneConfig,
    clock: &dyn Clock,
) -> Result<TuneResult> {
    let start = clock.now();
    let k = cfg.folds.max(2);
    let rows = stratified_subsample(&train.y, cfg.max_obs, cfg.seed);
    let tuning = train.subset(&rows);
    let n_pos = tuning.n_positive();
    let n_neg = tuning.n_rows() - n_pos;
    if n_pos < k || n_neg < k {
        return Err(Error::InvalidConfig(format!(
            "{k}-fold tuning needs {k} rows of each class, found {n_neg} and {n_pos}"
        )));
    }
    let folds = stratified_folds(&tuning.y, k, rng::derive_seed(cfg.seed, &[rng::tag("cv")]));
    let candidates = draw_candidates(model, space, cfg.tune_iters.max(1), cfg.seed);

    let jobs: Vec<(usize, usize)> = (0..candidates.len())
        .flat_map(|c| (0..k).map(move |f| (c, f)))
        .collect();
    let outcomes: Vec<Result<f64>> = exec::map(jobs, |(c, f)| {
        let fit_rows: Vec<usize> = (0..tuning.n_rows()).filter(|&i| folds[i] != f).collect();
        let held: Vec<usize> = (0..tuning.n_rows()).filter(|&i| folds[i] == f).collect();
        let spec = ModelSpec::new(model, candidates[c].clone(), fold_seed(cfg.seed, model, c, f));
        let fitted = spec.fit(&tuning.subset(&fit_rows))?;
        let valid = tuning.subset(&held);
        metrics::auc(&fitted.score(&valid.x)?, &valid.y)
    });

    let mut results = Vec::with_capacity(candidates.len());
    let mut outcomes = outcomes.into_iter();
    for hp in candidates {
        let mut fold_aucs = Vec::with_capacity(k);
        let mut error = None;
        for r in outcomes.by_ref().take(k) {
            match r {
                Ok(a) => fold_aucs.push(a),
                Err(e) => {
                    fold_aucs.push(0.0);
                    error.get_or_insert_with(|| e.to_string());
                }
            }
        }
        let mean_auc = if error.is_some() {
            0.0
        } else {
            fold_aucs.iter().sum::<f64>() / k as f64
        };
        results.push(CandidateResult {
            hyperparams: hp,
            mean_auc,
            fold_aucs,
            error,
        });
    }

    let mut best: Option<usize> = None;
    for (i, r) in results.iter().enumerate() {
        if r.error.is_none() && best.is_none_or(|b| r.mean_auc > results[b].mean_auc) {
            best = Some(i);
        }
    }
    let Some(chosen_index) = best else {
        let reason = results[0].error.clone().unwrap_or_default();
        return Err(Error::Fit(format!("every {model} candidate failed: {reason}")));
    };
    let chosen = results[chosen_index].hyperparams.clone();

    let refit_start = clock.now();
    let seed = rng::derive_seed(cfg.seed, &[rng::tag(model.as_str()), rng::tag("refit")]);
    let mut fitted = ModelSpec::new(model, chosen.clone(), seed).fit(train)?;
    let end = clock.now();
    fitted.fit_time_s = end - refit_start;
    let train_auc = metrics::auc(&fitted.score(&train.x)?, &train.y)?;
    Ok(TuneResult {
        model_id: model,
        candidates: results,
        chosen_index,
        chosen,
        tuning_rows: tuning.n_rows(),
        model: fitted,
        train_auc,
        fit_time_s: end - start,
        evaluation: None,
    })
}

/// Scores `test` and computes AUC, confusion metrics at `threshold`, the ROC
/// curve and a lift table of `lift_groups` bins.
pub fn evaluate(
    model: &TrainedModel,
    test: &Dataset,
    threshold: f64,
    lift_groups: usize,
    clock: &dyn Clock,
) -> Result<Evaluation> {
    let start = clock.now();
    let scores = model.score(&test.x)?;
    let score_time_s = clock.now() - start;
    Ok(Evaluation {
        test_auc: metrics::auc(&scores, &test.y)?,
        confusion: metrics::confusion_metrics(&scores, &test.y, threshold)?,
        roc: metrics::roc_curve(&scores, &test.y)?,
        lift: metrics::lift_table(&scores, &test.y, lift_groups)?,
        score_time_s,
    })
}

/// Model with the highest test AUC among evaluated results; ties go to the
/// shorter fit time, then to the earlier model in [`ModelId::ALL`].
pub fn select_best(results: &[TuneResult]) -> Result<ModelId> {
    let order = |m: ModelId| ModelId::ALL.iter().position(|&x| x == m).unwrap_or(usize::MAX);
    results
        .iter()
        .filter_map(|r| r.test_auc().map(|a| (a, r)))
        .min_by(|(a, ra), (b, rb)| {
            b.total_cmp(a)
                .then(ra.fit_time_s.total_cmp(&rb.fit_time_s))
                .then(order(ra.model_id).cmp(&order(rb.model_id)))
        })
        .map(|(_, r)| r.model_id)
        .ok_or(Error::NoModelTrained)
}
