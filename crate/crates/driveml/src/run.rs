//! End-to-end run: load, clean, split, prepare, tune every model, pick the
//! best, explain it and write the artifacts.

use std::path::Path;

use driveml_core::explain::{self, PdpCurve};
use driveml_core::learners::ModelId;
use driveml_core::prep::{self, PrepPipeline};
use driveml_core::summary::{self, DescriptiveSummary};
use driveml_core::table::{infer_schema, split_train_test, MissingTokens, SchemaOptions};
use driveml_core::tuning::{self, stratified_subsample, TuneConfig, TuneResult};
use driveml_core::{Clock, Error as CoreError, NoClock, Table};

use crate::config::RunConfig;
use crate::io::{self, IoError};
use crate::WallClock;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: {source}{}", hint(.source))]
    Stage { stage: &'static str, source: CoreError },
    #[error("{stage}: {source}")]
    Io { stage: &'static str, source: IoError },
    #[error("training: every model failed; {0}")]
    AllFailed(String),
}

fn hint(e: &CoreError) -> &'static str {
    match e {
        CoreError::UnknownColumn(_) => " (check the column name against the CSV header)",
        CoreError::TargetNotBinary { .. } => " (the target must have exactly two values)",
        CoreError::ClassTooSmall { .. } => " (each class needs more rows)",
        CoreError::NoFeaturesSelected => " (try lowering aucv or raising corr)",
        CoreError::RaggedRow { .. } => " (every row needs as many fields as the header)",
        _ => "",
    }
}

impl RunError {
    /// 2 for configuration errors, 3 for data errors, 4 when no model
    /// could be trained.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Stage {
                source: CoreError::InvalidConfig(_),
                ..
            } => 2,
            RunError::Stage { .. } | RunError::Io { .. } => 3,
            RunError::AllFailed(_) => 4,
        }
    }
}

fn stage(stage: &'static str) -> impl Fn(CoreError) -> RunError {
    move |source| RunError::Stage { stage, source }
}

/// A model that could not be trained.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub model_id: ModelId,
    pub error: String,
}

/// Everything a run produces, before serialization.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    pub summary: DescriptiveSummary,
    pub input_rows: usize,
    pub duplicates_removed: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    pub positive_label: String,
    pub pipeline: PrepPipeline,
    pub results: Vec<TuneResult>,
    pub failures: Vec<Failure>,
    pub best: ModelId,
    pub importance: Vec<(String, f64)>,
    pub pdps: Vec<PdpCurve>,
}

impl RunOutput {
    pub fn best_result(&self) -> &TuneResult {
        self.results
            .iter()
            .find(|r| r.model_id == self.best)
            .expect("best model is among the results")
    }
}

fn read(path: &Path, tokens: &MissingTokens) -> Result<Table, RunError> {
    io::read_csv(path, tokens).map_err(|source| RunError::Io { stage: "load", source })
}

/// Runs the whole pipeline in memory.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let wall = WallClock::new();
    let clock: &dyn Clock = if cfg.timings { &wall } else { &NoClock };
    let tokens = MissingTokens::new(cfg.missing_tokens.iter().cloned());

    let raw = read(&cfg.input, &tokens)?;
    let summary = summary::describe(&raw);
    let cleaned = prep::clean(&raw).map_err(stage("clean"))?;
    let duplicates_removed = raw.n_rows() - cleaned.n_rows();
    let cleaned = cleaned.drop_missing_rows(&cfg.target).map_err(stage("schema"))?;
    let opts = SchemaOptions {
        target: cfg.target.clone(),
        uid: cfg.uid.clone(),
        drop: cfg.drop.clone(),
        onlykeep: cfg.onlykeep.clone(),
    };
    let schema = infer_schema(&cleaned, &opts).map_err(stage("schema"))?;

    let (train, test) = match &cfg.test_input {
        Some(path) => {
            let test = read(path, &tokens)?;
            let test = test.drop_missing_rows(&cfg.target).map_err(stage("schema"))?;
            (cleaned, test)
        }
        None => split_train_test(&cleaned, &schema, cfg.test_split, cfg.seed).map_err(stage("split"))?,
    };

    let pipeline = prep::fit_prep(&train, &schema, &cfg.prep).map_err(stage("prep"))?;
    let train_p = pipeline.apply(&train).map_err(stage("prep"))?;
    let test_p = pipeline.apply(&test).map_err(stage("prep"))?;
    let train_d = pipeline.dataset(&train_p).map_err(stage("prep"))?;
    let test_d = pipeline.dataset(&test_p).map_err(stage("prep"))?;

    let tune_cfg = TuneConfig {
        tune_iters: cfg.tune_iters,
        folds: cfg.cv_folds,
        max_obs: cfg.max_obs,
        seed: cfg.seed,
    };
    let p = train_d.x.cols();
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for &model in &cfg.models {
        let space = tuning::default_space(model, p);
        let outcome = tuning::random_search(&train_d, model, &space, &tune_cfg, clock).and_then(|mut r| {
            r.evaluation = Some(tuning::evaluate(
                &r.model,
                &test_d,
                cfg.threshold,
                cfg.lift_group,
                clock,
            )?);
            Ok(r)
        });
        match outcome {
            Ok(r) => results.push(r),
            Err(e) => failures.push(Failure {
                model_id: model,
                error: e.to_string(),
            }),
        }
    }
    let best = tuning::select_best(&results).map_err(|_| {
        let reasons: Vec<String> = failures
            .iter()
            .map(|f| format!("{}: {}", f.model_id, f.error))
            .collect();
        RunError::AllFailed(reasons.join("; "))
    })?;
    let best_model = &results
        .iter()
        .find(|r| r.model_id == best)
        .expect("selected model exists")
        .model;

    let importance = explain::top_features(best_model, cfg.var_imp);
    // Partial dependence averages over a stratified sample of at most
    // max_obs training rows.
    let reference = train_d.subset(&stratified_subsample(&train_d.y, cfg.max_obs, cfg.seed));
    let pdps = explain::top_features(best_model, cfg.pdp_features)
        .iter()
        .map(|(f, _)| explain::pdp(best_model, &reference.x, f, cfg.pdp_grid))
        .collect::<Result<Vec<_>, _>>()
        .map_err(stage("explain"))?;

    Ok(RunOutput {
        config: cfg.clone(),
        summary,
        input_rows: raw.n_rows(),
        duplicates_removed,
        train_rows: train_d.n_rows(),
        test_rows: test_d.n_rows(),
        positive_label: schema.positive_label.clone(),
        pipeline,
        results,
        failures,
        best,
        importance,
        pdps,
    })
}
