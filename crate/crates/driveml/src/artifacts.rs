//! JSON documents written beside the HTML report.

use std::fs;
use std::path::{Path, PathBuf};

use driveml_core::explain::PdpCurve;
use driveml_core::learners::{Hyperparams, ModelId, TrainedModel};
use driveml_core::metrics::{ConfusionMetrics, LiftTable, RocCurve};
use driveml_core::tuning::CandidateResult;
use serde::{Deserialize, Serialize};

use crate::report;
use crate::run::RunOutput;

pub const FORMAT_VERSION: u32 = 1;

pub const METRICS_FILE: &str = "metrics.json";
pub const PIPELINE_FILE: &str = "pipeline.json";
pub const MODELS_FILE: &str = "models.json";
pub const EVALUATION_FILE: &str = "evaluation.json";
pub const REPORT_FILE: &str = "report.html";

/// One row of the model comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub model_id: ModelId,
    /// Tuning plus the final refit.
    pub fit_time_s: f64,
    pub score_time_s: f64,
    pub train_auc: f64,
    pub test_auc: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedModel {
    pub model_id: ModelId,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsDoc {
    pub format_version: u32,
    pub best_model: ModelId,
    pub threshold: f64,
    pub models: Vec<MetricsRecord>,
    pub failed: Vec<FailedModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelsDoc {
    pub format_version: u32,
    pub best_model: ModelId,
    pub positive_label: String,
    pub models: Vec<TrainedModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEvaluation {
    pub model_id: ModelId,
    pub tuning_rows: usize,
    pub chosen: Hyperparams,
    pub candidates: Vec<CandidateResult>,
    pub confusion: ConfusionMetrics,
    pub roc: RocCurve,
    pub lift: LiftTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationDoc {
    pub format_version: u32,
    pub best_model: ModelId,
    pub models: Vec<ModelEvaluation>,
    pub importance: Vec<(String, f64)>,
    pub pdp: Vec<PdpCurve>,
}

pub fn metrics_doc(out: &RunOutput) -> MetricsDoc {
    MetricsDoc {
        format_version: FORMAT_VERSION,
        best_model: out.best,
        threshold: out.config.threshold,
        models: out
            .results
            .iter()
            .filter_map(|r| {
                let e = r.evaluation.as_ref()?;
                Some(MetricsRecord {
                    model_id: r.model_id,
                    fit_time_s: r.fit_time_s,
                    score_time_s: e.score_time_s,
                    train_auc: r.train_auc,
                    test_auc: e.test_auc,
                    accuracy: e.confusion.accuracy,
                    precision: e.confusion.precision,
                    recall: e.confusion.recall,
                    f1: e.confusion.f1,
                })
            })
            .collect(),
        failed: out
            .failures
            .iter()
            .map(|f| FailedModel {
                model_id: f.model_id,
                error: f.error.clone(),
            })
            .collect(),
    }
}

pub fn models_doc(out: &RunOutput) -> ModelsDoc {
    ModelsDoc {
        format_version: FORMAT_VERSION,
        best_model: out.best,
        positive_label: out.positive_label.clone(),
        models: out.results.iter().map(|r| r.model.clone()).collect(),
    }
}

pub fn evaluation_doc(out: &RunOutput) -> EvaluationDoc {
    EvaluationDoc {
        format_version: FORMAT_VERSION,
        best_model: out.best,
        models: out
            .results
            .iter()
            .filter_map(|r| {
                let e = r.evaluation.as_ref()?;
                Some(ModelEvaluation {
                    model_id: r.model_id,
                    tuning_rows: r.tuning_rows,
                    chosen: r.chosen.clone(),
                    candidates: r.candidates.clone(),
                    confusion: e.confusion,
                    roc: e.roc.clone(),
                    lift: e.lift.clone(),
                })
            })
            .collect(),
        importance: out.importance.clone(),
        pdp: out.pdps.clone(),
    }
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> std::io::Result<PathBuf> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

/// Writes every artifact into `dir`, creating it if needed. Returns the
/// written paths.
pub fn write_all(out: &RunOutput, dir: &Path, generated_at: &str) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = vec![
        write_json(dir, METRICS_FILE, &metrics_doc(out))?,
        write_json(dir, PIPELINE_FILE, &out.pipeline)?,
        write_json(dir, MODELS_FILE, &models_doc(out))?,
        write_json(dir, EVALUATION_FILE, &evaluation_doc(out))?,
    ];
    if out.config.html_report {
        let path = dir.join(REPORT_FILE);
        fs::write(&path, report::render_html(out, generated_at))?;
        paths.push(path);
    }
    Ok(paths)
}
