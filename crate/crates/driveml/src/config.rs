//! Run configuration: defaults, an optional TOML file, then command-line
//! flags, in increasing precedence.

use std::path::{Path, PathBuf};

use clap::Args;
use driveml_core::mar::MarConfig;
use driveml_core::prep::{Imputation, PrepConfig};
use driveml_core::ModelId;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

pub const DEFAULT_MISSING_TOKENS: [&str; 5] = ["", "NA", "NaN", "null", "N/A"];

/// Effective settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub input: PathBuf,
    /// Separate test file; when absent the input is split.
    pub test_input: Option<PathBuf>,
    pub target: String,
    pub uid: Option<String>,
    pub drop: Vec<String>,
    pub onlykeep: Option<Vec<String>>,
    pub test_split: f64,
    pub tune_iters: usize,
    pub tune_type: String,
    pub models: Vec<ModelId>,
    pub var_imp: usize,
    pub lift_group: usize,
    pub max_obs: usize,
    pub seed: u64,
    pub cv_folds: usize,
    pub threshold: f64,
    pub pdp_features: usize,
    pub pdp_grid: usize,
    pub prep: PrepConfig,
    pub missing_tokens: Vec<String>,
    pub out_dir: PathBuf,
    pub html_report: bool,
    /// Record wall-clock fit and score times; when off they are reported as 0.
    pub timings: bool,
}

/// Keys accepted in a configuration file. Names match the flags with `_`
/// for `-`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub test_input: Option<PathBuf>,
    pub target: Option<String>,
    pub uid: Option<String>,
    pub drop: Option<Vec<String>>,
    pub onlykeep: Option<Vec<String>>,
    pub test_split: Option<f64>,
    pub tune_iters: Option<usize>,
    pub tune_type: Option<String>,
    pub models: Option<ModelList>,
    pub var_imp: Option<usize>,
    pub lift_group: Option<usize>,
    pub max_obs: Option<usize>,
    pub seed: Option<u64>,
    pub cv_folds: Option<usize>,
    pub threshold: Option<f64>,
    pub pdp_features: Option<usize>,
    pub pdp_grid: Option<usize>,
    pub missimpute: Option<String>,
    pub auto_mar: Option<bool>,
    pub mar_threshold: Option<f64>,
    pub dummyvar: Option<bool>,
    pub char_var_limit: Option<usize>,
    pub aucv: Option<f64>,
    pub corr: Option<f64>,
    pub outlier_flag: Option<bool>,
    pub max_interactions: Option<usize>,
    pub missing_tokens: Option<Vec<String>>,
    pub out_dir: Option<PathBuf>,
    pub html_report: Option<bool>,
    pub timings: Option<bool>,
}

/// `"all"`, a comma-separated string, or a list of model ids.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ModelList {
    One(String),
    Many(Vec<String>),
}

impl ModelList {
    fn names(&self) -> Vec<String> {
        match self {
            ModelList::One(s) => s.split(',').map(|p| p.trim().to_string()).collect(),
            ModelList::Many(v) => v.clone(),
        }
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "t" | "yes" | "1" => Ok(true),
        "false" | "f" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{s}`")),
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Configuration file (TOML key = value); flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Training CSV (split into train and test unless --test-input is given).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Separate test CSV with the same columns.
    #[arg(long)]
    pub test_input: Option<PathBuf>,
    /// Binary target column.
    #[arg(long)]
    pub target: Option<String>,
    /// Identifier column, excluded from modelling.
    #[arg(long)]
    pub uid: Option<String>,
    /// Columns to exclude.
    #[arg(long, value_delimiter = ',')]
    pub drop: Option<Vec<String>>,
    /// Only these columns (plus the target) are used.
    #[arg(long, value_delimiter = ',')]
    pub onlykeep: Option<Vec<String>>,
    /// Test fraction when splitting [default: 0.2].
    #[arg(long)]
    pub test_split: Option<f64>,
    /// Random-search candidates per model [default: 10].
    #[arg(long)]
    pub tune_iters: Option<usize>,
    /// Tuning strategy; only `random` is available.
    #[arg(long)]
    pub tune_type: Option<String>,
    /// `all` or a comma-separated subset of glmnet, logreg, randomForest,
    /// ranger, xgboost, rpart.
    #[arg(long)]
    pub models: Option<String>,
    /// Features shown in the importance chart [default: 10].
    #[arg(long)]
    pub var_imp: Option<usize>,
    /// Lift table bins [default: 50].
    #[arg(long)]
    pub lift_group: Option<usize>,
    /// Row cap for candidate scoring [default: 4000].
    #[arg(long)]
    pub max_obs: Option<usize>,
    /// Seed for the split, folds, candidates and every learner [default: 1991].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cross-validation folds for candidate scoring [default: 5].
    #[arg(long)]
    pub cv_folds: Option<usize>,
    /// Probability cut for accuracy, precision, recall and F1 [default: 0.5].
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Partial-dependence curves for the best model [default: 5].
    #[arg(long)]
    pub pdp_features: Option<usize>,
    /// `default` (median/mode) or `mode`.
    #[arg(long)]
    pub missimpute: Option<String>,
    /// Scan for predictable missingness and keep its indicators [default: false].
    #[arg(long, value_parser = parse_bool)]
    pub auto_mar: Option<bool>,
    /// Auxiliary AUC at which a missingness indicator is kept [default: 0.8].
    #[arg(long)]
    pub mar_threshold: Option<f64>,
    /// One-hot encode categoricals; `false` uses ordinal codes [default: true].
    #[arg(long, value_parser = parse_bool)]
    pub dummyvar: Option<bool>,
    /// Categoricals with more levels are rejected [default: 15].
    #[arg(long)]
    pub char_var_limit: Option<usize>,
    /// Features whose univariate AUC is within this of 0.5 are rejected [default: 0.002].
    #[arg(long)]
    pub aucv: Option<f64>,
    /// Absolute correlation above which the later feature of a pair is rejected [default: 0.98].
    #[arg(long)]
    pub corr: Option<f64>,
    /// Flag and cap values outside the 1.5 IQR fences [default: true].
    #[arg(long, value_parser = parse_bool)]
    pub outlier_flag: Option<bool>,
    /// Cap on pairwise numeric products; 0 disables [default: 200].
    #[arg(long)]
    pub max_interactions: Option<usize>,
    /// Cell values read as missing [default: "",NA,NaN,null,N/A].
    #[arg(long, value_delimiter = ',')]
    pub missing_tokens: Option<Vec<String>>,
    /// Output directory [default: driveml_out].
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Write report.html [default: true].
    #[arg(long, value_parser = parse_bool)]
    pub html_report: Option<bool>,
    /// Report all timings as 0 so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timings: bool,
}

pub fn read_file_config(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| ConfigError(format!("config {}: {e}", path.display())))
}

fn parse_models(names: &[String]) -> Result<Vec<ModelId>, ConfigError> {
    if names.len() == 1 && names[0].eq_ignore_ascii_case("all") {
        return Ok(ModelId::ALL.to_vec());
    }
    let mut out = Vec::new();
    for n in names {
        let m: ModelId = n.parse().map_err(|_| ConfigError(format!("unknown model `{n}`")))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return err("models must name at least one model");
    }
    Ok(out)
}

fn parse_imputation(s: &str) -> Result<Imputation, ConfigError> {
    match s.to_ascii_lowercase().as_str() {
        "default" | "median" | "mean_median" => Ok(Imputation::MeanMedian),
        "mode" | "mode_only" => Ok(Imputation::ModeOnly),
        _ => err(format!("missimpute must be `default` or `mode`, got `{s}`")),
    }
}

/// Merges flags over the file over the defaults and checks every range.
pub fn validate_config(args: &RunArgs, file: Option<FileConfig>) -> Result<RunConfig, ConfigError> {
    let f = file.unwrap_or_default();
    let defaults = PrepConfig::default();

    let Some(input) = args.input.clone().or(f.input) else {
        return err("missing input file (--input)");
    };
    let Some(target) = args.target.clone().or(f.target).filter(|t| !t.is_empty()) else {
        return err("missing target column (--target)");
    };
    let test_split = args.test_split.or(f.test_split).unwrap_or(0.2);
    if !(test_split > 0.0 && test_split < 1.0) {
        return err("test_split must be in (0,1)");
    }
    let tune_iters = args.tune_iters.or(f.tune_iters).unwrap_or(10);
    if tune_iters == 0 {
        return err("tune_iters must be at least 1");
    }
    let tune_type = args
        .tune_type
        .clone()
        .or(f.tune_type)
        .unwrap_or_else(|| "random".into());
    if tune_type != "random" {
        return err(format!(
            "tune_type `{tune_type}` is not available; only `random` search is implemented (iterated racing is not)"
        ));
    }
    let models = match (&args.models, &f.models) {
        (Some(s), _) => parse_models(&ModelList::One(s.clone()).names())?,
        (None, Some(m)) => parse_models(&m.names())?,
        (None, None) => ModelId::ALL.to_vec(),
    };
    let var_imp = args.var_imp.or(f.var_imp).unwrap_or(10);
    let lift_group = args.lift_group.or(f.lift_group).unwrap_or(50);
    if lift_group == 0 {
        return err("lift_group must be at least 1");
    }
    let cv_folds = args.cv_folds.or(f.cv_folds).unwrap_or(5);
    if cv_folds < 2 {
        return err("cv_folds must be at least 2");
    }
    let max_obs = args.max_obs.or(f.max_obs).unwrap_or(4000);
    if max_obs < 2 * cv_folds {
        return err(format!("max_obs must be at least {}", 2 * cv_folds));
    }
    let threshold = args.threshold.or(f.threshold).unwrap_or(0.5);
    if !(0.0..=1.0).contains(&threshold) {
        return err("threshold must be in [0,1]");
    }
    let seed = args.seed.or(f.seed).unwrap_or(1991);
    let missimpute = match args.missimpute.as_deref().or(f.missimpute.as_deref()) {
        Some(s) => parse_imputation(s)?,
        None => defaults.missimpute,
    };
    let prep = PrepConfig {
        missimpute,
        auto_mar: args.auto_mar.or(f.auto_mar).unwrap_or(defaults.auto_mar),
        mar: MarConfig {
            auc_threshold: args
                .mar_threshold
                .or(f.mar_threshold)
                .unwrap_or(defaults.mar.auc_threshold),
            seed,
            ..defaults.mar.clone()
        },
        dummyvar: args.dummyvar.or(f.dummyvar).unwrap_or(defaults.dummyvar),
        char_var_limit: args
            .char_var_limit
            .or(f.char_var_limit)
            .unwrap_or(defaults.char_var_limit),
        aucv: args.aucv.or(f.aucv).unwrap_or(defaults.aucv),
        corr: args.corr.or(f.corr).unwrap_or(defaults.corr),
        outlier_flag: args.outlier_flag.or(f.outlier_flag).unwrap_or(defaults.outlier_flag),
        max_interactions: args
            .max_interactions
            .or(f.max_interactions)
            .unwrap_or(defaults.max_interactions),
    };
    prep.validate().map_err(|e| match e {
        driveml_core::Error::InvalidConfig(m) => ConfigError(m),
        other => ConfigError(other.to_string()),
    })?;

    Ok(RunConfig {
        input,
        test_input: args.test_input.clone().or(f.test_input),
        target,
        uid: args.uid.clone().or(f.uid),
        drop: args.drop.clone().or(f.drop).unwrap_or_default(),
        onlykeep: args.onlykeep.clone().or(f.onlykeep),
        test_split,
        tune_iters,
        tune_type,
        models,
        var_imp,
        lift_group,
        max_obs,
        seed,
        cv_folds,
        threshold,
        pdp_features: args.pdp_features.or(f.pdp_features).unwrap_or(5),
        pdp_grid: f.pdp_grid.unwrap_or(20).max(2),
        prep,
        missing_tokens: args
            .missing_tokens
            .clone()
            .or(f.missing_tokens)
            .unwrap_or_else(|| DEFAULT_MISSING_TOKENS.iter().map(|s| s.to_string()).collect()),
        out_dir: args
            .out_dir
            .clone()
            .or(f.out_dir)
            .unwrap_or_else(|| PathBuf::from("driveml_out")),
        html_report: args.html_report.or(f.html_report).unwrap_or(true),
        timings: !args.no_timings && f.timings.unwrap_or(true),
    })
}
