//! Informative-missingness detection.
//!
//! For each feature `X` with enough missing cells, a depth-limited tree
//! predicts the indicator `1[X missing]` from every other feature. A high
//! cross-validated AUC means the missingness follows a pattern, so the
//! indicator is kept as a feature named `X_mar`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::learners::tree::{fit_gini_tree, TreeConfig};
use crate::math;
use crate::matrix::{Dataset, Matrix};
use crate::metrics;
use crate::prep::fresh_name;
use crate::prep::impute::{fill_column, fill_value, Imputation};
use crate::rng;
use crate::table::{Column, ColumnData, Schema, Table};
use crate::tuning::stratified_folds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarConfig {
    /// Indicators whose auxiliary AUC reaches this value are kept.
    pub auc_threshold: f64,
    pub cv_folds: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for MarConfig {
    fn default() -> Self {
        MarConfig {
            auc_threshold: 0.8,
            cv_folds: 5,
            max_depth: 4,
            min_leaf: 5,
            seed: 0,
        }
    }
}

impl MarConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.auc_threshold > 0.5 && self.auc_threshold < 1.0) {
            return Err(Error::InvalidConfig(String::from(
                "mar auc threshold must be in (0.5,1)",
            )));
        }
        if self.cv_folds < 2 {
            return Err(Error::InvalidConfig(String::from("mar folds must be at least 2")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarVerdict {
    Retained,
    Dropped,
    /// Not modelled: too few missing cells, or the indicator is constant.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarFinding {
    pub feature: String,
    pub missing: usize,
    pub auc: Option<f64>,
    pub verdict: MarVerdict,
    pub indicator: Option<String>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MarReport {
    pub auc_threshold: f64,
    /// One entry per feature with at least one missing cell, in column order.
    pub findings: Vec<MarFinding>,
}

impl MarReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    /// `(feature, indicator)` for every retained indicator.
    pub fn indicators(&self) -> impl Iterator<Item = (&str, &str)> {
        self.findings
            .iter()
            .filter_map(|f| f.indicator.as_deref().map(|i| (f.feature.as_str(), i)))
    }
}

/// `1` where `x1` is missing, `0` elsewhere, named `{x1}_mar`.
pub fn mar_indicator(t: &Table, x1: &str) -> Result<Column> {
    let col = t.column(x1).ok_or_else(|| Error::UnknownColumn(x1.into()))?;
    Ok(indicator_column(col, &format!("{x1}_mar")))
}

fn indicator_column(col: &Column, name: &str) -> Column {
    Column::boolean(name, col.missing_mask().iter().map(|&m| Some(m)).collect())
}

/// Smallest missing count that gets an auxiliary model.
pub fn missing_floor(n_rows: usize) -> usize {
    let share = math::ceil(0.005 * n_rows as f64) as usize;
    share.max(10)
}

/// Throwaway numeric reading of a column: median/mode fill, categorical
/// levels as ranks in sorted order.
fn aux_values(col: &Column) -> Vec<f64> {
    let filled = match fill_value(col, Imputation::MeanMedian) {
        Some(f) => fill_column(col, &f).unwrap_or_else(|_| col.clone()),
        None => return alloc::vec![0.0; col.len()],
    };
    match filled.data() {
        ColumnData::Categorical { codes, levels } => {
            let mut order: Vec<usize> = (0..levels.len()).collect();
            order.sort_by(|&a, &b| levels[a].cmp(&levels[b]));
            let mut rank = alloc::vec![0.0; levels.len()];
            for (r, &k) in order.iter().enumerate() {
                rank[k] = r as f64;
            }
            codes.iter().map(|&c| rank[c as usize]).collect()
        }
        _ => filled.to_f64().unwrap_or_default(),
    }
}

/// Mean out-of-fold AUC of a tree predicting `y` from `x`; folds missing a
/// class are skipped. `None` when no fold could be scored.
fn aux_auc(x: &Matrix, y: &[u8], cfg: &MarConfig, stream: u64) -> Option<f64> {
    let folds = stratified_folds(y, cfg.cv_folds, rng::derive_seed(cfg.seed, &[rng::tag("mar"), stream]));
    let names = (0..x.cols()).map(|j| format!("f{j}")).collect();
    let data = Dataset::new(names, x.clone(), y.to_vec()).ok()?;
    let tree_cfg = TreeConfig {
        max_depth: cfg.max_depth,
        min_leaf: cfg.min_leaf,
        min_gain: 0.0,
    };
    let mut total = 0.0;
    let mut scored = 0;
    for k in 0..cfg.cv_folds {
        let train: Vec<usize> = (0..y.len()).filter(|&i| folds[i] != k).collect();
        let held: Vec<usize> = (0..y.len()).filter(|&i| folds[i] == k).collect();
        let (tree, _) = fit_gini_tree(&data.subset(&train), &tree_cfg);
        let scores: Vec<f64> = held.iter().map(|&i| tree.predict_row(x.row(i))).collect();
        let labels: Vec<u8> = held.iter().map(|&i| y[i]).collect();
        if let Ok(a) = metrics::auc(&scores, &labels) {
            total += a;
            scored += 1;
        }
    }
    (scored > 0).then(|| total / f64::from(scored))
}

/// Scans every column of `features`. Retained indicators get names
/// `{feature}_mar` that do not clash with existing columns.
pub fn scan(features: &Table, cfg: &MarConfig) -> Result<MarReport> {
    cfg.validate()?;
    let n = features.n_rows();
    let floor = missing_floor(n);
    let columns: Vec<Vec<f64>> = features.columns().iter().map(aux_values).collect();
    let x = Matrix::from_columns(&columns)?;
    let scanned: Vec<usize> = (0..features.n_cols())
        .filter(|&j| features.columns()[j].missing_count() > 0)
        .collect();

    let aucs: Vec<Option<f64>> = exec::map(scanned.clone(), |j| {
        let col = &features.columns()[j];
        let missing = col.missing_count();
        if missing < floor || missing == n || x.cols() < 2 {
            return None;
        }
        let y: Vec<u8> = col.missing_mask().iter().map(|&m| u8::from(m)).collect();
        aux_auc(&x.without_column(j), &y, cfg, j as u64)
    });

    let mut taken: BTreeSet<String> = features.names().into_iter().map(String::from).collect();
    let mut findings = Vec::with_capacity(scanned.len());
    for (&j, auc) in scanned.iter().zip(aucs) {
        let col = &features.columns()[j];
        let missing = col.missing_count();
        let (verdict, note) = match auc {
            Some(a) if a >= cfg.auc_threshold => (MarVerdict::Retained, None),
            Some(_) => (MarVerdict::Dropped, None),
            None if missing == n => (MarVerdict::Skipped, Some("every cell is missing")),
            None if missing < floor => (MarVerdict::Skipped, Some("fewer missing cells than the minimum")),
            None => (MarVerdict::Skipped, Some("no fold could be scored")),
        };
        let indicator = (verdict == MarVerdict::Retained).then(|| {
            let name = fresh_name(&format!("{}_mar", col.name()), &taken);
            taken.insert(name.clone());
            name
        });
        findings.push(MarFinding {
            feature: col.name().into(),
            missing,
            auc,
            verdict,
            indicator,
            note: note.map(String::from),
        });
    }
    Ok(MarReport {
        auc_threshold: cfg.auc_threshold,
        findings,
    })
}

/// Appends the retained indicators of `report`, computed from the missing
/// masks of `source`, to `t`.
pub fn append_indicators(t: &Table, source: &Table, report: &MarReport) -> Result<Table> {
    let mut out = t.clone();
    for (feature, name) in report.indicators() {
        let col = source
            .column(feature)
            .ok_or_else(|| Error::UnknownColumn(feature.into()))?;
        out = out.with_column(indicator_column(col, name))?;
    }
    Ok(out)
}

/// Scans the feature columns of `train` and appends the retained
/// indicators. Existing columns are not modified.
pub fn mar_scan(train: &Table, schema: &Schema, cfg: &MarConfig) -> Result<(Table, MarReport)> {
    let names: Vec<&str> = schema.features().collect();
    let features = train.select(&names)?;
    let mut report = scan(&features, cfg)?;
    let mut taken: BTreeSet<String> = train.names().into_iter().map(String::from).collect();
    for f in report.findings.iter_mut() {
        if let Some(name) = f.indicator.as_mut() {
            *name = fresh_name(name, &taken);
            taken.insert(name.clone());
        }
    }
    let augmented = append_indicators(train, &features, &report)?;
    Ok((augmented, report))
}
