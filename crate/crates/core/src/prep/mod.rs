//! Replayable data preparation: fitted once on the training table, then
//! applied unchanged to any table with the same source columns.
//!
//! Stages, in order:
//!
//! 1. clean column names;
//! 2. coerce each source column to its training kind;
//! 3. record missingness indicators (when enabled);
//! 4. impute (median or mode);
//! 5. cap outliers and append outlier flags;
//! 6. expand date columns;
//! 7. append pairwise products of the numeric source columns;
//! 8. encode categorical columns;
//! 9. append the retained missingness indicators;
//! 10. keep the selected features.

pub mod encode;
pub mod engineer;
pub mod impute;
pub mod outliers;
pub mod select;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mar::{self, MarConfig, MarReport};
use crate::matrix::{feature_matrix, Dataset};
use crate::table::{clean_names, Column, ColumnKind, Role, Schema, Table};

pub use encode::Encoding;
pub use engineer::{DateSpec, Interaction};
pub use impute::{FillValue, Imputation, ImputeMap};
pub use outliers::{OutlierBounds, OutlierSpec};
pub use select::Selection;

pub const FORMAT_VERSION: u32 = 1;

/// `base`, or `base_2`, `base_3`, ... whichever is first absent from `taken`.
pub(crate) fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(base) {
        return String::from(base);
    }
    (2..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| !taken.contains(n))
        .unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RejectReason {
    /// No present cell in the training table.
    AllMissing,
    HighCardinality {
        levels: usize,
    },
    ZeroVariance,
    HighCorrelation {
        partner: String,
        r: f64,
    },
    LowAuc {
        auc: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub feature: String,
    pub reason: RejectReason,
}

impl Rejection {
    pub fn new(feature: &str, reason: RejectReason) -> Self {
        Rejection {
            feature: String::from(feature),
            reason,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepConfig {
    pub missimpute: Imputation,
    pub auto_mar: bool,
    pub mar: MarConfig,
    /// One-hot encode categoricals; otherwise use ordinal codes.
    pub dummyvar: bool,
    /// Categoricals with more training levels are rejected.
    pub char_var_limit: usize,
    /// Minimum distance of a feature's univariate AUC from 0.5.
    pub aucv: f64,
    /// Correlation at or above which the later feature of a pair is dropped.
    pub corr: f64,
    pub outlier_flag: bool,
    /// Cap on pairwise products; 0 disables them.
    pub max_interactions: usize,
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig {
            missimpute: Imputation::MeanMedian,
            auto_mar: false,
            mar: MarConfig::default(),
            dummyvar: true,
            char_var_limit: 15,
            aucv: 0.002,
            corr: 0.98,
            outlier_flag: true,
            max_interactions: 200,
        }
    }
}

impl PrepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.aucv > 0.0 && self.aucv < 0.5) {
            return Err(Error::InvalidConfig(String::from("aucv must be in (0,0.5)")));
        }
        if !(self.corr > 0.0 && self.corr <= 1.0) {
            return Err(Error::InvalidConfig(String::from("corr must be in (0,1]")));
        }
        if self.char_var_limit == 0 {
            return Err(Error::InvalidConfig(String::from("char_var_limit must be at least 1")));
        }
        self.mar.validate()
    }
}

/// Removes duplicate rows (first occurrence kept) and cleans column names.
pub fn clean(t: &Table) -> Result<Table> {
    let mut seen = BTreeSet::new();
    let keep: Vec<usize> = (0..t.n_rows())
        .filter(|&i| seen.insert(t.columns().iter().map(|c| c.cell_key(i)).collect::<Vec<u64>>()))
        .collect();
    let deduped = if keep.len() == t.n_rows() {
        t.clone()
    } else {
        t.take_rows(&keep)
    };
    rename(&deduped)
}

fn rename(t: &Table) -> Result<Table> {
    let names = clean_names(&t.names());
    let cols = t
        .columns()
        .iter()
        .zip(names)
        .map(|(c, n)| c.clone().renamed(n))
        .collect();
    Table::new(t.name(), cols)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceColumn {
    pub name: String,
    pub kind: ColumnKind,
}

/// Fitted preparation state. Every statistic comes from the fitting table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepPipeline {
    pub format_version: u32,
    pub config: PrepConfig,
    pub target: String,
    pub positive_label: String,
    pub negative_label: String,
    /// Feature columns read from the input, after name cleaning.
    pub sources: Vec<SourceColumn>,
    pub impute: ImputeMap,
    pub mar: Option<MarReport>,
    pub outliers: OutlierSpec,
    pub dates: Vec<DateSpec>,
    pub interactions: Vec<Interaction>,
    pub encodings: Vec<Encoding>,
    /// Every engineered column offered to selection, in order.
    pub candidates: Vec<String>,
    pub selected: Vec<String>,
    pub rejections: Vec<Rejection>,
}

/// Fits every stage on `train`. `schema` must describe `train`'s columns.
pub fn fit_prep(train: &Table, schema: &Schema, cfg: &PrepConfig) -> Result<PrepPipeline> {
    cfg.validate()?;
    // Kinds inferred over the whole input could depend on held-out cells.
    let train = &train.retyped();
    let raw_target = train.resolve(&schema.target)?.name();
    let cleaned = rename(train)?;
    let mut target = None;
    let mut feature_names = Vec::new();
    for (raw, col) in train.columns().iter().zip(cleaned.columns()) {
        if raw.name() == raw_target {
            target = Some(col.name());
        } else if schema.role(raw.name()) == Some(Role::Feature) {
            feature_names.push(col.name());
        }
    }
    let target = target.ok_or_else(|| Error::UnknownColumn(schema.target.clone()))?;
    let labels = schema.labels(train)?;
    let features = cleaned.select(&feature_names)?;

    let impute = impute::fit_impute(&features, cfg.missimpute);
    let mut rejections: Vec<Rejection> = impute
        .all_missing
        .iter()
        .map(|n| Rejection::new(n, RejectReason::AllMissing))
        .collect();
    let sources: Vec<SourceColumn> = features
        .columns()
        .iter()
        .filter(|c| !impute.all_missing.iter().any(|m| m == c.name()))
        .map(|c| SourceColumn {
            name: c.name().into(),
            kind: c.kind(),
        })
        .collect();
    let source_names: Vec<&str> = sources.iter().map(|s| s.name.as_str()).collect();
    let base = features.select(&source_names)?;

    let mar = if cfg.auto_mar {
        Some(mar::scan(&base, &cfg.mar)?)
    } else {
        None
    };

    let t = impute::apply_impute(&base, &impute)?;
    let outliers = if cfg.outlier_flag {
        outliers::fit_outliers(&t)
    } else {
        OutlierSpec::default()
    };
    let t = outliers::apply_outliers(&t, &outliers)?;
    let dates = engineer::fit_dates(&t);
    let t = engineer::apply_dates(&t, &dates)?;
    let numeric: Vec<&str> = sources
        .iter()
        .filter(|s| s.kind == ColumnKind::Numeric)
        .map(|s| s.name.as_str())
        .collect();
    let interactions = engineer::fit_interactions(&t, &numeric, cfg.max_interactions);
    let t = engineer::apply_interactions(&t, &interactions)?;
    let (encodings, wide) = encode::fit_encoding(&t, cfg.dummyvar, cfg.char_var_limit);
    rejections.extend(wide);

    let mut pipeline = PrepPipeline {
        format_version: FORMAT_VERSION,
        config: cfg.clone(),
        target: target.into(),
        positive_label: schema.positive_label.clone(),
        negative_label: schema.negative_label.clone(),
        sources,
        impute,
        mar,
        outliers,
        dates,
        interactions,
        encodings,
        candidates: Vec::new(),
        selected: Vec::new(),
        rejections,
    };

    // Indicator names must not clash with any engineered column.
    let engineered = pipeline.engineer(&base)?;
    if let Some(report) = pipeline.mar.as_mut() {
        let mut taken: BTreeSet<String> = engineered.names().into_iter().map(String::from).collect();
        for f in report.findings.iter_mut() {
            if let Some(name) = f.indicator.as_mut() {
                *name = fresh_name(&format!("{}_mar", f.feature), &taken);
                taken.insert(name.clone());
            }
        }
    }
    let candidates = pipeline.with_indicators(engineered, &base)?;
    pipeline.candidates = candidates.names().into_iter().map(String::from).collect();
    let selection = select::select_features(&candidates, &labels, cfg.corr, cfg.aucv)?;
    pipeline.selected = selection.selected;
    pipeline.rejections.extend(selection.rejections);
    Ok(pipeline)
}

impl PrepPipeline {
    /// Stages 4 to 8 on the coerced source table.
    fn engineer(&self, base: &Table) -> Result<Table> {
        let t = impute::apply_impute(base, &self.impute)?;
        let t = outliers::apply_outliers(&t, &self.outliers)?;
        let t = engineer::apply_dates(&t, &self.dates)?;
        let t = engineer::apply_interactions(&t, &self.interactions)?;
        let wide: Vec<&str> = self
            .rejections
            .iter()
            .filter(|r| matches!(r.reason, RejectReason::HighCardinality { .. }))
            .map(|r| r.feature.as_str())
            .collect();
        let kept: Vec<Column> = t
            .into_columns()
            .into_iter()
            .filter(|c| !wide.contains(&c.name()))
            .collect();
        encode::apply_encoding(&Table::new(base.name(), kept)?, &self.encodings)
    }

    fn with_indicators(&self, t: Table, base: &Table) -> Result<Table> {
        match &self.mar {
            Some(report) => mar::append_indicators(&t, base, report),
            None => Ok(t),
        }
    }

    /// Names of the output feature columns, in order.
    pub fn features(&self) -> &[String] {
        &self.selected
    }

    /// Replays the fitted stages on `t`. The output holds the selected
    /// features, then the target as a 0/1 column when `t` has it.
    pub fn apply(&self, t: &Table) -> Result<Table> {
        let t = rename(t)?;
        let base = self
            .sources
            .iter()
            .map(|s| {
                t.column(&s.name)
                    .map(|c| c.clone().coerce(s.kind))
                    .ok_or_else(|| Error::UnknownColumn(s.name.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let base = Table::new(t.name(), base)?;
        let full = self.with_indicators(self.engineer(&base)?, &base)?;
        let names: Vec<&str> = self.selected.iter().map(String::as_str).collect();
        let mut out = full.select(&names)?;
        if let Some(target) = t.column(&self.target) {
            let y = (0..target.len())
                .map(|i| match target.text(i) {
                    Some(s) => Ok(Some(if s == self.positive_label { 1.0 } else { 0.0 })),
                    None => Err(Error::TargetHasMissing(self.target.clone())),
                })
                .collect::<Result<Vec<_>>>()?;
            out = out.with_column(Column::numeric(self.target.as_str(), y))?;
        }
        Ok(out)
    }

    /// Features and labels of a table produced by [`PrepPipeline::apply`].
    pub fn dataset(&self, prepared: &Table) -> Result<Dataset> {
        let names: Vec<&str> = self.selected.iter().map(String::as_str).collect();
        let x = feature_matrix(prepared, &names)?;
        let target = prepared
            .column(&self.target)
            .ok_or_else(|| Error::UnknownColumn(self.target.clone()))?;
        let y = (0..target.len())
            .map(|i| u8::from(target.value(i) == Some(1.0)))
            .collect();
        Dataset::new(self.selected.clone(), x, y)
    }
}

pub fn apply_prep(pipeline: &PrepPipeline, t: &Table) -> Result<Table> {
    pipeline.apply(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{infer_schema, MissingTokens, SchemaOptions};
    use alloc::string::ToString;
    use alloc::vec;
    use alloc::vec::Vec;

    fn table(header: &[&str], rows: &[Vec<&str>]) -> Table {
        let rows: Vec<Vec<&str>> = rows.to_vec();
        Table::from_text("t", header, &rows, &MissingTokens::default()).unwrap()
    }

    #[test]
    fn clean_dedupes_and_renames() {
        let t = table(&["Max HR", "max-hr"], &[vec!["1", "2"], vec!["1", "2"], vec!["3", "4"]]);
        let c = clean(&t).unwrap();
        assert_eq!(c.n_rows(), 2);
        assert_eq!(c.names(), vec!["max_hr", "max_hr_2"]);
        let tidy = table(&["a"], &[vec!["1"], vec!["2"]]);
        assert_eq!(clean(&tidy).unwrap(), tidy);
    }

    #[test]
    fn config_ranges() {
        let cfg = PrepConfig {
            corr: 1.5,
            ..PrepConfig::default()
        };
        assert_eq!(
            cfg.validate().unwrap_err().to_string(),
            "invalid configuration: corr must be in (0,1]"
        );
    }

    #[test]
    fn end_to_end_small() {
        let rows: Vec<Vec<String>> = (0..40)
            .map(|i| {
                let x = if i % 7 == 0 {
                    String::from("NA")
                } else {
                    format!("{}", i)
                };
                let c = String::from(["a", "b", "c"][i % 3]);
                let y = String::from(if i >= 20 { "yes" } else { "no" });
                vec![x, c, format!("2020-01-{:02}", 1 + i % 28), y]
            })
            .collect();
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        let t = table(&["X", "Cat", "When", "Y"], &rows);
        let schema = infer_schema(&t, &SchemaOptions::new("Y")).unwrap();
        assert_eq!(schema.positive_label, "yes");
        let p = fit_prep(&t, &schema, &PrepConfig::default()).unwrap();
        let out = p.apply(&t).unwrap();
        assert_eq!(out.n_cols(), p.selected.len() + 1);
        assert!(out.columns().iter().all(|c| c.missing_count() == 0));
        assert!(out
            .columns()
            .iter()
            .all(|c| matches!(c.kind(), ColumnKind::Numeric | ColumnKind::Boolean)));
        let mut accounted: Vec<&str> = p.selected.iter().map(String::as_str).collect();
        accounted.extend(p.rejections.iter().map(|r| r.feature.as_str()));
        for c in &p.candidates {
            assert!(accounted.contains(&c.as_str()), "{c} unaccounted");
        }
        let d = p.dataset(&out).unwrap();
        assert_eq!(d.n_positive(), 20);

        let missing = table(&["X"], &[vec!["1"]]);
        assert!(matches!(p.apply(&missing), Err(Error::UnknownColumn(_))));
    }
}
