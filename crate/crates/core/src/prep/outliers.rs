//! Tukey-fence outlier flags with 5th/95th percentile capping.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;
use crate::table::{Column, ColumnKind, Table};

use super::fresh_name;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierBounds {
    pub column: String,
    pub flag: String,
    pub lower_fence: f64,
    pub upper_fence: f64,
    pub cap_low: f64,
    pub cap_high: f64,
}

impl OutlierBounds {
    /// Fences at `Q1 - 1.5 IQR` and `Q3 + 1.5 IQR`; caps at the 5th and 95th
    /// percentiles. `None` for an empty slice.
    pub fn from_values(column: &str, flag: &str, values: &[f64]) -> Option<Self> {
        let s = stats::sorted_copy(values);
        let q1 = stats::quantile_sorted(&s, 0.25)?;
        let q3 = stats::quantile_sorted(&s, 0.75)?;
        let iqr = q3 - q1;
        Some(OutlierBounds {
            column: column.into(),
            flag: flag.into(),
            lower_fence: q1 - 1.5 * iqr,
            upper_fence: q3 + 1.5 * iqr,
            cap_low: stats::quantile_sorted(&s, 0.05)?,
            cap_high: stats::quantile_sorted(&s, 0.95)?,
        })
    }

    pub fn is_outlier(&self, v: f64) -> bool {
        v < self.lower_fence || v > self.upper_fence
    }

    pub fn cap(&self, v: f64) -> f64 {
        if v < self.lower_fence {
            self.cap_low
        } else if v > self.upper_fence {
            self.cap_high
        } else {
            v
        }
    }
}

/// Bounds of the columns that have at least one outlier in `train`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutlierSpec {
    pub bounds: Vec<OutlierBounds>,
}

/// Numeric columns with two or fewer distinct values are indicator-like and
/// are left alone.
pub fn fit_outliers(train: &Table) -> OutlierSpec {
    let mut taken: BTreeSet<String> = train.names().into_iter().map(String::from).collect();
    let mut bounds = Vec::new();
    for col in train.columns() {
        if col.kind() != ColumnKind::Numeric {
            continue;
        }
        let values: Vec<f64> = (0..col.len()).filter_map(|i| col.value(i)).collect();
        if stats::count_distinct(&values) <= 2 {
            continue;
        }
        let flag = fresh_name(&format!("{}_out_flag", col.name()), &taken);
        let Some(b) = OutlierBounds::from_values(col.name(), &flag, &values) else {
            continue;
        };
        if values.iter().any(|&v| b.is_outlier(v)) {
            taken.insert(flag);
            bounds.push(b);
        }
    }
    OutlierSpec { bounds }
}

/// Caps the bounded columns in place and appends one Boolean flag column per
/// bounded column. Missing cells stay missing and are not flagged.
pub fn apply_outliers(t: &Table, spec: &OutlierSpec) -> Result<Table> {
    let mut cols: Vec<Column> = t.columns().to_vec();
    let mut flags = Vec::with_capacity(spec.bounds.len());
    for b in &spec.bounds {
        let j = t
            .column_index(&b.column)
            .ok_or_else(|| Error::UnknownColumn(b.column.clone()))?;
        let col = &cols[j];
        let n = col.len();
        let values: Vec<Option<f64>> = (0..n).map(|i| col.value(i)).collect();
        flags.push(Column::boolean(
            b.flag.as_str(),
            values
                .iter()
                .map(|v| Some(v.is_some_and(|v| b.is_outlier(v))))
                .collect(),
        ));
        cols[j] = Column::numeric(b.column.as_str(), values.iter().map(|v| v.map(|v| b.cap(v))).collect());
    }
    cols.extend(flags);
    Table::new(t.name(), cols)
}
