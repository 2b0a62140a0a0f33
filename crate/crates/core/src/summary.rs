//! Per-column descriptive statistics.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::stats;
use crate::table::{ColumnKind, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericSummary {
    pub mean: f64,
    /// Sample standard deviation; 0 below two values.
    pub sd: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub levels: usize,
    /// Up to five most frequent levels, ties in ascending level order.
    pub top: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub name: String,
    pub kind: ColumnKind,
    pub n: usize,
    pub missing: usize,
    pub missing_fraction: f64,
    pub numeric: Option<NumericSummary>,
    pub levels: Option<LevelSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveSummary {
    pub n_rows: usize,
    pub columns: Vec<ColumnSummary>,
}

/// One record per column, in column order. Numeric and date columns get
/// numeric statistics (dates in days since 1970-01-01); categorical and
/// boolean columns get level counts.
pub fn describe(t: &Table) -> DescriptiveSummary {
    let columns = t
        .columns()
        .iter()
        .map(|c| {
            let n = c.len();
            let missing = c.missing_count();
            let (numeric, levels) = match c.kind() {
                ColumnKind::Numeric | ColumnKind::Date => {
                    let vals: Vec<f64> = (0..n).filter_map(|i| c.value(i)).collect();
                    let s = stats::sorted_copy(&vals);
                    let q = |p| stats::quantile_sorted(&s, p);
                    let numeric = match (stats::mean(&vals), q(0.0), q(0.25), q(0.5), q(0.75), q(1.0)) {
                        (Some(mean), Some(min), Some(q1), Some(median), Some(q3), Some(max)) => Some(NumericSummary {
                            mean,
                            sd: stats::sample_sd(&vals).unwrap_or(0.0),
                            min,
                            q1,
                            median,
                            q3,
                            max,
                        }),
                        _ => None,
                    };
                    (numeric, None)
                }
                ColumnKind::Categorical | ColumnKind::Boolean => {
                    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
                    for i in 0..n {
                        if let Some(s) = c.text(i) {
                            *counts.entry(s).or_insert(0) += 1;
                        }
                    }
                    let levels = counts.len();
                    let mut top: Vec<(String, usize)> = counts.into_iter().collect();
                    top.sort_by_key(|t| core::cmp::Reverse(t.1));
                    top.truncate(5);
                    (None, Some(LevelSummary { levels, top }))
                }
            };
            ColumnSummary {
                name: c.name().into(),
                kind: c.kind(),
                n,
                missing,
                missing_fraction: if n == 0 { 0.0 } else { missing as f64 / n as f64 },
                numeric,
                levels,
            }
        })
        .collect();
    DescriptiveSummary {
        n_rows: t.n_rows(),
        columns,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Column;
    use alloc::vec;

    #[test]
    fn numeric_and_missing() {
        let mut cells = vec![Some(1.0), Some(2.0), Some(3.0)];
        cells.extend([None; 3]);
        cells.extend([Some(2.0); 4]);
        let t = Table::new("t", vec![Column::from_f64("a", vec![1.0, 2.0, 3.0])]).unwrap();
        let s = describe(&t);
        let a = s.columns[0].numeric.as_ref().unwrap();
        assert_eq!((a.mean, a.median, a.sd), (2.0, 2.0, 1.0));
        let m = describe(&Table::new("m", vec![Column::numeric("x", cells)]).unwrap());
        assert!((m.columns[0].missing_fraction - 0.3).abs() < 1e-12);
    }

    #[test]
    fn levels() {
        let t = Table::new(
            "t",
            vec![Column::categorical("c", &[Some("b"), Some("a"), Some("b"), None])],
        )
        .unwrap();
        let s = describe(&t);
        let l = s.columns[0].levels.as_ref().unwrap();
        assert_eq!(l.levels, 2);
        assert_eq!(l.top[0], (String::from("b"), 2));
    }
}
