//! Median/mode imputation fitted on the training table.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;
use crate::table::{Column, ColumnData, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Imputation {
    /// Median for numeric columns, mode for everything else.
    #[default]
    MeanMedian,
    /// Mode for every column.
    ModeOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum FillValue {
    Number(f64),
    Level(String),
    Flag(bool),
    Day(i32),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ImputeMap {
    /// Fill value per column, in table order.
    pub fills: Vec<(String, FillValue)>,
    /// Columns with no present cell in the fitting table.
    pub all_missing: Vec<String>,
}

/// Most frequent key; ties go to the smallest key.
fn mode<K: Ord + Clone>(keys: impl Iterator<Item = K>) -> Option<K> {
    let mut counts: BTreeMap<K, usize> = BTreeMap::new();
    for k in keys {
        *counts.entry(k).or_insert(0) += 1;
    }
    let mut best: Option<(K, usize)> = None;
    for (k, c) in counts {
        if best.as_ref().is_none_or(|(_, bc)| c > *bc) {
            best = Some((k, c));
        }
    }
    best.map(|(k, _)| k)
}

/// `f64` keyed by total order, for mode counting.
#[derive(Clone, Copy, PartialEq)]
struct Total(f64);
impl Eq for Total {}
impl PartialOrd for Total {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Total {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Fill value of one column, `None` when it has no present cell.
pub fn fill_value(col: &Column, method: Imputation) -> Option<FillValue> {
    let present = (0..col.len()).filter(|&i| !col.is_missing(i));
    match col.data() {
        ColumnData::Numeric(v) => match method {
            Imputation::MeanMedian => {
                let vals: Vec<f64> = present.map(|i| v[i]).collect();
                stats::median(&vals).map(FillValue::Number)
            }
            Imputation::ModeOnly => mode(present.map(|i| Total(v[i]))).map(|t| FillValue::Number(t.0)),
        },
        ColumnData::Categorical { codes, levels } => {
            mode(present.map(|i| levels[codes[i] as usize].as_str())).map(|s| FillValue::Level(s.to_string()))
        }
        ColumnData::Boolean(v) => mode(present.map(|i| v[i])).map(FillValue::Flag),
        ColumnData::Date(v) => mode(present.map(|i| v[i])).map(FillValue::Day),
    }
}

pub fn fit_impute(train: &Table, method: Imputation) -> ImputeMap {
    let mut map = ImputeMap::default();
    for col in train.columns() {
        match fill_value(col, method) {
            Some(v) => map.fills.push((col.name().to_string(), v)),
            None => map.all_missing.push(col.name().to_string()),
        }
    }
    map
}

/// Copy of `col` with missing cells replaced by `fill`.
pub fn fill_column(col: &Column, fill: &FillValue) -> Result<Column> {
    if col.missing_count() == 0 {
        return Ok(col.clone());
    }
    let name = col.name();
    let n = col.len();
    let mismatch = || Error::InvalidConfig(alloc::format!("fill value for `{name}` does not match its kind"));
    Ok(match (col.data(), fill) {
        (ColumnData::Numeric(v), FillValue::Number(f)) => Column::from_f64(
            name,
            (0..n).map(|i| if col.is_missing(i) { *f } else { v[i] }).collect(),
        ),
        (ColumnData::Categorical { .. }, FillValue::Level(s)) => {
            let cells: Vec<Option<&str>> = (0..n).map(|i| Some(col.level(i).unwrap_or(s.as_str()))).collect();
            Column::categorical(name, &cells)
        }
        (ColumnData::Boolean(v), FillValue::Flag(f)) => Column::boolean(
            name,
            (0..n)
                .map(|i| Some(if col.is_missing(i) { *f } else { v[i] }))
                .collect(),
        ),
        (ColumnData::Date(v), FillValue::Day(d)) => Column::date(
            name,
            (0..n)
                .map(|i| Some(if col.is_missing(i) { *d } else { v[i] }))
                .collect(),
        ),
        _ => return Err(mismatch()),
    })
}

/// Fills every column named in `map`; other columns pass through.
pub fn apply_impute(t: &Table, map: &ImputeMap) -> Result<Table> {
    let cols = t
        .columns()
        .iter()
        .map(|c| match map.fills.iter().find(|(n, _)| n == c.name()) {
            Some((_, f)) => fill_column(c, f),
            None => Ok(c.clone()),
        })
        .collect::<Result<Vec<_>>>()?;
    Table::new(t.name(), cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn median_and_mode() {
        let num = Column::numeric("x", vec![Some(1.0), Some(2.0), None, Some(100.0)]);
        assert_eq!(fill_value(&num, Imputation::MeanMedian), Some(FillValue::Number(2.0)));
        let cat = Column::categorical("c", &[Some("b"), Some("a"), Some("a"), None]);
        assert_eq!(
            fill_value(&cat, Imputation::MeanMedian),
            Some(FillValue::Level("a".into()))
        );
        let tie = Column::categorical("c", &[Some("b"), Some("a")]);
        assert_eq!(
            fill_value(&tie, Imputation::MeanMedian),
            Some(FillValue::Level("a".into()))
        );
        let none = Column::numeric("z", vec![None, None]);
        assert_eq!(fill_value(&none, Imputation::MeanMedian), None);
        let modal = Column::from_f64("m", vec![3.0, 1.0, 3.0, 9.0]);
        assert_eq!(fill_value(&modal, Imputation::ModeOnly), Some(FillValue::Number(3.0)));
    }

    #[test]
    fn fills_missing_cells_only() {
        let t = Table::new(
            "t",
            vec![
                Column::numeric("x", vec![Some(1.0), None, Some(3.0)]),
                Column::categorical("c", &[None, Some("q"), Some("q")]),
                Column::numeric("z", vec![None, None, None]),
            ],
        )
        .unwrap();
        let map = fit_impute(&t, Imputation::MeanMedian);
        assert_eq!(map.all_missing, vec![String::from("z")]);
        let out = apply_impute(&t, &map).unwrap();
        assert_eq!(out.column("x").unwrap().numeric_values().unwrap(), &[1.0, 2.0, 3.0]);
        assert_eq!(out.column("c").unwrap().level(0), Some("q"));
        assert_eq!(out.column("z").unwrap().missing_count(), 3);
    }
}
