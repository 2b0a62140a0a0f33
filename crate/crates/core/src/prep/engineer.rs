//! Date decomposition and pairwise products of numeric features.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::date;
use crate::error::{Error, Result};
use crate::table::{Column, ColumnData, ColumnKind, Table};

use super::fresh_name;

/// A date column and the names of its five derived columns: year, month,
/// day, weekday (1 = Monday) and days since 1970-01-01.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DateSpec {
    pub column: String,
    pub outputs: [String; 5],
}

pub const DATE_PARTS: [&str; 5] = ["year", "month", "day", "weekday", "epoch_days"];

pub fn fit_dates(t: &Table) -> Vec<DateSpec> {
    let mut taken: BTreeSet<String> = t.names().into_iter().map(String::from).collect();
    t.columns()
        .iter()
        .filter(|c| c.kind() == ColumnKind::Date)
        .map(|c| {
            let outputs = DATE_PARTS.map(|part| {
                let name = fresh_name(&format!("{}_{part}", c.name()), &taken);
                taken.insert(name.clone());
                name
            });
            DateSpec {
                column: c.name().into(),
                outputs,
            }
        })
        .collect()
}

fn date_parts(days: i32) -> [f64; 5] {
    let (y, m, d) = date::civil_from_days(days);
    [
        f64::from(y),
        f64::from(m),
        f64::from(d),
        f64::from(date::weekday(days)),
        f64::from(days),
    ]
}

/// Replaces each listed date column, in place, by its five numeric parts.
pub fn apply_dates(t: &Table, specs: &[DateSpec]) -> Result<Table> {
    for s in specs {
        if t.column(&s.column).is_none() {
            return Err(Error::UnknownColumn(s.column.clone()));
        }
    }
    let mut cols = Vec::with_capacity(t.n_cols() + 4 * specs.len());
    for col in t.columns() {
        let Some(spec) = specs.iter().find(|s| s.column == col.name()) else {
            cols.push(col.clone());
            continue;
        };
        let ColumnData::Date(days) = col.data() else {
            return Err(Error::InvalidConfig(format!("`{}` is not a date column", col.name())));
        };
        let parts: Vec<Option<[f64; 5]>> = days
            .iter()
            .enumerate()
            .map(|(i, &d)| (!col.is_missing(i)).then(|| date_parts(d)))
            .collect();
        for (k, name) in spec.outputs.iter().enumerate() {
            cols.push(Column::numeric(
                name.as_str(),
                parts.iter().map(|p| p.map(|p| p[k])).collect(),
            ));
        }
    }
    Table::new(t.name(), cols)
}

/// Expands every date column of `t`.
pub fn engineer_dates(t: &Table) -> Result<Table> {
    apply_dates(t, &fit_dates(t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub left: String,
    pub right: String,
    pub name: String,
}

/// Unordered pairs of `sources` in column order, `(0,1), (0,2), ..., (1,2),
/// ...`, stopping after `max_pairs`.
pub fn fit_interactions(t: &Table, sources: &[&str], max_pairs: usize) -> Vec<Interaction> {
    let mut taken: BTreeSet<String> = t.names().into_iter().map(String::from).collect();
    let mut out = Vec::new();
    'outer: for (i, a) in sources.iter().enumerate() {
        for b in &sources[i + 1..] {
            if out.len() >= max_pairs {
                break 'outer;
            }
            let name = fresh_name(&format!("{a}_x_{b}"), &taken);
            taken.insert(name.clone());
            out.push(Interaction {
                left: String::from(*a),
                right: String::from(*b),
                name,
            });
        }
    }
    out
}

/// Appends one product column per interaction; a missing factor gives a
/// missing product.
pub fn apply_interactions(t: &Table, pairs: &[Interaction]) -> Result<Table> {
    let mut cols = t.columns().to_vec();
    for p in pairs {
        let a = t.column(&p.left).ok_or_else(|| Error::UnknownColumn(p.left.clone()))?;
        let b = t
            .column(&p.right)
            .ok_or_else(|| Error::UnknownColumn(p.right.clone()))?;
        let values = (0..t.n_rows()).map(|i| Some(a.value(i)? * b.value(i)?)).collect();
        cols.push(Column::numeric(p.name.as_str(), values));
    }
    Table::new(t.name(), cols)
}

/// Products of every pair of numeric columns of `t`.
pub fn engineer_interactions(t: &Table, max_pairs: usize) -> Result<Table> {
    let sources: Vec<&str> = t
        .columns()
        .iter()
        .filter(|c| c.kind() == ColumnKind::Numeric)
        .map(Column::name)
        .collect();
    apply_interactions(t, &fit_interactions(t, &sources, max_pairs))
}
