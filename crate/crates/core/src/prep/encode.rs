//! Categorical encoding: one 0/1 column per training level, or an ordinal
//! code.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{clean_name, Column, ColumnKind, Table};

use super::{fresh_name, RejectReason, Rejection};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Encoding {
    /// `names[k]` is 1 where the cell equals `levels[k]`; an unseen level is
    /// all zeros.
    OneHot {
        column: String,
        levels: Vec<String>,
        names: Vec<String>,
    },
    /// Position of the cell in `levels`, or -1 for an unseen level.
    Ordinal { column: String, levels: Vec<String> },
}

impl Encoding {
    pub fn column(&self) -> &str {
        match self {
            Encoding::OneHot { column, .. } | Encoding::Ordinal { column, .. } => column,
        }
    }
}

/// Encodings for the categorical columns of `train` with at most `limit`
/// levels; wider columns are rejected as high-cardinality.
pub fn fit_encoding(train: &Table, dummyvar: bool, limit: usize) -> (Vec<Encoding>, Vec<Rejection>) {
    let mut taken: BTreeSet<String> = train.names().into_iter().map(String::from).collect();
    let mut encodings = Vec::new();
    let mut rejected = Vec::new();
    for col in train.columns().iter().filter(|c| c.kind() == ColumnKind::Categorical) {
        let levels: Vec<String> = (0..col.len())
            .filter_map(|i| col.level(i))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(String::from)
            .collect();
        if levels.len() > limit {
            rejected.push(Rejection::new(
                col.name(),
                RejectReason::HighCardinality { levels: levels.len() },
            ));
            continue;
        }
        let column = String::from(col.name());
        if dummyvar {
            let names = levels
                .iter()
                .map(|l| {
                    let name = fresh_name(&clean_name(&format!("{column}_{l}")), &taken);
                    taken.insert(name.clone());
                    name
                })
                .collect();
            encodings.push(Encoding::OneHot { column, levels, names });
        } else {
            encodings.push(Encoding::Ordinal { column, levels });
        }
    }
    (encodings, rejected)
}

/// Replaces each encoded column in place. Missing cells encode as all zeros
/// (one-hot) or missing (ordinal).
pub fn apply_encoding(t: &Table, encodings: &[Encoding]) -> Result<Table> {
    for e in encodings {
        if t.column(e.column()).is_none() {
            return Err(Error::UnknownColumn(e.column().into()));
        }
    }
    let mut cols = Vec::with_capacity(t.n_cols());
    for col in t.columns() {
        let Some(enc) = encodings.iter().find(|e| e.column() == col.name()) else {
            cols.push(col.clone());
            continue;
        };
        let text: Vec<Option<String>> = (0..col.len()).map(|i| col.text(i)).collect();
        match enc {
            Encoding::OneHot { levels, names, .. } => {
                for (level, name) in levels.iter().zip(names) {
                    let v = text
                        .iter()
                        .map(|c| Some(c.as_deref() == Some(level.as_str())))
                        .collect();
                    cols.push(Column::boolean(name.as_str(), v));
                }
            }
            Encoding::Ordinal { column, levels } => {
                let v = text
                    .iter()
                    .map(|c| {
                        c.as_ref().map(|s| match levels.binary_search(s) {
                            Ok(k) => k as f64,
                            Err(_) => -1.0,
                        })
                    })
                    .collect();
                cols.push(Column::numeric(column.as_str(), v));
            }
        }
    }
    Table::new(t.name(), cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cat(cells: &[&str]) -> Table {
        let cells: Vec<Option<&str>> = cells.iter().map(|c| Some(*c)).collect();
        Table::new("t", vec![Column::categorical("c", &cells)]).unwrap()
    }

    #[test]
    fn one_hot_rows_and_unseen_level() {
        let train = cat(&["c", "a", "b"]);
        let (enc, rej) = fit_encoding(&train, true, 15);
        assert!(rej.is_empty());
        let out = apply_encoding(&cat(&["b", "z"]), &enc).unwrap();
        assert_eq!(out.names(), vec!["c_a", "c_b", "c_c"]);
        let row = |i| out.columns().iter().map(|c| c.value(i).unwrap()).collect::<Vec<_>>();
        assert_eq!(row(0), vec![0.0, 1.0, 0.0]);
        assert_eq!(row(1), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn ordinal_codes() {
        let (enc, _) = fit_encoding(&cat(&["y", "x"]), false, 15);
        let out = apply_encoding(&cat(&["x", "y", "w"]), &enc).unwrap();
        assert_eq!(out.column("c").unwrap().numeric_values().unwrap(), &[0.0, 1.0, -1.0]);
    }

    #[test]
    fn high_cardinality_rejected() {
        let levels: Vec<String> = (0..16).map(|i| format!("l{i}")).collect();
        let cells: Vec<&str> = levels.iter().map(String::as_str).collect();
        let (enc, rej) = fit_encoding(&cat(&cells), true, 15);
        assert!(enc.is_empty());
        assert_eq!(rej[0].reason, RejectReason::HighCardinality { levels: 16 });
    }
}
