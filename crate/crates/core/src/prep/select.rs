//! Zero-variance, correlation and univariate-AUC feature filters.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::metrics;
use crate::table::{Column, Table};

use super::{RejectReason, Rejection};

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub selected: Vec<String>,
    pub rejections: Vec<Rejection>,
}

fn distinct_present(col: &Column) -> usize {
    let mut seen: Vec<u64> = (0..col.len())
        .filter(|&i| !col.is_missing(i))
        .map(|i| col.cell_key(i))
        .collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Filters the columns of `train` in three passes:
///
/// 1. drop columns with fewer than two distinct present values;
/// 2. scan pairs in column order and drop the later column of any pair with
///    `|r| >= corr`;
/// 3. drop columns whose univariate AUC is within `aucv` of 0.5.
///
/// Every column ends up either selected or in the rejection log.
pub fn select_features(train: &Table, labels: &[u8], corr: f64, aucv: f64) -> Result<Selection> {
    let mut rejections = Vec::new();
    let mut alive: Vec<usize> = Vec::new();
    for (j, col) in train.columns().iter().enumerate() {
        if col.to_f64().is_none() {
            return Err(Error::NotNumeric(col.name().into()));
        }
        if distinct_present(col) < 2 {
            rejections.push(Rejection::new(col.name(), RejectReason::ZeroVariance));
        } else {
            alive.push(j);
        }
    }

    let cols = train.columns();
    let values: Vec<Vec<f64>> = cols.iter().map(|c| c.to_f64().unwrap_or_default()).collect();
    let mut dropped = vec![false; cols.len()];
    for (a, &i) in alive.iter().enumerate() {
        if dropped[i] {
            continue;
        }
        for &j in &alive[a + 1..] {
            if dropped[j] {
                continue;
            }
            let r =
                crate::stats::pearson_pairwise(&values[i], cols[i].missing_mask(), &values[j], cols[j].missing_mask());
            if math::abs(r) >= corr {
                dropped[j] = true;
                rejections.push(Rejection::new(
                    cols[j].name(),
                    RejectReason::HighCorrelation {
                        partner: cols[i].name().into(),
                        r,
                    },
                ));
            }
        }
    }

    let mut selected = Vec::new();
    for &j in alive.iter().filter(|&&j| !dropped[j]) {
        let rows: Vec<usize> = (0..train.n_rows()).filter(|&i| !cols[j].is_missing(i)).collect();
        let scores: Vec<f64> = rows.iter().map(|&i| values[j][i]).collect();
        let y: Vec<u8> = rows.iter().map(|&i| labels[i]).collect();
        let auc = metrics::auc(&scores, &y).unwrap_or(0.5);
        if auc.max(1.0 - auc) - 0.5 < aucv {
            rejections.push(Rejection::new(cols[j].name(), RejectReason::LowAuc { auc }));
        } else {
            selected.push(String::from(cols[j].name()));
        }
    }
    if selected.is_empty() {
        return Err(Error::NoFeaturesSelected);
    }
    Ok(Selection { selected, rejections })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_filters() {
        let y = vec![0, 0, 0, 1, 1, 1];
        let t = Table::new(
            "t",
            vec![
                Column::from_f64("constant", vec![1.0; 6]),
                Column::from_f64("signal", vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
                Column::from_f64("copy", vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0]),
                Column::from_f64("noise", vec![1.0, 2.0, 1.0, 1.0, 2.0, 1.0]),
            ],
        )
        .unwrap();
        let s = select_features(&t, &y, 0.98, 0.002).unwrap();
        assert_eq!(s.selected, vec![String::from("signal")]);
        assert_eq!(s.rejections[0].reason, RejectReason::ZeroVariance);
        assert!(
            matches!(&s.rejections[1].reason, RejectReason::HighCorrelation { partner, .. } if partner == "signal")
        );
        assert_eq!(s.rejections[2].feature, "noise");
        assert_eq!(s.selected.len() + s.rejections.len(), t.n_cols());
    }

    #[test]
    fn nothing_survives() {
        let t = Table::new("t", vec![Column::from_f64("c", vec![0.0; 4])]).unwrap();
        assert!(matches!(
            select_features(&t, &[0, 1, 0, 1], 0.98, 0.002),
            Err(Error::NoFeaturesSelected)
        ));
    }
}
