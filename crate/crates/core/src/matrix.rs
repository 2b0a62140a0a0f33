//! Dense row-major matrices and labelled datasets for the learners.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::table::{ColumnKind, Schema, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch(data.len(), rows * cols));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: alloc::vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from equal-length columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(c) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::LengthMismatch(c.len(), rows));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            data.extend(columns.iter().map(|c| c[i]));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch(r.len(), cols));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn without_column(&self, drop: usize) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * (self.cols - 1));
        for i in 0..self.rows {
            let r = self.row(i);
            data.extend_from_slice(&r[..drop]);
            data.extend_from_slice(&r[drop + 1..]);
        }
        Matrix {
            rows: self.rows,
            cols: self.cols - 1,
            data,
        }
    }
}

/// Feature matrix, 0/1 labels and the feature names in column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<String>,
    pub x: Matrix,
    pub y: Vec<u8>,
}

impl Dataset {
    pub fn new(features: Vec<String>, x: Matrix, y: Vec<u8>) -> Result<Self> {
        if features.len() != x.cols() {
            return Err(Error::FeatureCount {
                expected: features.len(),
                found: x.cols(),
            });
        }
        if y.len() != x.rows() {
            return Err(Error::LengthMismatch(y.len(), x.rows()));
        }
        Ok(Dataset { features, x, y })
    }

    /// Every non-target column of a prepared table becomes a feature.
    /// Columns must be numeric or boolean with no missing cells.
    pub fn from_table(t: &Table, schema: &Schema) -> Result<Self> {
        let names: Vec<&str> = t.names().into_iter().filter(|n| *n != schema.target).collect();
        let x = feature_matrix(t, &names)?;
        let y = schema.labels(t)?;
        Dataset::new(names.iter().map(|s| s.to_string()).collect(), x, y)
    }

    pub fn n_rows(&self) -> usize {
        self.x.rows()
    }

    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            features: self.features.clone(),
            x: self.x.select_rows(rows),
            y: rows.iter().map(|&r| self.y[r]).collect(),
        }
    }

    pub fn n_positive(&self) -> usize {
        self.y.iter().filter(|&&l| l == 1).count()
    }
}

/// Matrix of the named columns, in the given order.
pub fn feature_matrix(t: &Table, names: &[&str]) -> Result<Matrix> {
    let mut columns = Vec::with_capacity(names.len());
    for name in names {
        let col = t.column(name).ok_or_else(|| Error::UnknownColumn(name.to_string()))?;
        if !matches!(col.kind(), ColumnKind::Numeric | ColumnKind::Boolean) {
            return Err(Error::NotNumeric(name.to_string()));
        }
        if col.missing_count() > 0 {
            return Err(Error::HasMissing(name.to_string()));
        }
        columns.push(col.to_f64().unwrap_or_default());
    }
    let mut m = Matrix::from_columns(&columns)?;
    if names.is_empty() {
        m.rows = t.n_rows();
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn layout() {
        let m = Matrix::from_columns(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.row(1), &[2.0, 4.0]);
        assert_eq!(m.column(1), vec![3.0, 4.0]);
        assert_eq!(m.without_column(0).row(0), &[3.0]);
        assert_eq!(m.select_rows(&[1]).row(0), &[2.0, 4.0]);
    }
}
