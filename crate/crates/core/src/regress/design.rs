use chrono::NaiveDate;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Label of the explicit intercept column.
pub const INTERCEPT: &str = "const";

/// Regressor matrix with row dates, column labels and per-row weights.
///
/// Rows must be in time order: the HAC estimator pairs rows by position.
/// Optional group ids (election cycles) keep HAC lag products from crossing
/// group boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: Vec<NaiveDate>,
    labels: Vec<String>,
    values: DMatrix<f64>,
    weights: Vec<f64>,
    groups: Option<Vec<i32>>,
}

impl DesignMatrix {
    pub fn new(
        rows: Vec<NaiveDate>,
        labels: Vec<String>,
        values: DMatrix<f64>,
        weights: Vec<f64>,
        groups: Option<Vec<i32>>,
    ) -> Result<Self> {
        let (n, p) = values.shape();
        if rows.len() != n || weights.len() != n || labels.len() != p {
            return Err(Error::Dimension(format!(
                "design {n}x{p} with {} row keys, {} weights, {} labels",
                rows.len(),
                weights.len(),
                labels.len()
            )));
        }
        if let Some(g) = &groups {
            if g.len() != n {
                return Err(Error::Dimension(format!("{} group ids for {n} rows", g.len())));
            }
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidConfig(format!("duplicate column label {l:?}")));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("design contains non-finite entries".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidConfig("weights must be finite and non-negative".into()));
        }
        if n > 0 && !weights.iter().any(|w| *w > 0.0) {
            return Err(Error::InvalidConfig("at least one weight must be positive".into()));
        }
        Ok(Self {
            rows,
            labels,
            values,
            weights,
            groups,
        })
    }

    /// Builds from row-major data with unit weights.
    pub fn from_rows(rows: Vec<NaiveDate>, labels: Vec<String>, data: &[Vec<f64>]) -> Result<Self> {
        let p = labels.len();
        let n = data.len();
        if data.iter().any(|r| r.len() != p) {
            return Err(Error::Dimension("ragged design rows".into()));
        }
        let values = DMatrix::from_fn(n, p, |i, j| data[i][j]);
        Self::new(rows, labels, values, vec![1.0; n], None)
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        self.weights = weights;
        Self::new(self.rows, self.labels, self.values, self.weights, self.groups)
    }

    pub fn with_groups(mut self, groups: Option<Vec<i32>>) -> Result<Self> {
        self.groups = groups;
        Self::new(self.rows, self.labels, self.values, self.weights, self.groups)
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn rows(&self) -> &[NaiveDate] {
        &self.rows
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn groups(&self) -> Option<&[i32]> {
        self.groups.as_deref()
    }

    pub fn column_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn has_intercept(&self) -> bool {
        self.column_index(INTERCEPT).is_some()
    }

    /// Rows with strictly positive weight.
    pub fn active_rows(&self) -> Vec<usize> {
        (0..self.nrows()).filter(|&i| self.weights[i] > 0.0).collect()
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let values = self.values.select_columns(cols);
        let labels = cols.iter().map(|&j| self.labels[j].clone()).collect();
        Self::new(self.rows.clone(), labels, values, self.weights.clone(), self.groups.clone())
    }

    /// Same design with the listed columns replaced.
    pub(crate) fn replace_columns(&self, cols: &[usize], new: &DMatrix<f64>) -> Result<Self> {
        let mut values = self.values.clone();
        for (k, &j) in cols.iter().enumerate() {
            values.set_column(j, &new.column(k));
        }
        Self::new(self.rows.clone(), self.labels.clone(), values, self.weights.clone(), self.groups.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(i: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, i).unwrap()
    }

    #[test]
    fn rejects_bad_designs() {
        let labels = vec!["const".to_string(), "x".to_string()];
        let data = vec![vec![1.0, 2.0], vec![1.0, 3.0]];
        let ok = DesignMatrix::from_rows(vec![day(1), day(2)], labels.clone(), &data).unwrap();
        assert!(ok.has_intercept());
        assert!(ok.clone().with_weights(vec![0.0, 0.0]).is_err());
        assert!(ok.clone().with_weights(vec![1.0, -1.0]).is_err());
        assert!(DesignMatrix::from_rows(vec![day(1), day(2)], vec!["a".into(), "a".into()], &data).is_err());
        assert!(DesignMatrix::from_rows(vec![day(1)], labels, &data).is_err());
    }
}
