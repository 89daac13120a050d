use std::collections::HashSet;

use nalgebra::DMatrix;

use super::StatsError;

/// `N × p` sample matrix: rows are i.i.d. samples, columns are named
/// scalar variables.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
    column_names: Vec<String>,
}

impl DataMatrix {
    pub fn new(values: DMatrix<f64>, column_names: Vec<String>) -> Result<Self, StatsError> {
        if values.nrows() < 2 {
            return Err(StatsError::InsufficientSamples {
                samples: values.nrows(),
                required: 2,
            });
        }
        if column_names.len() != values.ncols() {
            return Err(StatsError::InvalidInput(format!(
                "{} column names for {} columns",
                column_names.len(),
                values.ncols()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = column_names.iter().find(|name| !seen.insert(name.as_str())) {
            return Err(StatsError::InvalidInput(format!(
                "duplicate column name {dup:?}"
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (row, col) = (pos % values.nrows(), pos / values.nrows());
            return Err(StatsError::InvalidInput(format!(
                "non-finite value at row {row}, column {col}"
            )));
        }
        Ok(Self {
            values,
            column_names,
        })
    }

    /// Columns named `c0, c1, ...`.
    pub fn unnamed(values: DMatrix<f64>) -> Result<Self, StatsError> {
        let names = (0..values.ncols()).map(|j| format!("c{j}")).collect();
        Self::new(values, names)
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_columns(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    /// Copies the listed columns into a new `N × k` matrix.
    pub fn select(&self, columns: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_samples(), columns.len(), |r, c| {
            self.values[(r, columns[c])]
        })
    }

    pub(crate) fn check_columns(&self, columns: &[usize]) -> Result<(), StatsError> {
        match columns.iter().find(|&&c| c >= self.n_columns()) {
            Some(c) => Err(StatsError::InvalidInput(format!(
                "column {c} out of range for {} columns",
                self.n_columns()
            ))),
            None => Ok(()),
        }
    }

    /// Unbiased sample covariance of all columns.
    pub fn covariance(&self) -> DMatrix<f64> {
        let n = self.n_samples();
        let means = self.values.row_mean();
        let mut centered = self.values.clone();
        for mut row in centered.row_iter_mut() {
            row -= &means;
        }
        (centered.transpose() * &centered) / (n as f64 - 1.0)
    }
}
