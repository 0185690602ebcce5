use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column sums must equal one within this tolerance.
pub const STOCHASTIC_TOL: f64 = 1e-8;
/// Entries down to this negative value are accepted and clamped to zero.
pub const NEGATIVE_ENTRY_TOL: f64 = 1e-12;

/// A non-negative `rows x cols` matrix whose columns sum to one.
/// Entry `(j, i)` is the transition probability `p(j | i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct StochasticMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerance(rows, STOCHASTIC_TOL)
    }

    pub fn with_tolerance(rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map(Vec::len).unwrap_or(0);
        if m == 0 || n == 0 {
            return Err(Error::ShapeMismatch("stochastic matrix must be at least 1x1".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(format!("ragged rows: {} vs {}", bad.len(), n)));
        }
        let mut data = Vec::with_capacity(m * n);
        for row in &rows {
            for (i, &x) in row.iter().enumerate() {
                if !x.is_finite() || x < -NEGATIVE_ENTRY_TOL {
                    return Err(Error::NotStochastic { column: i, reason: format!("has entry {x}") });
                }
                data.push(x.max(0.0));
            }
        }
        let out = Self { rows: m, cols: n, data };
        for i in 0..n {
            let s = out.column_sum(i);
            if (s - 1.0).abs() > tol {
                return Err(Error::NotStochastic { column: i, reason: format!("sums to {s}") });
            }
        }
        Ok(out)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for k in 0..n {
            data[k * n + k] = 1.0;
        }
        Self { rows: n, cols: n, data }
    }

    /// A single row of ones: every input merged into one output.
    pub fn merge_all(n: usize) -> Self {
        Self { rows: 1, cols: n, data: vec![1.0; n] }
    }

    /// Deterministic map sending input `i` to output `targets[i]`.
    pub fn from_assignment(rows: usize, targets: &[usize]) -> Result<Self> {
        let cols = targets.len();
        let mut data = vec![0.0; rows * cols];
        for (i, &j) in targets.iter().enumerate() {
            if j >= rows {
                return Err(Error::IndexError(format!("target {j} out of {rows} rows")));
            }
            data[j * cols + i] = 1.0;
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.data[j * self.cols + i]
    }

    pub fn column_sum(&self, i: usize) -> f64 {
        (0..self.rows).map(|j| self.get(j, i)).sum()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.cols..(j + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|j| self.row(j).to_vec()).collect()
    }

    /// `y_j = sum_i P_ji x_i`
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|j| self.row(j).iter().zip(x).map(|(p, v)| p * v).sum())
            .collect())
    }

    /// Largest deviation of a column sum from one.
    pub fn max_column_defect(&self) -> f64 {
        (0..self.cols).map(|i| (self.column_sum(i) - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Submatrix on the given row and column indices (unchecked column sums).
    pub(crate) fn submatrix_raw(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<f64>> {
        rows.iter().map(|&j| cols.iter().map(|&i| self.get(j, i)).collect()).collect()
    }

    /// True when every entry is 0 or 1.
    pub fn is_deterministic(&self, tol: f64) -> bool {
        self.data.iter().all(|&x| x <= tol || (x - 1.0).abs() <= tol)
    }
}

impl TryFrom<Vec<Vec<f64>>> for StochasticMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<StochasticMatrix> for Vec<Vec<f64>> {
    fn from(m: StochasticMatrix) -> Self {
        m.to_rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_column_sums() {
        assert!(StochasticMatrix::new(vec![vec![0.5, 1.0], vec![0.5, 0.0]]).is_ok());
        let err = StochasticMatrix::new(vec![vec![0.5, 1.0], vec![0.4, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::NotStochastic { column: 0, .. }));
        let err = StochasticMatrix::new(vec![vec![1.5], vec![-0.5]]).unwrap_err();
        assert!(matches!(err, Error::NotStochastic { .. }));
    }

    #[test]
    fn apply_and_merge() {
        let p = StochasticMatrix::merge_all(3);
        assert_eq!(p.apply(&[0.2, 0.3, 0.5]).unwrap(), vec![1.0]);
        assert!(p.apply(&[1.0]).is_err());
        let id = StochasticMatrix::identity(2);
        assert_eq!(id.apply(&[0.75, 0.25]).unwrap(), vec![0.75, 0.25]);
    }

    #[test]
    fn serde_as_rows() {
        let p = StochasticMatrix::from_assignment(2, &[1, 0]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[0.0,1.0],[1.0,0.0]]");
        let back: StochasticMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<StochasticMatrix>("[[0.5],[0.1]]").is_err());
    }
}
