use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Operator on the joint truncated space of two modes, stored column-wise.
///
/// Indices follow the two-mode basis order (second mode fastest), so for a
/// pair with cutoffs `(c1, c2)` the local index of `|n1, n2⟩` is
/// `n1·(c2+1) + n2`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    dim: usize,
    columns: Vec<Vec<(usize, Complex64)>>,
}

impl LocalOperator {
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            columns: (0..dim).map(|j| vec![(j, Complex64::new(1.0, 0.0))]).collect(),
        }
    }

    pub fn from_dense(matrix: &DMatrix<Complex64>) -> Self {
        let dim = matrix.nrows().max(matrix.ncols());
        let mut columns = vec![Vec::new(); dim];
        for j in 0..matrix.ncols() {
            for i in 0..matrix.nrows() {
                let v = matrix[(i, j)];
                if v != Complex64::new(0.0, 0.0) {
                    columns[j].push((i, v));
                }
            }
        }
        Self { dim, columns }
    }

    /// Builds an operator from a map `column → [(row, value)]` on a `dim`-dimensional space.
    pub fn from_columns<F>(dim: usize, mut column: F) -> Self
    where
        F: FnMut(usize) -> Vec<(usize, Complex64)>,
    {
        Self {
            dim,
            columns: (0..dim).map(&mut column).collect(),
        }
    }

    /// Exchange of two equally truncated modes: `|n1, n2⟩ → |n2, n1⟩`.
    pub fn swap(cutoff: usize) -> Self {
        let d = cutoff + 1;
        Self::from_columns(d * d, |j| {
            let (n1, n2) = (j / d, j % d);
            vec![(n2 * d + n1, Complex64::new(1.0, 0.0))]
        })
    }

    /// π phase on the second mode: `|n1, n2⟩ → (−1)^{n2} |n1, n2⟩`.
    pub fn parity_phase(cutoff: usize) -> Self {
        let d = cutoff + 1;
        Self::from_columns(d * d, |j| {
            let sign = if (j % d).is_multiple_of(2) { 1.0 } else { -1.0 };
            vec![(j, Complex64::new(sign, 0.0))]
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, col: usize) -> &[(usize, Complex64)] {
        &self.columns[col]
    }

    /// `self · rhs`.
    pub fn compose(&self, rhs: &LocalOperator) -> LocalOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        Self::from_columns(self.dim, |j| {
            let mut acc: HashMap<usize, Complex64> = HashMap::new();
            for &(k, b) in rhs.column(j) {
                for &(i, a) in self.column(k) {
                    *acc.entry(i).or_insert(Complex64::new(0.0, 0.0)) += a * b;
                }
            }
            let mut col: Vec<(usize, Complex64)> = acc.into_iter().filter(|(_, v)| v.norm() > 0.0).collect();
            col.sort_unstable_by_key(|&(i, _)| i);
            col
        })
    }

    /// Max entrywise deviation of `U†U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.dim];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                if i >= self.dim {
                    return f64::INFINITY;
                }
                rows[i].push((j, v));
            }
        }
        let mut gram: HashMap<(usize, usize), Complex64> = HashMap::new();
        for row in &rows {
            for &(a, ua) in row {
                for &(b, ub) in row {
                    *gram.entry((a, b)).or_insert(Complex64::new(0.0, 0.0)) += ua.conj() * ub;
                }
            }
        }
        let mut worst: f64 = 0.0;
        for j in 0..self.dim {
            let g = gram.get(&(j, j)).copied().unwrap_or_default();
            worst = worst.max((g - 1.0).norm());
        }
        for (&(a, b), g) in &gram {
            if a != b {
                worst = worst.max(g.norm());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] = v;
            }
        }
        m
    }
}
