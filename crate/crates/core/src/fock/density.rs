use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::layout::Split;
use super::{FockError, FockVector, ModeLayout, Tolerances, DENSE_LIMIT};

/// Mixed state over a [`ModeLayout`], stored as a sparse matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    layout: ModeLayout,
    entries: BTreeMap<(u64, u64), Complex64>,
}

impl DensityOperator {
    pub fn zero(layout: ModeLayout) -> Self {
        Self {
            layout,
            entries: BTreeMap::new(),
        }
    }

    /// `|ψ⟩⟨ψ|` without renormalization.
    pub fn from_pure(state: &FockVector) -> Self {
        let mut rho = Self::zero(state.layout().clone());
        rho.accumulate_pure(state, 1.0);
        rho
    }

    pub(crate) fn from_entries(layout: ModeLayout, entries: BTreeMap<(u64, u64), Complex64>) -> Self {
        Self { layout, entries }
    }

    /// Diagonal operator with the given populations on the listed basis indices.
    pub fn diagonal<I: IntoIterator<Item = (u64, f64)>>(layout: ModeLayout, populations: I) -> Self {
        let entries = populations
            .into_iter()
            .map(|(i, p)| ((i, i), Complex64::new(p, 0.0)))
            .collect();
        Self { layout, entries }
    }

    pub fn from_dense(layout: ModeLayout, matrix: &DMatrix<Complex64>) -> Result<Self, FockError> {
        let dim = layout.dimension();
        if matrix.nrows() as u64 != dim || matrix.ncols() as u64 != dim {
            return Err(FockError::LengthMismatch {
                expected: dim,
                got: matrix.nrows() as u64,
            });
        }
        let mut entries = BTreeMap::new();
        for j in 0..matrix.ncols() {
            for i in 0..matrix.nrows() {
                let v = matrix[(i, j)];
                if v != Complex64::new(0.0, 0.0) {
                    entries.insert((i as u64, j as u64), v);
                }
            }
        }
        Ok(Self { layout, entries })
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>, FockError> {
        let dim = self.layout.dimension();
        if dim * dim > DENSE_LIMIT {
            return Err(FockError::TooLargeForDense(dim));
        }
        let mut m = DMatrix::zeros(dim as usize, dim as usize);
        for (&(i, j), &v) in &self.entries {
            m[(i as usize, j as usize)] = v;
        }
        Ok(m)
    }

    /// `self += weight · |ψ⟩⟨ψ|`.
    pub fn accumulate_pure(&mut self, state: &FockVector, weight: f64) {
        debug_assert_eq!(state.layout(), &self.layout);
        let amps: Vec<(u64, Complex64)> = state.entries().collect();
        for &(i, a) in &amps {
            for &(j, b) in &amps {
                *self.entries.entry((i, j)).or_insert(Complex64::new(0.0, 0.0)) += a * b.conj() * weight;
            }
        }
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn element(&self, row: u64, col: u64) -> Complex64 {
        self.entries
            .get(&(row, col))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Stored `((row, col), value)` entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = ((u64, u64), Complex64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn trace(&self) -> Complex64 {
        self.entries
            .iter()
            .filter(|((i, j), _)| i == j)
            .map(|(_, v)| *v)
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            layout: self.layout.clone(),
            entries: self.entries.iter().map(|(&k, &v)| (k, v * factor)).collect(),
        }
    }

    /// Copy rescaled to unit trace; `None` if the trace is not positive.
    pub fn normalized(&self) -> Option<Self> {
        let t = self.trace().re;
        (t > 0.0 && t.is_finite()).then(|| self.scaled(1.0 / t))
    }

    /// Max entrywise `|ρ − ρ†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.entries
            .iter()
            .map(|(&(i, j), &v)| (v - self.element(j, i).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part.
    ///
    /// The sparsity graph is split into connected blocks and each block is
    /// diagonalized densely; indices with no stored entries contribute 0.
    pub fn min_eigenvalue(&self) -> f64 {
        let blocks = self.blocks();
        let covered: usize = blocks.iter().map(Vec::len).sum();
        let mut min = if (covered as u64) < self.layout.dimension() {
            0.0
        } else {
            f64::INFINITY
        };
        for block in blocks {
            let n = block.len();
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for (a, &i) in block.iter().enumerate() {
                for (b, &j) in block.iter().enumerate() {
                    m[(a, b)] = (self.element(i, j) + self.element(j, i).conj()) * 0.5;
                }
            }
            let eig = SymmetricEigen::new(m);
            min = eig.eigenvalues.iter().copied().fold(min, f64::min);
        }
        if min.is_infinite() {
            0.0
        } else {
            min
        }
    }

    fn blocks(&self) -> Vec<Vec<u64>> {
        let mut parent: HashMap<u64, u64> = HashMap::new();
        fn find(parent: &mut HashMap<u64, u64>, x: u64) -> u64 {
            let p = *parent.entry(x).or_insert(x);
            if p == x {
                return x;
            }
            let root = find(parent, p);
            parent.insert(x, root);
            root
        }
        for &(i, j) in self.entries.keys() {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent.insert(ri.max(rj), ri.min(rj));
            }
        }
        let keys: Vec<u64> = parent.keys().copied().collect();
        let mut groups: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for k in keys {
            let root = find(&mut parent, k);
            groups.entry(root).or_default().push(k);
        }
        groups
            .into_values()
            .map(|mut g| {
                g.sort_unstable();
                g
            })
            .collect()
    }

    /// Checks Hermiticity, trace against `expected_trace`, and positivity.
    pub fn check(&self, expected_trace: f64, tol: &Tolerances) -> Result<(), FockError> {
        if self.hermiticity_deviation() > tol.herm {
            return Err(FockError::Invalid("density operator is not Hermitian"));
        }
        if (self.trace() - expected_trace).norm() > tol.norm {
            return Err(FockError::Invalid("density operator trace deviates"));
        }
        if self.min_eigenvalue() < -tol.psd {
            return Err(FockError::Invalid("density operator has a negative eigenvalue"));
        }
        Ok(())
    }

    /// Traces out every mode not in `keep`; `keep` may be empty (scalar result).
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator, FockError> {
        let kept = self.layout.positions(keep)?;
        let split = Split::new(&self.layout, kept);
        let mut out: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for (&(i, j), &v) in &self.entries {
            let (ki, ri) = split.split(&self.layout, i);
            let (kj, rj) = split.split(&self.layout, j);
            if ri == rj {
                *out.entry((ki, kj)).or_insert(Complex64::new(0.0, 0.0)) += v;
            }
        }
        Ok(Self::from_entries(split.kept_layout, out))
    }

    /// `⟨φ|ρ|φ⟩`.
    pub fn expectation(&self, state: &FockVector) -> Result<Complex64, FockError> {
        if state.layout() != &self.layout {
            return Err(FockError::LayoutMismatch {
                left: Box::new(self.layout.clone()),
                right: Box::new(state.layout().clone()),
            });
        }
        let amps: Vec<(u64, Complex64)> = state.entries().collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(i, a) in &amps {
            for &(j, b) in &amps {
                acc += a.conj() * self.element(i, j) * b;
            }
        }
        Ok(acc)
    }

    /// Diagonal weight of the sector with exactly `photons` total excitations.
    pub fn sector_weight(&self, photons: usize) -> f64 {
        self.entries
            .iter()
            .filter(|((i, j), _)| i == j && self.layout.total_photons(*i) == photons)
            .map(|(_, v)| v.re)
            .sum()
    }

    /// `Tr(ρ n̂)` for one mode.
    pub fn mean_photon_number(&self, mode: &str) -> Result<f64, FockError> {
        let k = self.layout.require(mode)?;
        Ok(self
            .entries
            .iter()
            .filter(|((i, j), _)| i == j)
            .map(|((i, _), v)| v.re * self.layout.occupation_of(*i, k) as f64)
            .sum())
    }

    /// Max entrywise absolute difference; layouts must match.
    pub fn max_abs_diff(&self, other: &DensityOperator) -> Result<f64, FockError> {
        if self.layout != other.layout {
            return Err(FockError::LayoutMismatch {
                left: Box::new(self.layout.clone()),
                right: Box::new(other.layout.clone()),
            });
        }
        let a = self
            .entries
            .iter()
            .map(|(&(i, j), &v)| (v - other.element(i, j)).norm());
        let b = other
            .entries
            .iter()
            .map(|(&(i, j), &v)| (v - self.element(i, j)).norm());
        Ok(a.chain(b).fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn partial_trace_of_product_vacuum() {
        let layout = ModeLayout::uniform(&["m1", "m2"], 1).unwrap();
        let rho = DensityOperator::from_pure(&FockVector::vacuum(layout));
        let reduced = rho.partial_trace(&["m1"]).unwrap();
        assert_eq!(reduced.layout().labels(), ["m1"]);
        assert_eq!(reduced.element(0, 0), c(1.0));
        assert_eq!(reduced.entries().count(), 1);
    }

    #[test]
    fn partial_trace_to_nothing_is_the_trace() {
        let layout = ModeLayout::uniform(&["a", "b"], 2).unwrap();
        let psi = FockVector::from_terms(layout, [(&[0, 1][..], c(0.6)), (&[2, 2][..], c(0.8))]).unwrap();
        let rho = DensityOperator::from_pure(&psi);
        let scalar = rho.partial_trace::<&str>(&[]).unwrap();
        assert_eq!(scalar.layout().dimension(), 1);
        assert!((scalar.element(0, 0).re - 1.0).abs() < 1e-15);
        let all = rho.partial_trace(&["a", "b"]).unwrap();
        assert_eq!(all, rho);
    }

    #[test]
    fn eigenvalues_by_block() {
        let layout = ModeLayout::uniform(&["a"], 3).unwrap();
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        m[(0, 0)] = c(0.5);
        m[(1, 1)] = c(0.5);
        m[(0, 1)] = c(0.6);
        m[(1, 0)] = c(0.6);
        let rho = DensityOperator::from_dense(layout, &m).unwrap();
        assert!((rho.min_eigenvalue() + 0.1).abs() < 1e-12);
        assert!(rho.check(1.0, &Tolerances::default()).is_err());
    }

    #[test]
    fn mean_photon_number_and_sectors() {
        let layout = ModeLayout::uniform(&["a", "b"], 2).unwrap();
        let rho = DensityOperator::diagonal(layout.clone(), [(0, 0.25), (layout.flat_index(&[1, 1]).unwrap(), 0.75)]);
        assert!((rho.mean_photon_number("a").unwrap() - 0.75).abs() < 1e-15);
        assert!((rho.sector_weight(2) - 0.75).abs() < 1e-15);
        assert!((rho.sector_weight(0) - 0.25).abs() < 1e-15);
    }
}
