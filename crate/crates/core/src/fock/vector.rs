use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use super::layout::Split;
use super::{DensityOperator, FockError, LocalOperator, ModeLayout, Tolerances, DENSE_LIMIT};

/// Probabilities below this are reported as a flagged zero outcome.
const ZERO_PROBABILITY: f64 = 1e-30;

/// Pure state over a [`ModeLayout`], stored as nonzero amplitudes by flat index.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    layout: ModeLayout,
    amps: BTreeMap<u64, Complex64>,
}

/// Output of a ladder operator that can push weight past the cutoff.
#[derive(Clone, Debug)]
pub struct LadderResult {
    pub state: FockVector,
    /// Probability weight the input held on components mapped above `n_max`.
    pub discarded_weight: f64,
}

/// Outcome of projecting a state onto a subspace of some of its modes.
///
/// `branches[k]` is `⟨e_k|ψ⟩ / √p` on the unmeasured modes, one per basis
/// vector `e_k`. For a rank-one projector this is the conditional pure state.
#[derive(Clone, Debug)]
pub struct Projection {
    pub probability: f64,
    /// Set when `probability` is numerically zero; branches are then zero vectors.
    pub is_zero: bool,
    pub branches: Vec<FockVector>,
}

impl Projection {
    /// Conditional pure state, available for rank-one projections.
    pub fn pure(&self) -> Option<&FockVector> {
        match self.branches.as_slice() {
            [only] => Some(only),
            _ => None,
        }
    }

    /// Conditional state on the unmeasured modes as a mixture over branches.
    pub fn density(&self) -> DensityOperator {
        let layout = self.branches[0].layout().clone();
        let mut rho = DensityOperator::zero(layout);
        for b in &self.branches {
            rho.accumulate_pure(b, 1.0);
        }
        rho
    }
}

impl FockVector {
    pub fn zero(layout: ModeLayout) -> Self {
        Self {
            layout,
            amps: BTreeMap::new(),
        }
    }

    pub fn vacuum(layout: ModeLayout) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(0, Complex64::new(1.0, 0.0));
        Self { layout, amps }
    }

    /// Number state `|n_1, …, n_k⟩`.
    pub fn basis_state(layout: ModeLayout, occupation: &[usize]) -> Result<Self, FockError> {
        let idx = layout
            .flat_index(occupation)
            .ok_or(FockError::Invalid("occupation outside layout"))?;
        let mut amps = BTreeMap::new();
        amps.insert(idx, Complex64::new(1.0, 0.0));
        Ok(Self { layout, amps })
    }

    /// Builds a state from a dense amplitude array in basis order.
    pub fn from_amplitudes(layout: ModeLayout, amplitudes: &[Complex64]) -> Result<Self, FockError> {
        if amplitudes.len() as u64 != layout.dimension() {
            return Err(FockError::LengthMismatch {
                expected: layout.dimension(),
                got: amplitudes.len() as u64,
            });
        }
        let amps = amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != Complex64::new(0.0, 0.0))
            .map(|(i, a)| (i as u64, *a))
            .collect();
        Ok(Self { layout, amps })
    }

    /// Builds a state from `(occupation, amplitude)` pairs; repeated entries add up.
    pub fn from_terms<'a, I>(layout: ModeLayout, terms: I) -> Result<Self, FockError>
    where
        I: IntoIterator<Item = (&'a [usize], Complex64)>,
    {
        let mut out = Self::zero(layout);
        for (occ, amp) in terms {
            let idx = out
                .layout
                .flat_index(occ)
                .ok_or(FockError::Invalid("occupation outside layout"))?;
            if amp != Complex64::new(0.0, 0.0) {
                out.add_at(idx, amp);
            }
        }
        Ok(out)
    }

    pub(crate) fn from_map(layout: ModeLayout, amps: BTreeMap<u64, Complex64>) -> Self {
        Self { layout, amps }
    }

    /// Dense amplitude array in basis order.
    pub fn to_amplitudes(&self) -> Result<Vec<Complex64>, FockError> {
        let dim = self.layout.dimension();
        if dim > DENSE_LIMIT {
            return Err(FockError::TooLargeForDense(dim));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim as usize];
        for (&i, &a) in &self.amps {
            out[i as usize] = a;
        }
        Ok(out)
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn amplitude(&self, occupation: &[usize]) -> Complex64 {
        self.layout
            .flat_index(occupation)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitude_at(i))
    }

    pub fn amplitude_at(&self, index: u64) -> Complex64 {
        self.amps
            .get(&index)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Nonzero `(flat index, amplitude)` pairs in basis order.
    pub fn entries(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.amps.iter().map(|(&i, &a)| (i, a))
    }

    /// Number of stored amplitudes.
    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: &Tolerances) -> bool {
        (self.norm() - 1.0).abs() <= tol.norm
    }

    /// Copy rescaled to unit norm; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            layout: self.layout.clone(),
            amps: self.amps.iter().map(|(&i, &a)| (i, a * factor)).collect(),
        }
    }

    /// `self + factor · other` on identical layouts.
    pub fn add_scaled(&self, factor: Complex64, other: &FockVector) -> Result<Self, FockError> {
        self.same_layout(other)?;
        let mut out = self.clone();
        for (&i, &a) in &other.amps {
            out.add_at(i, factor * a);
        }
        Ok(out)
    }

    fn add_at(&mut self, index: u64, amp: Complex64) {
        *self.amps.entry(index).or_insert(Complex64::new(0.0, 0.0)) += amp;
    }

    fn same_layout(&self, other: &FockVector) -> Result<(), FockError> {
        if self.layout == other.layout {
            Ok(())
        } else {
            Err(FockError::LayoutMismatch {
                left: Box::new(self.layout.clone()),
                right: Box::new(other.layout.clone()),
            })
        }
    }

    /// `a†` on one mode. Components at the cutoff leave the truncated space;
    /// their prior weight `|c|²` is reported as discarded.
    pub fn create(&self, mode: &str) -> Result<LadderResult, FockError> {
        let k = self.layout.require(mode)?;
        let cutoff = self.layout.cutoff(k);
        let stride = self.layout.stride(k);
        let mut amps = BTreeMap::new();
        let mut discarded = 0.0;
        for (&i, &a) in &self.amps {
            let n = self.layout.occupation_of(i, k);
            let scaled = a * ((n + 1) as f64).sqrt();
            if n == cutoff {
                discarded += a.norm_sqr();
            } else {
                amps.insert(i + stride, scaled);
            }
        }
        Ok(LadderResult {
            state: Self::from_map(self.layout.clone(), amps),
            discarded_weight: discarded,
        })
    }

    /// `a` on one mode.
    pub fn annihilate(&self, mode: &str) -> Result<FockVector, FockError> {
        let k = self.layout.require(mode)?;
        let stride = self.layout.stride(k);
        let amps = self
            .amps
            .iter()
            .filter_map(|(&i, &a)| {
                let n = self.layout.occupation_of(i, k);
                (n > 0).then(|| (i - stride, a * (n as f64).sqrt()))
            })
            .collect();
        Ok(Self::from_map(self.layout.clone(), amps))
    }

    /// `self ⊗ other`; the right factor's modes are appended after ours.
    pub fn tensor(&self, other: &FockVector) -> Result<FockVector, FockError> {
        let layout = self.layout.join(&other.layout)?;
        let inner_dim = other.layout.dimension();
        let mut amps = BTreeMap::new();
        for (&i, &a) in &self.amps {
            for (&j, &b) in &other.amps {
                amps.insert(i * inner_dim + j, a * b);
            }
        }
        Ok(Self::from_map(layout, amps))
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &FockVector) -> Result<Complex64, FockError> {
        self.same_layout(other)?;
        let (small, large, conj_small) = if self.amps.len() <= other.amps.len() {
            (&self.amps, &other.amps, true)
        } else {
            (&other.amps, &self.amps, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &a) in small {
            if let Some(&b) = large.get(i) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// Projects onto `span(basis)`, where the basis lives on a subset of our
    /// modes. Measured modes are collapsed out of the conditional branches.
    pub fn project(&self, basis: &[FockVector]) -> Result<Projection, FockError> {
        self.project_with(basis, &Tolerances::default())
    }

    pub fn project_with(&self, basis: &[FockVector], tol: &Tolerances) -> Result<Projection, FockError> {
        let first = basis
            .first()
            .ok_or(FockError::Invalid("projection basis is empty"))?;
        let blayout = first.layout().clone();
        for b in basis {
            if b.layout != blayout {
                return Err(FockError::LayoutMismatch {
                    left: Box::new(blayout.clone()),
                    right: Box::new(b.layout.clone()),
                });
            }
        }
        let deviation = gram_deviation(basis);
        if deviation > tol.norm {
            return Err(FockError::NonOrthonormalBasis { deviation });
        }

        let measured = self.layout.positions(blayout.labels())?;
        let split = Split::new(&self.layout, measured);
        let lookups: Vec<HashMap<u64, Complex64>> = basis
            .iter()
            .map(|b| {
                b.entries()
                    .filter_map(|(i, e)| {
                        split
                            .kept_layout
                            .flat_index(&blayout.multi_index(i))
                            .map(|k| (k, e.conj()))
                    })
                    .collect()
            })
            .collect();

        let mut branches: Vec<BTreeMap<u64, Complex64>> = vec![BTreeMap::new(); basis.len()];
        for (&i, &a) in &self.amps {
            let (k, r) = split.split(&self.layout, i);
            for (lookup, branch) in lookups.iter().zip(branches.iter_mut()) {
                if let Some(&e) = lookup.get(&k) {
                    *branch.entry(r).or_insert(Complex64::new(0.0, 0.0)) += e * a;
                }
            }
        }
        let probability: f64 = branches
            .iter()
            .flat_map(|b| b.values())
            .map(|a| a.norm_sqr())
            .sum();
        let rest = split.rest_layout;
        if probability < ZERO_PROBABILITY {
            return Ok(Projection {
                probability,
                is_zero: true,
                branches: vec![FockVector::zero(rest); basis.len()],
            });
        }
        let inv = Complex64::new(1.0 / probability.sqrt(), 0.0);
        let branches = branches
            .into_iter()
            .map(|b| Self::from_map(rest.clone(), b.into_iter().map(|(i, a)| (i, a * inv)).collect()))
            .collect();
        Ok(Projection {
            probability,
            is_zero: false,
            branches,
        })
    }

    /// Reduced density operator on `keep`, tracing out every other mode.
    ///
    /// Works directly on the sparse amplitudes: cost is the sum over traced
    /// configurations of (kept support)², never the full dimension squared.
    pub fn reduced_density<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator, FockError> {
        let kept = self.layout.positions(keep)?;
        let split = Split::new(&self.layout, kept);
        let mut groups: BTreeMap<u64, Vec<(u64, Complex64)>> = BTreeMap::new();
        for (&i, &a) in &self.amps {
            let (k, r) = split.split(&self.layout, i);
            groups.entry(r).or_default().push((k, a));
        }
        let mut entries: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for group in groups.values() {
            for &(ki, ai) in group {
                for &(kj, aj) in group {
                    *entries.entry((ki, kj)).or_insert(Complex64::new(0.0, 0.0)) += ai * aj.conj();
                }
            }
        }
        Ok(DensityOperator::from_entries(split.kept_layout, entries))
    }

    /// Applies a unitary acting on the joint truncated space of two modes.
    pub fn apply_local_map(&self, modes: (&str, &str), map: &LocalOperator) -> Result<FockVector, FockError> {
        self.apply_local_map_with(modes, map, &Tolerances::default())
    }

    pub fn apply_local_map_with(
        &self,
        modes: (&str, &str),
        map: &LocalOperator,
        tol: &Tolerances,
    ) -> Result<FockVector, FockError> {
        let kept = self.layout.positions(&[modes.0, modes.1])?;
        let split = Split::new(&self.layout, kept);
        let local_dim = split.kept_layout.dimension() as usize;
        if map.dim() != local_dim {
            return Err(FockError::LocalDimension {
                expected: local_dim,
                got: map.dim(),
            });
        }
        let deviation = map.unitarity_deviation();
        if deviation > tol.norm {
            return Err(FockError::NonUnitary { deviation });
        }
        let mut amps: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (&i, &a) in &self.amps {
            let (k, r) = split.split(&self.layout, i);
            for &(row, u) in map.column(k as usize) {
                let j = split.merge(&self.layout, row as u64, r);
                *amps.entry(j).or_insert(Complex64::new(0.0, 0.0)) += u * a;
            }
        }
        amps.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        Ok(Self::from_map(self.layout.clone(), amps))
    }

    /// Squared norm of the components with exactly `photons` total excitations.
    pub fn sector_weight(&self, photons: usize) -> f64 {
        self.amps
            .iter()
            .filter(|(&i, _)| self.layout.total_photons(i) == photons)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// Max entrywise deviation of the Gram matrix from the identity.
fn gram_deviation(basis: &[FockVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let g = a.inner(b).unwrap_or(Complex64::new(f64::NAN, 0.0));
            let target = if i == j { 1.0 } else { 0.0 };
            let d = (g - target).norm();
            worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn single(cutoff: usize) -> ModeLayout {
        ModeLayout::uniform(&["a"], cutoff).unwrap()
    }

    #[test]
    fn vacuum_amplitudes() {
        let v = FockVector::vacuum(single(2));
        assert_eq!(v.to_amplitudes().unwrap(), vec![c(1.0), c(0.0), c(0.0)]);
        let two = FockVector::vacuum(ModeLayout::uniform(&["a", "b"], 1).unwrap());
        assert_eq!(two.amplitude(&[0, 0]), c(1.0));
        assert_eq!(two.support_len(), 1);
        assert_eq!(two.inner(&two).unwrap(), c(1.0));
    }

    #[test]
    fn ladder_actions() {
        let vac = FockVector::vacuum(single(3));
        let one = vac.create("a").unwrap();
        assert_eq!(one.discarded_weight, 0.0);
        assert_eq!(one.state.amplitude(&[1]), c(1.0));
        let two = one.state.create("a").unwrap().state;
        assert!((two.amplitude(&[2]).re - 2f64.sqrt()).abs() < 1e-15);

        let top = FockVector::basis_state(single(3), &[3]).unwrap().scaled(c(0.5));
        let clipped = top.create("a").unwrap();
        assert_eq!(clipped.state.support_len(), 0);
        assert!((clipped.discarded_weight - 0.25).abs() < 1e-15);

        let lowered = one.state.annihilate("a").unwrap();
        assert_eq!(lowered.amplitude(&[0]), c(1.0));
        assert_eq!(vac.annihilate("a").unwrap().support_len(), 0);
        let round = vac.create("a").unwrap().state.annihilate("a").unwrap();
        assert_eq!(round, vac);
        assert!(matches!(vac.create("z"), Err(FockError::UnknownMode(_))));
    }

    #[test]
    fn tensor_orders_left_modes_first() {
        let a = FockVector::vacuum(single(1));
        let b = FockVector::basis_state(ModeLayout::uniform(&["b"], 1).unwrap(), &[1]).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.layout().labels(), ["a", "b"]);
        assert_eq!(ab.amplitude(&[0, 1]), c(1.0));
        assert!(matches!(a.tensor(&a), Err(FockError::DuplicateMode(_))));
    }

    #[test]
    fn inner_products() {
        let zero = FockVector::basis_state(single(1), &[0]).unwrap();
        let one = FockVector::basis_state(single(1), &[1]).unwrap();
        assert_eq!(zero.inner(&zero).unwrap(), c(1.0));
        assert_eq!(zero.inner(&one).unwrap(), c(0.0));
        let other = FockVector::vacuum(single(2));
        assert!(matches!(zero.inner(&other), Err(FockError::LayoutMismatch { .. })));
        let phased = one.scaled(Complex64::new(0.0, 1.0));
        assert_eq!(one.inner(&phased).unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(phased.inner(&one).unwrap(), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn projection_examples() {
        let layout = ModeLayout::uniform(&["m1", "m2"], 1).unwrap();
        let state = FockVector::basis_state(layout.clone(), &[0, 1]).unwrap();
        let m1 = ModeLayout::uniform(&["m1"], 1).unwrap();

        let p = state
            .project(&[FockVector::basis_state(m1.clone(), &[0]).unwrap()])
            .unwrap();
        assert_eq!(p.probability, 1.0);
        let cond = p.pure().unwrap();
        assert_eq!(cond.layout().labels(), ["m2"]);
        assert_eq!(cond.amplitude(&[1]), c(1.0));

        let p = state
            .project(&[FockVector::basis_state(m1, &[1]).unwrap()])
            .unwrap();
        assert!(p.is_zero);
        assert_eq!(p.probability, 0.0);
        assert_eq!(p.pure().unwrap().support_len(), 0);

        // Bell pair on (m1, m2) measured jointly with a spectator mode present.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = FockVector::from_terms(layout.clone(), [(&[0, 0][..], c(s)), (&[1, 1][..], c(s))]).unwrap();
        let with_spectator = bell
            .tensor(&FockVector::vacuum(ModeLayout::uniform(&["x"], 1).unwrap()))
            .unwrap();
        let p = with_spectator.project(std::slice::from_ref(&bell)).unwrap();
        assert!((p.probability - 1.0).abs() < 1e-15);
        assert_eq!(p.pure().unwrap().layout().labels(), ["x"]);

        // Each Bell component carries half the weight.
        let p = bell
            .project(&[FockVector::basis_state(layout.clone(), &[0, 0]).unwrap()])
            .unwrap();
        assert!((p.probability - 0.5).abs() < 1e-15);
        assert_eq!(p.pure().unwrap().layout().mode_count(), 0);

        // Bell-basis outcomes for |00⟩: Φ± each with probability 1/2.
        let phi = |sign: f64| {
            FockVector::from_terms(layout.clone(), [(&[0, 0][..], c(s)), (&[1, 1][..], c(sign * s))]).unwrap()
        };
        let product = FockVector::basis_state(layout.clone(), &[0, 0]).unwrap();
        for sign in [1.0, -1.0] {
            let p = product.project(&[phi(sign)]).unwrap();
            assert!((p.probability - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn projection_rejects_non_orthonormal_basis() {
        let state = FockVector::vacuum(single(1));
        let v = FockVector::vacuum(single(1));
        let err = state.project(&[v.clone(), v]).unwrap_err();
        assert!(matches!(err, FockError::NonOrthonormalBasis { .. }));
        let scaled = FockVector::vacuum(single(1)).scaled(c(2.0));
        assert!(state.project(&[scaled]).is_err());
    }

    #[test]
    fn reduced_density_of_bell_pair_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let layout = ModeLayout::uniform(&["a", "b"], 1).unwrap();
        let bell = FockVector::from_terms(layout, [(&[0, 0][..], c(s)), (&[1, 1][..], c(s))]).unwrap();
        let rho = bell.reduced_density(&["a"]).unwrap();
        let dense = rho.to_dense().unwrap();
        assert!((dense[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((dense[(1, 1)].re - 0.5).abs() < 1e-15);
        assert_eq!(dense[(0, 1)], c(0.0));
    }

    #[test]
    fn local_maps() {
        let layout = ModeLayout::uniform(&["p", "q"], 1).unwrap();
        let one_zero = FockVector::basis_state(layout.clone(), &[1, 0]).unwrap();
        let zero_one = FockVector::basis_state(layout.clone(), &[0, 1]).unwrap();

        let id = LocalOperator::identity(4);
        assert_eq!(one_zero.apply_local_map(("p", "q"), &id).unwrap(), one_zero);

        let swap = LocalOperator::swap(1);
        assert_eq!(one_zero.apply_local_map(("p", "q"), &swap).unwrap(), zero_one);
        assert_eq!(zero_one.apply_local_map(("p", "q"), &swap).unwrap(), one_zero);

        let phase = LocalOperator::parity_phase(1);
        assert_eq!(
            zero_one.apply_local_map(("p", "q"), &phase).unwrap(),
            zero_one.scaled(c(-1.0))
        );

        let bad = LocalOperator::from_dense(&nalgebra::DMatrix::from_element(4, 4, c(1.0)));
        assert!(matches!(
            one_zero.apply_local_map(("p", "q"), &bad),
            Err(FockError::NonUnitary { .. })
        ));
        assert!(matches!(
            one_zero.apply_local_map(("p", "q"), &LocalOperator::identity(9)),
            Err(FockError::LocalDimension { .. })
        ));
    }

    #[test]
    fn local_map_on_embedded_pair_keeps_spectator_modes() {
        let layout = ModeLayout::uniform(&["x", "p", "y", "q"], 2).unwrap();
        let state = FockVector::basis_state(layout, &[2, 1, 1, 0]).unwrap();
        let swapped = state.apply_local_map(("p", "q"), &LocalOperator::swap(2)).unwrap();
        assert_eq!(swapped.amplitude(&[2, 0, 1, 1]), c(1.0));
        let reversed = state.apply_local_map(("q", "p"), &LocalOperator::swap(2)).unwrap();
        assert_eq!(reversed, swapped);
    }
}
