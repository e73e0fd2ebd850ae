use std::fmt;

use super::FockError;

/// Ordered list of truncated bosonic modes.
///
/// Each mode carries its own cutoff `n_max` (inclusive), so the local
/// dimension of mode `k` is `cutoff[k] + 1`. Basis states are enumerated
/// row-major over the multi-index with the **last** listed mode varying
/// fastest; flat index `Σ n_k · stride_k` with `stride_last = 1`. This order
/// is frozen: serialized amplitudes and golden files depend on it.
#[derive(Clone, PartialEq, Eq)]
pub struct ModeLayout {
    labels: Vec<String>,
    cutoffs: Vec<usize>,
    strides: Vec<u64>,
    dimension: u64,
}

impl ModeLayout {
    /// Layout where every mode shares the same cutoff.
    pub fn uniform<S: AsRef<str>>(labels: &[S], cutoff: usize) -> Result<Self, FockError> {
        Self::from_modes(labels.iter().map(|l| (l.as_ref().to_string(), cutoff)))
    }

    /// Layout from `(label, cutoff)` pairs in basis order.
    pub fn from_modes<I, S>(modes: I) -> Result<Self, FockError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let (labels, cutoffs): (Vec<String>, Vec<usize>) =
            modes.into_iter().map(|(l, c)| (l.into(), c)).unzip();
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(FockError::DuplicateMode(label.clone()));
            }
            if cutoffs[i] == 0 {
                return Err(FockError::ZeroCutoff(label.clone()));
            }
        }
        let mut strides = vec![0u64; labels.len()];
        let mut dimension = 1u64;
        for k in (0..labels.len()).rev() {
            strides[k] = dimension;
            dimension = dimension
                .checked_mul(cutoffs[k] as u64 + 1)
                .ok_or(FockError::DimensionOverflow)?;
        }
        Ok(Self {
            labels,
            cutoffs,
            strides,
            dimension,
        })
    }

    /// Layout with no modes; its single basis state is the scalar `1`.
    pub fn scalar() -> Self {
        Self {
            labels: Vec::new(),
            cutoffs: Vec::new(),
            strides: Vec::new(),
            dimension: 1,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.labels.len()
    }

    pub fn dimension(&self) -> u64 {
        self.dimension
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn cutoff(&self, mode: usize) -> usize {
        self.cutoffs[mode]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn require(&self, label: &str) -> Result<usize, FockError> {
        self.position(label)
            .ok_or_else(|| FockError::UnknownMode(label.to_string()))
    }

    pub(crate) fn stride(&self, mode: usize) -> u64 {
        self.strides[mode]
    }

    /// Flat index of a multi-index, or `None` if any occupation exceeds its cutoff.
    pub fn flat_index(&self, occupation: &[usize]) -> Option<u64> {
        if occupation.len() != self.labels.len() {
            return None;
        }
        let mut idx = 0u64;
        for (k, &n) in occupation.iter().enumerate() {
            if n > self.cutoffs[k] {
                return None;
            }
            idx += n as u64 * self.strides[k];
        }
        Some(idx)
    }

    /// Occupation of a single mode inside a flat index.
    pub fn occupation_of(&self, index: u64, mode: usize) -> usize {
        ((index / self.strides[mode]) % (self.cutoffs[mode] as u64 + 1)) as usize
    }

    pub fn multi_index(&self, index: u64) -> Vec<usize> {
        (0..self.labels.len())
            .map(|k| self.occupation_of(index, k))
            .collect()
    }

    pub fn total_photons(&self, index: u64) -> usize {
        (0..self.labels.len())
            .map(|k| self.occupation_of(index, k))
            .sum()
    }

    /// Concatenation `self ⊗ other`; labels must be disjoint.
    pub fn join(&self, other: &ModeLayout) -> Result<ModeLayout, FockError> {
        Self::from_modes(
            self.labels
                .iter()
                .zip(&self.cutoffs)
                .chain(other.labels.iter().zip(&other.cutoffs))
                .map(|(l, &c)| (l.clone(), c)),
        )
    }

    /// Sub-layout over the given mode positions, in the order given.
    pub fn select(&self, modes: &[usize]) -> ModeLayout {
        Self::from_modes(modes.iter().map(|&k| (self.labels[k].clone(), self.cutoffs[k])))
            .expect("sub-layout of a valid layout is valid")
    }

    /// Positions for a list of labels; rejects unknown and repeated labels.
    pub fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>, FockError> {
        let mut out = Vec::with_capacity(labels.len());
        for label in labels {
            let k = self.require(label.as_ref())?;
            if out.contains(&k) {
                return Err(FockError::DuplicateMode(label.as_ref().to_string()));
            }
            out.push(k);
        }
        Ok(out)
    }
}

impl fmt::Debug for ModeLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for (l, c) in self.labels.iter().zip(&self.cutoffs) {
            list.entry(&format_args!("{l}≤{c}"));
        }
        list.finish()
    }
}

/// Maps flat indices of a parent layout onto a split into (kept, rest) sub-layouts.
pub(crate) struct Split {
    kept: Vec<usize>,
    rest: Vec<usize>,
    pub kept_layout: ModeLayout,
    pub rest_layout: ModeLayout,
}

impl Split {
    pub fn new(parent: &ModeLayout, kept: Vec<usize>) -> Self {
        let rest: Vec<usize> = (0..parent.mode_count())
            .filter(|k| !kept.contains(k))
            .collect();
        Self {
            kept_layout: parent.select(&kept),
            rest_layout: parent.select(&rest),
            kept,
            rest,
        }
    }

    /// Returns `(kept_index, rest_index)` for a parent flat index.
    pub fn split(&self, parent: &ModeLayout, index: u64) -> (u64, u64) {
        let mut kept = 0u64;
        for (j, &k) in self.kept.iter().enumerate() {
            kept += parent.occupation_of(index, k) as u64 * self.kept_layout.stride(j);
        }
        let mut rest = 0u64;
        for (j, &k) in self.rest.iter().enumerate() {
            rest += parent.occupation_of(index, k) as u64 * self.rest_layout.stride(j);
        }
        (kept, rest)
    }

    /// Inverse of [`Split::split`].
    pub fn merge(&self, parent: &ModeLayout, kept: u64, rest: u64) -> u64 {
        let mut idx = 0u64;
        for (j, &k) in self.kept.iter().enumerate() {
            idx += self.kept_layout.occupation_of(kept, j) as u64 * parent.stride(k);
        }
        for (j, &k) in self.rest.iter().enumerate() {
            idx += self.rest_layout.occupation_of(rest, j) as u64 * parent.stride(k);
        }
        idx
    }
}
