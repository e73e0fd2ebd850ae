//! Truncated multimode bosonic Fock space.
//!
//! States and operators are stored sparsely, keyed by the flat basis index of
//! their [`ModeLayout`]. Only nonzero amplitudes are kept, which keeps the
//! eight-mode teleportation states (two squeezed pairs with cutoffs near 40)
//! at a few thousand entries instead of tens of millions.

mod density;
mod layout;
mod local;
mod vector;

pub use density::DensityOperator;
pub use layout::ModeLayout;
pub use local::LocalOperator;
pub use vector::{FockVector, LadderResult, Projection};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("mode label `{0}` appears more than once")]
    DuplicateMode(String),
    #[error("mode `{0}` must have a cutoff of at least 1")]
    ZeroCutoff(String),
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("basis dimension overflows a 64-bit index")]
    DimensionOverflow,
    #[error("layouts differ: {left:?} vs {right:?}")]
    LayoutMismatch { left: Box<ModeLayout>, right: Box<ModeLayout> },
    #[error("expected {expected} amplitudes, got {got}")]
    LengthMismatch { expected: u64, got: u64 },
    #[error("projection basis is not orthonormal (gram deviation {deviation:e})")]
    NonOrthonormalBasis { deviation: f64 },
    #[error("local map is not unitary (deviation {deviation:e})")]
    NonUnitary { deviation: f64 },
    #[error("local map dimension {got} does not match the two-mode subspace dimension {expected}")]
    LocalDimension { expected: usize, got: usize },
    #[error("dense view of dimension {0} is too large")]
    TooLargeForDense(u64),
    #[error("{0}")]
    Invalid(&'static str),
}

/// Numerical tolerances shared by the state checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub norm: f64,
    pub herm: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: 1e-10,
            herm: 1e-10,
            psd: 1e-9,
        }
    }
}

/// Largest basis dimension for which dense views are materialized.
pub const DENSE_LIMIT: u64 = 1 << 24;
