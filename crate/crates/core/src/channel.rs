//! Horizon channel: black-hole parameters to squeezing strength, and the
//! embedding of Minkowski single-mode states into region-I ⊗ region-II
//! two-mode squeezed states.
//!
//! A static observer outside the horizon sees the Minkowski vacuum of a mode
//! of frequency Ω as
//!
//! ```text
//! |0⟩_M = Σ_n tanhⁿr / cosh r · |n⟩_I |n⟩_II,      tanh r = exp(−2π·s·M·Ω)
//! |1⟩_M = Σ_n tanhⁿr / cosh²r · √(n+1) |n+1⟩_I |n⟩_II
//! ```
//!
//! with `s` the exponent scale (1 by default). Sums are truncated at a cutoff
//! `n_max` per mode; the discarded tail weight is computed in closed form.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::fock::{DensityOperator, FockError, FockVector, ModeLayout};
use crate::teleport::DualRailQubit;

/// Below this `tanh r` the channel is treated as exactly flat (r = 0).
pub const FLAT_TANH: f64 = 1e-100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("squeezing diverges: exp(-2π·M·Ω) rounds to 1 for M·Ω = {product:e}")]
    DivergentSqueezing { product: f64 },
    #[error("truncation tail {tail:e} exceeds budget {budget:e}")]
    TruncationBudgetExceeded { tail: f64, budget: f64 },
    #[error("no cutoff up to {cap} meets tail budget {epsilon:e} (tanh r = {tanh_r})")]
    CutoffInfeasible { cap: usize, epsilon: f64, tanh_r: f64 },
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Channel strength. `mass`/`frequency` are absent when built directly from `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezeParams {
    mass: Option<f64>,
    frequency: Option<f64>,
    r_squeeze: f64,
    tanh_r: f64,
    /// `1/cosh²r = 1 − tanh²r`, kept separately so it stays accurate as `tanh r → 1`.
    sech_sq: f64,
}

impl SqueezeParams {
    /// `tanh r = exp(−2π·scale·M·Ω)`.
    pub fn from_mass_frequency(mass: f64, frequency: f64, exponent_scale: f64) -> Result<Self, ChannelError> {
        positive("mass", mass)?;
        positive("frequency", frequency)?;
        positive("exponent scale", exponent_scale)?;
        let exponent = 2.0 * PI * exponent_scale * mass * frequency;
        let tanh_r = (-exponent).exp();
        if tanh_r >= 1.0 {
            return Err(ChannelError::DivergentSqueezing {
                product: mass * frequency,
            });
        }
        let mut p = if tanh_r < FLAT_TANH {
            Self::flat()
        } else {
            Self {
                mass: None,
                frequency: None,
                r_squeeze: tanh_r.atanh(),
                tanh_r,
                sech_sq: -(-2.0 * exponent).exp_m1(),
            }
        };
        p.mass = Some(mass);
        p.frequency = Some(frequency);
        Ok(p)
    }

    pub fn from_tanh(tanh_r: f64) -> Result<Self, ChannelError> {
        if !(0.0..1.0).contains(&tanh_r) {
            return Err(ChannelError::InvalidParameter(format!(
                "tanh r must lie in [0, 1), got {tanh_r}"
            )));
        }
        if tanh_r < FLAT_TANH {
            return Ok(Self::flat());
        }
        Ok(Self {
            mass: None,
            frequency: None,
            r_squeeze: tanh_r.atanh(),
            tanh_r,
            sech_sq: (1.0 - tanh_r) * (1.0 + tanh_r),
        })
    }

    pub fn from_r(r: f64) -> Result<Self, ChannelError> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(ChannelError::InvalidParameter(format!(
                "r must be finite and nonnegative, got {r}"
            )));
        }
        let cosh = r.cosh();
        Ok(Self {
            mass: None,
            frequency: None,
            r_squeeze: r,
            tanh_r: r.tanh(),
            sech_sq: 1.0 / (cosh * cosh),
        })
    }

    fn flat() -> Self {
        Self {
            mass: None,
            frequency: None,
            r_squeeze: 0.0,
            tanh_r: 0.0,
            sech_sq: 1.0,
        }
    }

    pub fn mass(&self) -> Option<f64> {
        self.mass
    }

    pub fn frequency(&self) -> Option<f64> {
        self.frequency
    }

    pub fn r_squeeze(&self) -> f64 {
        self.r_squeeze
    }

    pub fn tanh_r(&self) -> f64 {
        self.tanh_r
    }

    pub fn tanh_sq(&self) -> f64 {
        self.tanh_r * self.tanh_r
    }

    pub fn sech_sq(&self) -> f64 {
        self.sech_sq
    }

    pub fn cosh_r(&self) -> f64 {
        self.sech_sq.sqrt().recip()
    }

    pub fn sinh_r(&self) -> f64 {
        self.tanh_r * self.cosh_r()
    }

    pub fn is_flat(&self) -> bool {
        self.tanh_r == 0.0
    }
}

fn positive(name: &str, value: f64) -> Result<(), ChannelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ChannelError::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

/// Squeezing for black-hole mass `M` and mode frequency `Ω` (Planck units).
pub fn squeeze_param(mass: f64, frequency: f64) -> Result<SqueezeParams, ChannelError> {
    SqueezeParams::from_mass_frequency(mass, frequency, 1.0)
}

/// Mass from the event-horizon radius `r₊ = 2M`.
pub fn radius_to_mass(horizon_radius: f64) -> Result<f64, ChannelError> {
    positive("horizon radius", horizon_radius)?;
    Ok(horizon_radius / 2.0)
}

/// The two Schwarzschild modes (exterior and interior) paired with one Minkowski mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPair {
    region_i: String,
    region_ii: String,
}

impl RegionPair {
    pub fn new(region_i: impl Into<String>, region_ii: impl Into<String>) -> Result<Self, ChannelError> {
        let (region_i, region_ii) = (region_i.into(), region_ii.into());
        if region_i == region_ii {
            return Err(ChannelError::InvalidParameter(format!(
                "region labels must differ, both are `{region_i}`"
            )));
        }
        Ok(Self { region_i, region_ii })
    }

    pub fn region_i(&self) -> &str {
        &self.region_i
    }

    pub fn region_ii(&self) -> &str {
        &self.region_ii
    }

    pub fn layout(&self, n_max: usize) -> Result<ModeLayout, ChannelError> {
        Ok(ModeLayout::uniform(&[&self.region_i, &self.region_ii], n_max)?)
    }
}

/// A truncated embedded state and the weight its truncation dropped.
#[derive(Debug, Clone)]
pub struct Embedded {
    pub state: FockVector,
    pub tail: f64,
}

/// Tail weight of the vacuum embedding: `Σ_{n > n_max} tanh^{2n}r / cosh²r = tanh^{2(n_max+1)}r`.
pub fn zero_tail(params: &SqueezeParams, n_max: usize) -> f64 {
    params.tanh_sq().powi(n_max as i32 + 1)
}

/// Tail weight of the one-photon embedding, whose region-I occupation `n+1`
/// stops at `n_max`: `Σ_{n ≥ n_max} (n+1) x^n (1−x)² = x^{n_max}(1 + n_max(1−x))`, `x = tanh²r`.
pub fn one_tail(params: &SqueezeParams, n_max: usize) -> f64 {
    let x = params.tanh_sq();
    x.powi(n_max as i32) * (1.0 + n_max as f64 * params.sech_sq())
}

fn check_cutoff(n_max: usize) -> Result<(), ChannelError> {
    if n_max == 0 {
        return Err(ChannelError::InvalidParameter("cutoff n_max must be at least 1".into()));
    }
    Ok(())
}

fn check_budget(tail: f64, budget: f64) -> Result<(), ChannelError> {
    if tail > budget {
        Err(ChannelError::TruncationBudgetExceeded { tail, budget })
    } else {
        Ok(())
    }
}

/// Amplitude of `|n⟩_I|n⟩_II` in the vacuum embedding.
fn zero_coefficient(params: &SqueezeParams, n: usize) -> f64 {
    params.tanh_r.powi(n as i32) * params.sech_sq.sqrt()
}

/// Amplitude of `|n+1⟩_I|n⟩_II` in the one-photon embedding.
fn one_coefficient(params: &SqueezeParams, n: usize) -> f64 {
    params.tanh_r.powi(n as i32) * params.sech_sq * ((n + 1) as f64).sqrt()
}

/// Minkowski vacuum of one mode as seen across the horizon, truncated at `n_max`.
/// The state is not renormalized; `tail` is the missing weight.
pub fn embed_zero(
    params: &SqueezeParams,
    pair: &RegionPair,
    n_max: usize,
    epsilon: f64,
) -> Result<Embedded, ChannelError> {
    check_cutoff(n_max)?;
    let tail = zero_tail(params, n_max);
    check_budget(tail, epsilon)?;
    let layout = pair.layout(n_max)?;
    let mut amps = BTreeMap::new();
    for n in 0..=n_max {
        let a = zero_coefficient(params, n);
        if a == 0.0 {
            break;
        }
        amps.insert(layout.flat_index(&[n, n]).unwrap(), Complex64::new(a, 0.0));
    }
    Ok(Embedded {
        state: FockVector::from_map(layout, amps),
        tail,
    })
}

/// Minkowski one-photon state of one mode as seen across the horizon.
pub fn embed_one(
    params: &SqueezeParams,
    pair: &RegionPair,
    n_max: usize,
    epsilon: f64,
) -> Result<Embedded, ChannelError> {
    check_cutoff(n_max)?;
    let tail = one_tail(params, n_max);
    check_budget(tail, epsilon)?;
    let layout = pair.layout(n_max)?;
    let mut amps = BTreeMap::new();
    for n in 0..n_max {
        let a = one_coefficient(params, n);
        if a == 0.0 {
            break;
        }
        amps.insert(layout.flat_index(&[n + 1, n]).unwrap(), Complex64::new(a, 0.0));
    }
    Ok(Embedded {
        state: FockVector::from_map(layout, amps),
        tail,
    })
}

/// Dual-rail qubit `α|1,0⟩ + β|0,1⟩` pushed through the channel on two region pairs.
///
/// Output layout is `[p1.I, p1.II, p2.I, p2.II]`.
pub fn embed_dual_rail(
    qubit: &DualRailQubit,
    params: &SqueezeParams,
    pairs: (&RegionPair, &RegionPair),
    n_max: usize,
    epsilon: f64,
) -> Result<Embedded, ChannelError> {
    let (logical_zero, logical_one, tail) = dual_rail_basis(params, pairs, n_max)?;
    check_budget(tail, epsilon)?;
    let state = logical_zero
        .scaled(qubit.alpha())
        .add_scaled(qubit.beta(), &logical_one)?;
    Ok(Embedded { state, tail })
}

/// Embedded logical basis `(E|0_L⟩, E|1_L⟩)` and their common tail weight.
pub fn dual_rail_basis(
    params: &SqueezeParams,
    pairs: (&RegionPair, &RegionPair),
    n_max: usize,
) -> Result<(FockVector, FockVector, f64), ChannelError> {
    let (p1, p2) = pairs;
    let z1 = embed_zero(params, p1, n_max, 1.0)?;
    let o1 = embed_one(params, p1, n_max, 1.0)?;
    let z2 = embed_zero(params, p2, n_max, 1.0)?;
    let o2 = embed_one(params, p2, n_max, 1.0)?;
    let logical_zero = o1.state.tensor(&z2.state)?;
    let logical_one = z1.state.tensor(&o2.state)?;
    let tail = 1.0 - (1.0 - z1.tail) * (1.0 - o1.tail);
    Ok((logical_zero, logical_one, tail))
}

/// Region-I marginal of the embedded vacuum: thermal populations
/// `ρ_nn = tanh^{2n}r / cosh²r` for `n ≤ n_max`.
pub fn thermal_reduced(
    params: &SqueezeParams,
    mode: &str,
    n_max: usize,
    epsilon: f64,
) -> Result<DensityOperator, ChannelError> {
    check_cutoff(n_max)?;
    check_budget(zero_tail(params, n_max), epsilon)?;
    let layout = ModeLayout::uniform(&[mode], n_max)?;
    let x = params.tanh_sq();
    let pops = (0..=n_max)
        .map(|n| (n as u64, x.powi(n as i32) * params.sech_sq))
        .take_while(|&(n, p)| n == 0 || p > 0.0);
    Ok(DensityOperator::diagonal(layout, pops))
}

/// Smallest cutoff whose one-photon tail is within `epsilon`, searched up to `cap`.
pub fn required_cutoff(params: &SqueezeParams, epsilon: f64, cap: usize) -> Result<usize, ChannelError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ChannelError::InvalidParameter(format!(
            "tail budget must lie in (0, 1), got {epsilon}"
        )));
    }
    (1..=cap.max(1))
        .find(|&n| one_tail(params, n) <= epsilon)
        .ok_or(ChannelError::CutoffInfeasible {
            cap,
            epsilon,
            tanh_r: params.tanh_r,
        })
}
