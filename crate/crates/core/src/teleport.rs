//! Dual-rail teleportation from a flat-space sender to a receiver parked
//! outside the horizon.
//!
//! Mode layout of the full protocol state, in basis order:
//!
//! | modes            | role                                   | cutoff |
//! |------------------|----------------------------------------|--------|
//! | `C1, C2`         | input qubit held by Alice              | 1      |
//! | `A1, A2`         | Alice's half of the shared pair        | 1      |
//! | `B1.I, B1.II`    | Bob's first rail, exterior / interior  | n_max  |
//! | `B2.I, B2.II`    | Bob's second rail, exterior / interior | n_max  |
//!
//! Alice projects `C ⊗ A` onto the dual-rail Bell basis, Bob corrects on his
//! exterior modes, and the interior modes are traced out.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::channel::{self, ChannelError, RegionPair, SqueezeParams};
use crate::fock::{DensityOperator, FockError, FockVector, LocalOperator, ModeLayout, Tolerances};

/// Outcomes below this probability carry no usable conditional state.
pub const DEGENERATE_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TeleportError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Logical qubit `α|0_L⟩ + β|1_L⟩` with `|0_L⟩ = |1,0⟩`, `|1_L⟩ = |0,1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualRailQubit {
    alpha: Complex64,
    beta: Complex64,
}

impl DualRailQubit {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self, TeleportError> {
        Self::with_tolerance(alpha, beta, Tolerances::default().norm)
    }

    /// Accepts `|α|²+|β|²` within `tol` of 1, then renormalizes exactly.
    pub fn with_tolerance(alpha: Complex64, beta: Complex64, tol: f64) -> Result<Self, TeleportError> {
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > tol {
            return Err(TeleportError::InvalidConfig(format!(
                "qubit amplitudes must satisfy |α|²+|β|² = 1, got {norm_sqr}"
            )));
        }
        let s = norm_sqr.sqrt();
        Ok(Self {
            alpha: alpha / s,
            beta: beta / s,
        })
    }

    pub fn zero() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Physical state on two equally truncated modes.
    pub fn encode(&self, modes: (&str, &str), cutoff: usize) -> Result<FockVector, TeleportError> {
        let layout = ModeLayout::uniform(&[modes.0, modes.1], cutoff)?;
        Ok(FockVector::from_terms(
            layout,
            [(&[1, 0][..], self.alpha), (&[0, 1][..], self.beta)],
        )?)
    }
}

/// Alice's Bell-measurement result, named by the bit-flip / phase-flip bits
/// Bob must undo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OutcomeLabel {
    #[serde(rename = "00")]
    L00,
    #[serde(rename = "01")]
    L01,
    #[serde(rename = "10")]
    L10,
    #[serde(rename = "11")]
    L11,
}

impl OutcomeLabel {
    pub const ALL: [OutcomeLabel; 4] = [Self::L00, Self::L01, Self::L10, Self::L11];

    /// Bob's uncorrected logical amplitudes `(x, y)` for input `(α, β)`.
    pub fn conditional_amplitudes(self, qubit: &DualRailQubit) -> (Complex64, Complex64) {
        let (a, b) = (qubit.alpha, qubit.beta);
        match self {
            Self::L00 => (a, b),
            Self::L01 => (b, a),
            Self::L10 => (a, -b),
            Self::L11 => (-b, a),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::L00 => "00",
            Self::L01 => "01",
            Self::L10 => "10",
            Self::L11 => "11",
        }
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OutcomeLabel {
    type Err = TeleportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| TeleportError::InvalidConfig(format!("unknown outcome label `{s}`")))
    }
}

/// Mode names used by the protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolModes {
    pub input: (String, String),
    pub alice: (String, String),
    pub bob: (RegionPair, RegionPair),
}

impl Default for ProtocolModes {
    fn default() -> Self {
        Self {
            input: ("C1".into(), "C2".into()),
            alice: ("A1".into(), "A2".into()),
            bob: (
                RegionPair::new("B1.I", "B1.II").expect("distinct labels"),
                RegionPair::new("B2.I", "B2.II").expect("distinct labels"),
            ),
        }
    }
}

impl ProtocolModes {
    /// Bob's exterior (region-I) modes, which carry his received qubit.
    pub fn bob_exterior(&self) -> (&str, &str) {
        (self.bob.0.region_i(), self.bob.1.region_i())
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub params: SqueezeParams,
    /// Tail budget used to pick Bob's cutoff when `n_max_bob` is unset.
    pub epsilon_trunc: f64,
    /// Explicit cutoff for Bob's modes; bypasses the tail budget.
    pub n_max_bob: Option<usize>,
    /// Upper bound for the automatic cutoff search.
    pub max_cutoff: usize,
    pub input: DualRailQubit,
}

pub const DEFAULT_MAX_CUTOFF: usize = 60;

impl ProtocolConfig {
    pub fn new(params: SqueezeParams, input: DualRailQubit) -> Self {
        Self {
            params,
            epsilon_trunc: 1e-10,
            n_max_bob: None,
            max_cutoff: DEFAULT_MAX_CUTOFF,
            input,
        }
    }

    pub fn with_cutoff(mut self, n_max: usize) -> Self {
        self.n_max_bob = Some(n_max);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon_trunc = epsilon;
        self
    }

    pub fn validate(&self) -> Result<(), TeleportError> {
        if !(self.epsilon_trunc > 0.0 && self.epsilon_trunc <= 0.1) {
            return Err(TeleportError::InvalidConfig(format!(
                "epsilon must lie in (0, 0.1], got {}",
                self.epsilon_trunc
            )));
        }
        if self.n_max_bob == Some(0) || self.max_cutoff == 0 {
            return Err(TeleportError::InvalidConfig("cutoffs must be at least 1".into()));
        }
        Ok(())
    }

    /// Bob's cutoff: explicit, or the smallest one meeting the tail budget.
    pub fn bob_cutoff(&self) -> Result<usize, TeleportError> {
        match self.n_max_bob {
            Some(n) => Ok(n),
            None => Ok(channel::required_cutoff(
                &self.params,
                self.epsilon_trunc,
                self.max_cutoff,
            )?),
        }
    }
}

/// Shared pair and the weight its truncation dropped.
#[derive(Debug, Clone)]
pub struct BellResource {
    pub state: FockVector,
    pub tail: f64,
}

/// `(|0_L⟩_A ⊗ E|0_L⟩ + |1_L⟩_A ⊗ E|1_L⟩)/√2`, with `E` the horizon embedding
/// of Bob's rails. Layout `[A1, A2, B1.I, B1.II, B2.I, B2.II]`.
pub fn bell_resource(
    params: &SqueezeParams,
    modes: &ProtocolModes,
    n_max: usize,
    epsilon: f64,
) -> Result<BellResource, TeleportError> {
    let (e0, e1, tail) = channel::dual_rail_basis(params, (&modes.bob.0, &modes.bob.1), n_max)?;
    if tail > epsilon {
        return Err(ChannelError::TruncationBudgetExceeded { tail, budget: epsilon }.into());
    }
    let alice = (modes.alice.0.as_str(), modes.alice.1.as_str());
    let a0 = DualRailQubit::zero().encode(alice, 1)?;
    let a1 = DualRailQubit::one().encode(alice, 1)?;
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let state = a0
        .tensor(&e0)?
        .scaled(s)
        .add_scaled(s, &a1.tensor(&e1)?)?;
    Ok(BellResource { state, tail })
}

/// Dual-rail Bell basis on `(input, alice)` = `[C1, C2, A1, A2]`, cutoff 1.
///
/// `00 → Φ⁺`, `10 → Φ⁻`, `01 → Ψ⁺`, `11 → Ψ⁻ = (|0_L 1_L⟩ − |1_L 0_L⟩)/√2`,
/// which leaves Bob with the amplitudes of [`OutcomeLabel::conditional_amplitudes`].
pub fn bell_basis(modes: &ProtocolModes) -> Result<[(OutcomeLabel, FockVector); 4], TeleportError> {
    let layout = ModeLayout::uniform(
        &[&modes.input.0, &modes.input.1, &modes.alice.0, &modes.alice.1],
        1,
    )?;
    let rails = |bit: usize| if bit == 0 { [1, 0] } else { [0, 1] };
    let logical = |a: usize, b: usize| {
        let (ra, rb) = (rails(a), rails(b));
        [ra[0], ra[1], rb[0], rb[1]]
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let pair = |first: (usize, usize), second: (usize, usize), sign: f64| {
        let (o1, o2) = (logical(first.0, first.1), logical(second.0, second.1));
        FockVector::from_terms(
            layout.clone(),
            [(&o1[..], Complex64::new(s, 0.0)), (&o2[..], Complex64::new(sign * s, 0.0))],
        )
    };
    Ok([
        (OutcomeLabel::L00, pair((0, 0), (1, 1), 1.0)?),
        (OutcomeLabel::L01, pair((0, 1), (1, 0), 1.0)?),
        (OutcomeLabel::L10, pair((0, 0), (1, 1), -1.0)?),
        (OutcomeLabel::L11, pair((0, 1), (1, 0), -1.0)?),
    ])
}

/// Bob's recovery unitary on his two exterior modes, each truncated at `cutoff`.
///
/// `00` identity, `01` rail swap, `10` π phase on the second rail, `11` swap then phase.
pub fn correction(label: OutcomeLabel, cutoff: usize) -> LocalOperator {
    match label {
        OutcomeLabel::L00 => LocalOperator::identity((cutoff + 1) * (cutoff + 1)),
        OutcomeLabel::L01 => LocalOperator::swap(cutoff),
        OutcomeLabel::L10 => LocalOperator::parity_phase(cutoff),
        OutcomeLabel::L11 => LocalOperator::parity_phase(cutoff).compose(&LocalOperator::swap(cutoff)),
    }
}

/// `1/cosh⁶r`.
pub fn fidelity_analytic(params: &SqueezeParams) -> f64 {
    params.sech_sq().powi(3)
}

#[derive(Debug, Clone)]
pub struct TeleportOutcome {
    pub label: OutcomeLabel,
    /// Born probability of this result, unnormalized by the truncation loss.
    pub probability: f64,
    /// Bob's corrected exterior state, unit trace; absent for degenerate outcomes.
    pub conditional_state: Option<DensityOperator>,
    /// `⟨φ|ρ|φ⟩` against the input qubit; absent for degenerate outcomes.
    pub fidelity: Option<f64>,
}

impl TeleportOutcome {
    pub fn is_degenerate(&self) -> bool {
        self.fidelity.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct TeleportReport {
    pub n_max: usize,
    /// `1 − ‖ψ‖²` of the truncated protocol state.
    pub truncation_loss: f64,
    pub outcomes: Vec<TeleportOutcome>,
    pub fidelity_analytic: f64,
}

impl TeleportReport {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// Probability-weighted fidelity over the non-degenerate outcomes.
    pub fn mean_fidelity(&self) -> Option<f64> {
        let (num, den) = self
            .outcomes
            .iter()
            .filter_map(|o| o.fidelity.map(|f| (f * o.probability, o.probability)))
            .fold((0.0, 0.0), |(n, d), (a, b)| (n + a, d + b));
        (den > 0.0).then(|| num / den)
    }

    /// Max minus min fidelity across the non-degenerate outcomes.
    pub fn fidelity_spread(&self) -> f64 {
        let fs: Vec<f64> = self.outcomes.iter().filter_map(|o| o.fidelity).collect();
        let max = fs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = fs.iter().copied().fold(f64::INFINITY, f64::min);
        if fs.is_empty() {
            0.0
        } else {
            max - min
        }
    }

    pub fn has_degenerate_outcome(&self) -> bool {
        self.outcomes.iter().any(TeleportOutcome::is_degenerate)
    }
}

/// Runs the full protocol: input ⊗ resource, Bell projection per outcome,
/// correction on Bob's exterior modes, and trace over the interior modes.
pub fn run_protocol(config: &ProtocolConfig) -> Result<TeleportReport, TeleportError> {
    run_protocol_with(config, &ProtocolModes::default())
}

pub fn run_protocol_with(config: &ProtocolConfig, modes: &ProtocolModes) -> Result<TeleportReport, TeleportError> {
    config.validate()?;
    let n_max = config.bob_cutoff()?;
    let budget = if config.n_max_bob.is_some() {
        1.0
    } else {
        config.epsilon_trunc
    };
    let resource = bell_resource(&config.params, modes, n_max, budget)?;
    let input = config
        .input
        .encode((modes.input.0.as_str(), modes.input.1.as_str()), 1)?;
    let full = input.tensor(&resource.state)?;
    let truncation_loss = (1.0 - full.norm_sqr()).max(0.0);

    let exterior = modes.bob_exterior();
    let target = config.input.encode(exterior, n_max)?;
    let basis = bell_basis(modes)?;

    let outcomes = basis
        .par_iter()
        .map(|(label, bell)| -> Result<TeleportOutcome, TeleportError> {
            let projection = full.project(std::slice::from_ref(bell))?;
            let probability = projection.probability;
            if probability < DEGENERATE_PROBABILITY {
                return Ok(TeleportOutcome {
                    label: *label,
                    probability,
                    conditional_state: None,
                    fidelity: None,
                });
            }
            let bob = projection.pure().expect("rank-one projection");
            let corrected = bob.apply_local_map(exterior, &correction(*label, n_max))?;
            let rho = corrected.reduced_density(&[exterior.0, exterior.1])?;
            let fidelity = rho.expectation(&target)?.re;
            Ok(TeleportOutcome {
                label: *label,
                probability,
                conditional_state: Some(rho),
                fidelity: Some(fidelity),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(TeleportReport {
        n_max,
        truncation_loss,
        outcomes,
        fidelity_analytic: fidelity_analytic(&config.params),
    })
}

/// Weight of Bob's exterior single-excitation sector, measured versus the
/// closed-form `1/cosh⁶r`.
#[derive(Debug, Clone, Serialize)]
pub struct PremeasureReport {
    pub measured: f64,
    pub claimed: f64,
    pub per_outcome: Vec<(OutcomeLabel, f64)>,
}

/// Measures how much of Bob's received state sits in the one-photon dual-rail
/// manifold. The corrections preserve total photon number, so the corrected
/// conditional states give the same sector weights as the uncorrected ones.
pub fn premeasure_weight(config: &ProtocolConfig) -> Result<PremeasureReport, TeleportError> {
    let report = run_protocol(config)?;
    let per_outcome: Vec<(OutcomeLabel, f64)> = report
        .outcomes
        .iter()
        .filter_map(|o| o.conditional_state.as_ref().map(|rho| (o.label, rho.sector_weight(1))))
        .collect();
    let (num, den) = report
        .outcomes
        .iter()
        .filter_map(|o| {
            o.conditional_state
                .as_ref()
                .map(|rho| (rho.sector_weight(1) * o.probability, o.probability))
        })
        .fold((0.0, 0.0), |(n, d), (a, b)| (n + a, d + b));
    Ok(PremeasureReport {
        measured: if den > 0.0 { (num / den).clamp(0.0, 1.0) } else { 0.0 },
        claimed: fidelity_analytic(&config.params),
        per_outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn flat() -> SqueezeParams {
        SqueezeParams::from_tanh(0.0).unwrap()
    }

    #[test]
    fn qubit_validation() {
        assert!(DualRailQubit::new(c(1.0), c(1.0)).is_err());
        let q = DualRailQubit::with_tolerance(c(0.6), c(0.8 + 1e-8), 1e-6).unwrap();
        assert!((q.alpha().norm_sqr() + q.beta().norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_basis_is_orthonormal_two_photon() {
        let basis = bell_basis(&ProtocolModes::default()).unwrap();
        for (i, (_, a)) in basis.iter().enumerate() {
            for (j, (_, b)) in basis.iter().enumerate() {
                let g = a.inner(b).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((g - expected).norm() < 1e-14);
            }
            for (idx, _) in a.entries() {
                assert_eq!(a.layout().total_photons(idx), 2);
            }
        }
    }

    #[test]
    fn flat_resource_is_the_dual_rail_bell_pair() {
        let modes = ProtocolModes::default();
        let res = bell_resource(&flat(), &modes, 1, 1e-12).unwrap();
        assert_eq!(res.tail, 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(res.state.support_len(), 2);
        assert!((res.state.amplitude(&[1, 0, 1, 0, 0, 0]).re - s).abs() < 1e-15);
        assert!((res.state.amplitude(&[0, 1, 0, 0, 1, 0]).re - s).abs() < 1e-15);

        let alice = res.state.reduced_density(&["A1", "A2"]).unwrap();
        let l = alice.layout().clone();
        let i10 = l.flat_index(&[1, 0]).unwrap();
        let i01 = l.flat_index(&[0, 1]).unwrap();
        assert!((alice.element(i10, i10).re - 0.5).abs() < 1e-15);
        assert!((alice.element(i01, i01).re - 0.5).abs() < 1e-15);
        assert_eq!(alice.element(i10, i01), c(0.0));
    }

    #[test]
    fn resource_norm_at_half() {
        let p = SqueezeParams::from_tanh(0.5).unwrap();
        let res = bell_resource(&p, &ProtocolModes::default(), 30, 1.0).unwrap();
        assert!((res.state.norm() - 1.0).abs() < 1e-8);
    }

    /// Flat-space Bell projection leaves Bob with the textbook amplitudes.
    #[test]
    fn flat_conditional_amplitudes_follow_the_table() {
        let modes = ProtocolModes::default();
        let q = DualRailQubit::new(c(0.6), Complex64::new(0.0, 0.8)).unwrap();
        let res = bell_resource(&flat(), &modes, 1, 1e-12).unwrap();
        let full = q.encode(("C1", "C2"), 1).unwrap().tensor(&res.state).unwrap();
        for (label, bell) in bell_basis(&modes).unwrap() {
            let p = full.project(&[bell]).unwrap();
            assert!((p.probability - 0.25).abs() < 1e-15);
            let bob = p.pure().unwrap();
            let (x, y) = label.conditional_amplitudes(&q);
            assert!((bob.amplitude(&[1, 0, 0, 0]) - x).norm() < 1e-15, "{label}");
            assert!((bob.amplitude(&[0, 0, 1, 0]) - y).norm() < 1e-15, "{label}");
        }
    }

    #[test]
    fn corrections_undo_the_table() {
        let q = DualRailQubit::new(c(0.6), Complex64::new(0.0, 0.8)).unwrap();
        let target = q.encode(("p", "q"), 1).unwrap();
        assert_eq!(correction(OutcomeLabel::L00, 1), LocalOperator::identity(4));
        for label in OutcomeLabel::ALL {
            let (x, y) = label.conditional_amplitudes(&q);
            let received = DualRailQubit::new(x, y).unwrap().encode(("p", "q"), 1).unwrap();
            let fixed = received.apply_local_map(("p", "q"), &correction(label, 1)).unwrap();
            let diff = fixed.add_scaled(c(-1.0), &target).unwrap();
            assert!(diff.norm() < 1e-15, "{label}");
        }
    }

    #[test]
    fn flat_protocol_is_perfect() {
        let q = DualRailQubit::new(c(0.6), Complex64::new(0.0, 0.8)).unwrap();
        let report = run_protocol(&ProtocolConfig::new(flat(), q)).unwrap();
        assert_eq!(report.n_max, 1);
        assert_eq!(report.truncation_loss, 0.0);
        for o in &report.outcomes {
            assert!((o.probability - 0.25).abs() < 1e-12);
            assert!((o.fidelity.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn squeezed_protocol_at_half() {
        let p = SqueezeParams::from_tanh(0.5).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = DualRailQubit::new(c(s), c(s)).unwrap();
        let report = run_protocol(&ProtocolConfig::new(p, q).with_cutoff(30)).unwrap();
        assert_eq!(report.fidelity_analytic, 27.0 / 64.0);
        for o in &report.outcomes {
            assert!((o.fidelity.unwrap() - 0.421875).abs() < 1e-6);
            let rho = o.conditional_state.as_ref().unwrap();
            assert!(rho.hermiticity_deviation() < 1e-12);
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
        }
        assert!((report.total_probability() + report.truncation_loss - 1.0).abs() < 1e-10);
    }

    #[test]
    fn conditional_states_are_positive_at_small_cutoff() {
        let p = SqueezeParams::from_tanh(0.3).unwrap();
        let q = DualRailQubit::new(c(0.8), Complex64::new(0.36, 0.48)).unwrap();
        let report = run_protocol(&ProtocolConfig::new(p, q).with_cutoff(8)).unwrap();
        for o in &report.outcomes {
            o.conditional_state
                .as_ref()
                .unwrap()
                .check(1.0, &Tolerances::default())
                .unwrap();
        }
    }

    #[test]
    fn fidelity_analytic_values() {
        assert_eq!(fidelity_analytic(&flat()), 1.0);
        assert_eq!(fidelity_analytic(&SqueezeParams::from_tanh(0.5).unwrap()), 0.421875);
        let mut last = 1.0;
        for r in [0.5, 1.0, 2.0, 5.0, 20.0] {
            let f = fidelity_analytic(&SqueezeParams::from_r(r).unwrap());
            assert!(f < last);
            last = f;
        }
        assert!(last < 1e-30);
    }

    #[test]
    fn premeasure_report() {
        let q = DualRailQubit::zero();
        let rep = premeasure_weight(&ProtocolConfig::new(flat(), q)).unwrap();
        assert!((rep.measured - 1.0).abs() < 1e-12);
        assert_eq!(rep.claimed, 1.0);
        let p = SqueezeParams::from_tanh(0.5).unwrap();
        let rep = premeasure_weight(&ProtocolConfig::new(p, q)).unwrap();
        assert_eq!(rep.claimed, 0.421875);
        assert!((0.0..=1.0).contains(&rep.measured));
        assert_eq!(rep.per_outcome.len(), 4);
    }

    #[test]
    fn config_validation() {
        let q = DualRailQubit::zero();
        let cfg = ProtocolConfig::new(flat(), q).with_epsilon(0.5);
        assert!(matches!(run_protocol(&cfg), Err(TeleportError::InvalidConfig(_))));
        let cfg = ProtocolConfig::new(flat(), q).with_cutoff(0);
        assert!(run_protocol(&cfg).is_err());
        let hot = SqueezeParams::from_tanh(0.99).unwrap();
        let mut cfg = ProtocolConfig::new(hot, q);
        cfg.max_cutoff = 10;
        assert!(matches!(
            run_protocol(&cfg),
            Err(TeleportError::Channel(ChannelError::CutoffInfeasible { .. }))
        ));
    }

    #[test]
    fn label_parsing() {
        for l in OutcomeLabel::ALL {
            assert_eq!(l.as_str().parse::<OutcomeLabel>().unwrap(), l);
        }
        assert!("2".parse::<OutcomeLabel>().is_err());
    }
}
