//! Fidelity surfaces over (horizon radius, frequency) and cutoff convergence studies.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::channel::{self, ChannelError, SqueezeParams};
use crate::teleport::{self, DualRailQubit, ProtocolConfig, TeleportError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid cutoff list: {0}")]
    InvalidCutoffs(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Teleport(#[from] TeleportError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisScale {
    Linear,
    Log,
}

/// Rectangular grid over horizon radius and mode frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub radius_min: f64,
    pub radius_max: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub radius_steps: usize,
    pub omega_steps: usize,
    pub radius_scale: AxisScale,
    pub omega_scale: AxisScale,
}

impl Default for SweepGrid {
    /// Radius 1e-4..1 and Ω 1e-3..1, 50×50, logarithmic on both axes.
    fn default() -> Self {
        Self {
            radius_min: 1e-4,
            radius_max: 1.0,
            omega_min: 1e-3,
            omega_max: 1.0,
            radius_steps: 50,
            omega_steps: 50,
            radius_scale: AxisScale::Log,
            omega_scale: AxisScale::Log,
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        let axes = [
            ("radius", self.radius_min, self.radius_max, self.radius_steps),
            ("omega", self.omega_min, self.omega_max, self.omega_steps),
        ];
        for (name, min, max, steps) in axes {
            if !(min > 0.0 && min.is_finite() && max.is_finite()) {
                return Err(AnalysisError::InvalidGrid(format!("{name} bounds must be positive and finite")));
            }
            if min >= max {
                return Err(AnalysisError::InvalidGrid(format!("{name} min {min} must be below max {max}")));
            }
            if steps < 2 {
                return Err(AnalysisError::InvalidGrid(format!("{name} needs at least 2 steps")));
            }
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        axis(self.radius_min, self.radius_max, self.radius_steps, self.radius_scale)
    }

    pub fn omegas(&self) -> Vec<f64> {
        axis(self.omega_min, self.omega_max, self.omega_steps, self.omega_scale)
    }

    pub fn point_count(&self) -> usize {
        self.radius_steps * self.omega_steps
    }
}

fn axis(min: f64, max: f64, steps: usize, scale: AxisScale) -> Vec<f64> {
    let last = steps - 1;
    (0..steps)
        .map(|k| match k {
            0 => min,
            k if k == last => max,
            k => {
                let t = k as f64 / last as f64;
                match scale {
                    AxisScale::Linear => min + t * (max - min),
                    AxisScale::Log => (min.ln() + t * (max.ln() - min.ln())).exp(),
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Analytic,
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub mode: SweepMode,
    pub epsilon: f64,
    pub max_cutoff: usize,
    pub exponent_scale: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            mode: SweepMode::Analytic,
            epsilon: 1e-10,
            max_cutoff: 40,
            exponent_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordFlag {
    /// `exp(−2πMΩ)` rounds to 1; fidelity recorded as 0.
    Divergent,
    /// Required cutoff exceeds the cap; analytic value only.
    CutoffInfeasible,
    /// At least one Bell outcome had negligible probability.
    DegenerateOutcome,
}

impl RecordFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Divergent => "divergent",
            Self::CutoffInfeasible => "cutoff_infeasible",
            Self::DegenerateOutcome => "degenerate_outcome",
        }
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub radius: f64,
    pub omega: f64,
    pub mass: f64,
    pub r_squeeze: Option<f64>,
    pub fidelity_analytic: f64,
    pub fidelity_numeric: Option<f64>,
    pub n_max: Option<usize>,
    pub truncation_loss: Option<f64>,
    pub flags: Vec<RecordFlag>,
}

/// Input used for simulated grid points.
pub fn sweep_probe() -> DualRailQubit {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DualRailQubit::new(Complex64::new(s, 0.0), Complex64::new(s, 0.0)).expect("normalized")
}

/// Evaluates a single (radius, Ω) point. Only invalid inputs are errors;
/// divergence and infeasible cutoffs are flagged on the record.
pub fn evaluate_point(radius: f64, omega: f64, opts: &SweepOptions) -> Result<SweepRecord, AnalysisError> {
    let mass = channel::radius_to_mass(radius)?;
    let mut record = SweepRecord {
        radius,
        omega,
        mass,
        r_squeeze: None,
        fidelity_analytic: 0.0,
        fidelity_numeric: None,
        n_max: None,
        truncation_loss: None,
        flags: Vec::new(),
    };
    let params = match SqueezeParams::from_mass_frequency(mass, omega, opts.exponent_scale) {
        Ok(p) => p,
        Err(ChannelError::DivergentSqueezing { .. }) => {
            record.flags.push(RecordFlag::Divergent);
            return Ok(record);
        }
        Err(e) => return Err(e.into()),
    };
    record.r_squeeze = Some(params.r_squeeze());
    record.fidelity_analytic = teleport::fidelity_analytic(&params);
    if opts.mode == SweepMode::Simulate {
        let mut config = ProtocolConfig::new(params, sweep_probe()).with_epsilon(opts.epsilon);
        config.max_cutoff = opts.max_cutoff;
        match teleport::run_protocol(&config) {
            Ok(report) => {
                record.fidelity_numeric = report.mean_fidelity().map(|f| f.clamp(0.0, 1.0));
                record.n_max = Some(report.n_max);
                record.truncation_loss = Some(report.truncation_loss);
                if report.has_degenerate_outcome() {
                    record.flags.push(RecordFlag::DegenerateOutcome);
                }
            }
            Err(TeleportError::Channel(ChannelError::CutoffInfeasible { .. })) => {
                record.flags.push(RecordFlag::CutoffInfeasible);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(record)
}

/// Evaluates every grid point, radius-major. Points may run in parallel;
/// output order is fixed by grid index.
pub fn sweep(grid: &SweepGrid, opts: &SweepOptions) -> Result<Vec<SweepRecord>, AnalysisError> {
    grid.validate()?;
    if opts.mode == SweepMode::Simulate && !(opts.epsilon > 0.0 && opts.epsilon <= 0.1) {
        return Err(AnalysisError::InvalidGrid(format!(
            "epsilon must lie in (0, 0.1], got {}",
            opts.epsilon
        )));
    }
    let radii = grid.radii();
    let omegas = grid.omegas();
    let points: Vec<(f64, f64)> = radii
        .iter()
        .flat_map(|&r| omegas.iter().map(move |&w| (r, w)))
        .collect();
    points
        .par_iter()
        .map(|&(r, w)| evaluate_point(r, w, opts))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n_max: usize,
    pub abs_error: f64,
    pub truncation_loss: f64,
}

/// `|F_numeric(n_max) − 1/cosh⁶r|` along an ascending list of Bob cutoffs.
pub fn convergence_report(
    params: &SqueezeParams,
    cutoffs: &[usize],
    input: &DualRailQubit,
) -> Result<Vec<ConvergenceRow>, AnalysisError> {
    if cutoffs.is_empty() {
        return Err(AnalysisError::InvalidCutoffs("no cutoffs given".into()));
    }
    if cutoffs.contains(&0) {
        return Err(AnalysisError::InvalidCutoffs("cutoffs must be at least 1".into()));
    }
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::InvalidCutoffs("cutoffs must be strictly ascending".into()));
    }
    cutoffs
        .par_iter()
        .map(|&n| {
            let report = teleport::run_protocol(&ProtocolConfig::new(*params, *input).with_cutoff(n))?;
            let numeric = report.mean_fidelity().unwrap_or(0.0);
            Ok(ConvergenceRow {
                n_max: n,
                abs_error: (numeric - report.fidelity_analytic).abs(),
                truncation_loss: report.truncation_loss,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_axes_hit_endpoints() {
        let g = SweepGrid::default();
        let r = g.radii();
        assert_eq!(r.len(), 50);
        assert_eq!(r[0], 1e-4);
        assert_eq!(r[49], 1.0);
        assert!(r.windows(2).all(|w| w[0] < w[1]));
        let lin = axis(1.0, 2.0, 3, AxisScale::Linear);
        assert_eq!(lin, vec![1.0, 1.5, 2.0]);
    }

    #[test]
    fn grid_validation() {
        let bad = [
            SweepGrid { radius_steps: 1, ..SweepGrid::default() },
            SweepGrid { omega_min: 2.0, ..SweepGrid::default() },
            SweepGrid { radius_min: 0.0, ..SweepGrid::default() },
        ];
        for g in bad {
            assert!(g.validate().is_err());
        }
    }

    #[test]
    fn two_by_two_is_radius_major() {
        let g = SweepGrid {
            radius_steps: 2,
            omega_steps: 2,
            ..SweepGrid::default()
        };
        let recs = sweep(&g, &SweepOptions::default()).unwrap();
        let coords: Vec<(f64, f64)> = recs.iter().map(|r| (r.radius, r.omega)).collect();
        assert_eq!(coords, vec![(1e-4, 1e-3), (1e-4, 1.0), (1.0, 1e-3), (1.0, 1.0)]);
        let corner = &recs[3];
        let expected = (1.0 - (-2.0 * std::f64::consts::PI).exp()).powi(3);
        assert!((corner.fidelity_analytic - expected).abs() < 1e-12);
        assert!((corner.fidelity_analytic - 0.9944).abs() < 1e-4);
        assert!(recs[0].fidelity_analytic < 1e-15);
        assert!(recs.iter().all(|r| r.mass == r.radius / 2.0));
    }

    #[test]
    fn divergent_points_are_flagged() {
        let rec = evaluate_point(1e-30, 1e-3, &SweepOptions::default()).unwrap();
        assert_eq!(rec.flags, vec![RecordFlag::Divergent]);
        assert_eq!(rec.fidelity_analytic, 0.0);
        assert!(evaluate_point(0.0, 1.0, &SweepOptions::default()).is_err());
    }

    #[test]
    fn simulated_points() {
        let opts = SweepOptions {
            mode: SweepMode::Simulate,
            ..SweepOptions::default()
        };
        let rec = evaluate_point(1.0, 1.0, &opts).unwrap();
        assert!((rec.fidelity_numeric.unwrap() - rec.fidelity_analytic).abs() < 1e-6);
        assert!(rec.n_max.is_some());
        let cold = evaluate_point(1e-4, 1e-3, &opts).unwrap();
        assert_eq!(cold.flags, vec![RecordFlag::CutoffInfeasible]);
        assert!(cold.fidelity_numeric.is_none());
    }

    #[test]
    fn convergence_columns() {
        let flat = SqueezeParams::from_tanh(0.0).unwrap();
        let rows = convergence_report(&flat, &[1, 2], &sweep_probe()).unwrap();
        assert!(rows.iter().all(|r| r.abs_error <= 1e-12));

        let half = SqueezeParams::from_tanh(0.5).unwrap();
        let rows = convergence_report(&half, &[5, 10, 20, 30], &sweep_probe()).unwrap();
        assert!(rows.windows(2).all(|w| w[1].abs_error < w[0].abs_error));
        assert!(rows.last().unwrap().abs_error <= 1e-6);

        assert!(convergence_report(&half, &[], &sweep_probe()).is_err());
        assert!(convergence_report(&half, &[5, 5], &sweep_probe()).is_err());
    }
}
