//! Casimir interaction energy per unit length, torque, and parameter sweeps.
//!
//! The energy is `E/L = (1/4π) ∫₀^∞ y ln Q(iy) dy` per polarization, with
//! `ln Q` supplied by the collocation kernel. All lengths are in the
//! caller's units (the CLI fixes the inner radius to 1); energies come out
//! in 1/length².

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{validate_nested, BoundaryCurve};
use crate::kernel::{CollocationSetup, Polarization};
use crate::quadrature::{integrate_adaptive, QuadratureControls};

/// Relative reality tolerance: |Im ln Q| must stay below this times
/// max(1, |Re ln Q|) at every quadrature node.
const REALITY_TOLERANCE: f64 = 1e-8;

/// Positive ln Q beyond this absolute slack fails the run; below it the
/// value is rounding noise around Q = 1 and is clamped to zero.
const SIGN_SLACK: f64 = 1e-9;

/// Initial upper quadrature limit: `30 / min_gap`, the scale on which
/// `ln Q ~ e^{-2·gap·y}` has decayed to ~1e-26.
const Y_MAX_GAP_FACTOR: f64 = 30.0;

/// A single energy computation: geometry pair, mode cutoff, polarizations.
#[derive(Debug, Clone)]
pub struct EnergyConfig {
    pub inner: BoundaryCurve,
    pub outer: BoundaryCurve,
    /// Mode cutoff S; each curve carries 2S+1 collocation points.
    pub s: usize,
    pub polarizations: Vec<Polarization>,
    pub quadrature: QuadratureControls,
}

impl EnergyConfig {
    pub fn new(inner: BoundaryCurve, outer: BoundaryCurve, s: usize) -> Self {
        EnergyConfig {
            inner,
            outer,
            s,
            polarizations: vec![Polarization::Tm, Polarization::TeRadial],
            quadrature: QuadratureControls::default(),
        }
    }

    pub fn with_polarizations(mut self, pols: &[Polarization]) -> Self {
        self.polarizations = pols.to_vec();
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.quadrature.rel_tolerance = tol;
        self
    }
}

/// Energy per unit length with per-polarization breakdown and diagnostics.
#[derive(Debug, Clone)]
pub struct EnergyResult {
    /// Sum over the requested polarizations, in 1/length².
    pub energy: f64,
    /// Per-polarization contributions in request order.
    pub parts: Vec<(Polarization, f64)>,
    /// Quadrature error estimate (same units as `energy`).
    pub quad_error: f64,
    /// Largest |Im ln Q| seen at any node.
    pub max_im_residual: f64,
    /// Smallest equilibrated pivot ratio seen in any collocation solve; a
    /// conditioning indicator for the grid.
    pub min_pivot_ratio: f64,
    /// Total integrand evaluations.
    pub nodes: usize,
    /// Largest upper integration limit used.
    pub y_max: f64,
}

/// Evaluates the energy integral for every requested polarization.
pub fn casimir_energy(config: &EnergyConfig) -> Result<EnergyResult> {
    if config.polarizations.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one polarization must be requested".into(),
        ));
    }
    let gap = validate_nested(&config.inner, &config.outer)?;
    let hi_hint = Y_MAX_GAP_FACTOR / gap;

    let mut parts = Vec::with_capacity(config.polarizations.len());
    let mut quad_error = 0.0;
    let mut max_im = 0.0f64;
    let mut min_pivot = f64::INFINITY;
    let mut nodes = 0usize;
    let mut y_max_used = 0.0f64;

    for &pol in &config.polarizations {
        let setup = CollocationSetup::new(&config.inner, &config.outer, config.s, pol)?;
        let mut worst_im = 0.0f64;
        let mut worst_pivot = f64::INFINITY;
        let integrand = |y: f64| -> Result<f64> {
            let lq = setup.log_q(y)?;
            if lq.im_residual > REALITY_TOLERANCE * lq.value.abs().max(1.0) {
                return Err(Error::RealityViolation {
                    y,
                    residual: lq.im_residual,
                });
            }
            if lq.value > SIGN_SLACK {
                return Err(Error::SignViolation { y, value: lq.value });
            }
            if lq.im_residual > worst_im {
                worst_im = lq.im_residual;
            }
            if lq.min_pivot_ratio < worst_pivot {
                worst_pivot = lq.min_pivot_ratio;
            }
            Ok(y * lq.value.min(0.0))
        };
        let est = integrate_adaptive(
            integrand,
            config.quadrature.y_min,
            hi_hint,
            &config.quadrature,
        )?;
        let scale = 1.0 / (4.0 * std::f64::consts::PI);
        parts.push((pol, est.value * scale));
        quad_error += est.error * scale;
        nodes += est.evaluations;
        y_max_used = y_max_used.max(est.upper_limit);
        max_im = max_im.max(worst_im);
        min_pivot = min_pivot.min(worst_pivot);
    }

    Ok(EnergyResult {
        energy: parts.iter().map(|(_, e)| e).sum(),
        parts,
        quad_error,
        max_im_residual: max_im,
        min_pivot_ratio: min_pivot,
        nodes,
        y_max: y_max_used,
    })
}

/// Concentric corrugated pair: inner corrugation `h sin(νθ)`, outer
/// corrugation rotated rigidly by `phi0` (outer phase `−ν·phi0`), so the
/// interaction energy varies as `cos(ν·phi0)` and the configuration is
/// periodic in `phi0` with period `2π/ν`.
#[derive(Debug, Clone)]
pub struct CorrugatedPair {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub amplitude: f64,
    pub frequency: u32,
}

impl CorrugatedPair {
    pub fn curves(&self, phi0: f64) -> (BoundaryCurve, BoundaryCurve) {
        (
            BoundaryCurve::CorrugatedCircle {
                mean_radius: self.inner_radius,
                amplitude: self.amplitude,
                frequency: self.frequency,
                phase: 0.0,
            },
            BoundaryCurve::CorrugatedCircle {
                mean_radius: self.outer_radius,
                amplitude: self.amplitude,
                frequency: self.frequency,
                phase: -(self.frequency as f64) * phi0,
            },
        )
    }

    pub fn config(&self, phi0: f64, s: usize) -> EnergyConfig {
        let (inner, outer) = self.curves(phi0);
        EnergyConfig::new(inner, outer, s)
    }
}

/// Torque per unit length with propagated quadrature diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct TorqueResult {
    /// `𝒯 = −∂(E/L)/∂φ₀`, same 1/length² units as the energy per length.
    pub torque: f64,
    /// Quadrature error of the difference quotient.
    pub quad_error: f64,
    pub max_im_residual: f64,
    pub nodes: usize,
    pub y_max: f64,
}

/// Casimir torque per unit length about the corrugation rotation angle:
/// `𝒯 = −∂E/∂φ₀` by central finite difference.
pub fn torque(
    pair: &CorrugatedPair,
    s: usize,
    polarizations: &[Polarization],
    quadrature: &QuadratureControls,
    phi0: f64,
    step: f64,
) -> Result<TorqueResult> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidParameter(
            "torque step must be positive".into(),
        ));
    }
    let energy_at = |phi: f64| -> Result<EnergyResult> {
        let mut cfg = pair.config(phi, s).with_polarizations(polarizations);
        cfg.quadrature = quadrature.clone();
        casimir_energy(&cfg)
    };
    let (plus, minus) = rayon::join(|| energy_at(phi0 + step), || energy_at(phi0 - step));
    let (plus, minus) = (plus?, minus?);
    Ok(TorqueResult {
        torque: -(plus.energy - minus.energy) / (2.0 * step),
        quad_error: (plus.quad_error + minus.quad_error) / (2.0 * step),
        max_im_residual: plus.max_im_residual.max(minus.max_im_residual),
        nodes: plus.nodes + minus.nodes,
        y_max: plus.y_max.max(minus.y_max),
    })
}

/// Default torque step, `π/(50ν)`.
pub fn default_torque_step(frequency: u32) -> f64 {
    std::f64::consts::PI / (50.0 * frequency as f64)
}

/// Sweep axis over the geometry family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Eccentricity of the outer body along x, in units of the inner radius.
    Delta,
    /// Outer/inner size ratio; rescales the outer body.
    Alpha,
    /// Corrugation rotation angle.
    Phi0,
    /// Inner-cylinder displacement along x (outer body shifted by −ε_x).
    EpsX,
    /// Inner-cylinder displacement along y.
    EpsY,
}

impl SweepAxis {
    pub fn label(&self) -> &'static str {
        match self {
            SweepAxis::Delta => "delta",
            SweepAxis::Alpha => "alpha",
            SweepAxis::Phi0 => "phi0",
            SweepAxis::EpsX => "eps_x",
            SweepAxis::EpsY => "eps_y",
        }
    }
}

/// A parameter sweep: base configuration plus the axis to vary.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: EnergyConfig,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    /// Subtract, per point, the reference configuration with all offsets
    /// (eccentricity, displacement, corrugation rotation) removed.
    pub subtract_baseline: bool,
    /// Evaluate points sequentially for bitwise-reproducible runs.
    pub deterministic: bool,
}

/// One sweep point; failures are recorded without aborting the sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub result: Result<EnergyResult>,
    pub delta_vs_baseline: Option<f64>,
}

/// Applies an axis value to the geometry pair.
fn apply_axis(
    inner: &BoundaryCurve,
    outer: &BoundaryCurve,
    axis: SweepAxis,
    value: f64,
) -> Result<(BoundaryCurve, BoundaryCurve)> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sweep value must be finite, got {value}"
        )));
    }
    let inner_radius = match *inner {
        BoundaryCurve::Circle { radius } => radius,
        BoundaryCurve::CorrugatedCircle { mean_radius, .. } => mean_radius,
        _ => 1.0,
    };
    let mut outer = outer.clone();
    match axis {
        SweepAxis::Delta | SweepAxis::EpsX | SweepAxis::EpsY => {
            let shift = value * inner_radius;
            let center = match &mut outer {
                BoundaryCurve::EccentricCircle { center, .. } => center,
                BoundaryCurve::Ellipse { center, .. } => center,
                BoundaryCurve::Parabola { center, .. } => center,
                BoundaryCurve::Circle { radius } => {
                    outer = BoundaryCurve::EccentricCircle {
                        radius: *radius,
                        center: (0.0, 0.0),
                    };
                    match &mut outer {
                        BoundaryCurve::EccentricCircle { center, .. } => center,
                        _ => unreachable!(),
                    }
                }
                BoundaryCurve::CorrugatedCircle { .. } => {
                    return Err(Error::InvalidParameter(
                        "displacement sweeps are not defined for corrugated outers".into(),
                    ));
                }
            };
            // the sweep value is the inner-cylinder position relative to the
            // outer body's center, hence the sign flip
            match axis {
                SweepAxis::EpsY => center.1 = -shift,
                _ => center.0 = -shift,
            }
        }
        SweepAxis::Alpha => match &mut outer {
            BoundaryCurve::Circle { radius } => *radius = value * inner_radius,
            BoundaryCurve::EccentricCircle { radius, .. } => *radius = value * inner_radius,
            BoundaryCurve::CorrugatedCircle { mean_radius, .. } => {
                *mean_radius = value * inner_radius
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "alpha sweeps need a circular or corrugated outer".into(),
                ));
            }
        },
        SweepAxis::Phi0 => match &mut outer {
            BoundaryCurve::CorrugatedCircle {
                frequency, phase, ..
            } => {
                *phase = -(*frequency as f64) * value;
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "phi0 sweeps need a corrugated outer".into(),
                ));
            }
        },
    }
    Ok((inner.clone(), outer))
}

/// Removes eccentricity/displacement/rotation from a curve (the baseline of
/// the ΔE columns).
fn zero_offsets(curve: &BoundaryCurve) -> BoundaryCurve {
    match curve.clone() {
        BoundaryCurve::EccentricCircle { radius, .. } => BoundaryCurve::Circle { radius },
        BoundaryCurve::Ellipse {
            semi_minor,
            semi_major,
            ..
        } => BoundaryCurve::Ellipse {
            semi_minor,
            semi_major,
            center: (0.0, 0.0),
        },
        BoundaryCurve::Parabola {
            focal_distance,
            theta_cut,
            ..
        } => BoundaryCurve::Parabola {
            focal_distance,
            theta_cut,
            center: (0.0, 0.0),
        },
        BoundaryCurve::CorrugatedCircle {
            mean_radius,
            amplitude,
            frequency,
            ..
        } => BoundaryCurve::CorrugatedCircle {
            mean_radius,
            amplitude,
            frequency,
            phase: 0.0,
        },
        c @ BoundaryCurve::Circle { .. } => c,
    }
}

fn sweep_point(spec: &SweepSpec, value: f64) -> SweepPoint {
    let run = || -> Result<(EnergyResult, Option<f64>)> {
        let (inner, outer) = apply_axis(&spec.base.inner, &spec.base.outer, spec.axis, value)?;
        let mut cfg = spec.base.clone();
        cfg.inner = inner;
        cfg.outer = outer;
        let result = casimir_energy(&cfg)?;
        let delta = if spec.subtract_baseline {
            let mut base_cfg = cfg.clone();
            base_cfg.inner = zero_offsets(&base_cfg.inner);
            base_cfg.outer = zero_offsets(&base_cfg.outer);
            let baseline = casimir_energy(&base_cfg)?;
            Some(result.energy - baseline.energy)
        } else {
            None
        };
        Ok((result, delta))
    };
    match run() {
        Ok((result, delta)) => SweepPoint {
            value,
            result: Ok(result),
            delta_vs_baseline: delta,
        },
        Err(e) => SweepPoint {
            value,
            result: Err(e),
            delta_vs_baseline: None,
        },
    }
}

/// Runs the sweep; per-point failures are recorded in the returned points.
/// Points are independent, so they are evaluated in parallel unless the
/// spec asks for a deterministic sequential pass (results are identical
/// either way; the flag only pins the execution order).
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    if spec.values.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one value".into(),
        ));
    }
    if spec.deterministic {
        Ok(spec.values.iter().map(|&v| sweep_point(spec, v)).collect())
    } else {
        Ok(spec
            .values
            .par_iter()
            .map(|&v| sweep_point(spec, v))
            .collect())
    }
}
