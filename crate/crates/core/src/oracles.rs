//! Independent closed-form and perturbative evaluators used to validate the
//! collocation pipeline.
//!
//! - Concentric cylinders: the interaction energy reduces to a product over
//!   angular modes, `E/L = (1/4π) ∫ y Σ_m ln[1 − I_m(ya)K_m(yb)/(I_m(yb)K_m(ya))] dy`
//!   (TE with the derivatives instead). This never touches the matrix path.
//! - Corrugated cylinders at small amplitude: the second-order amplitude of
//!   the `cos(ν·φ₀)` energy variation,
//!   `E/(π r₊ L) = cos(νφ₀) · (π²/240 r₋⁵) · h² · B_ν(y)`, `y = r₋/r₊`,
//!   with `B_ν` an x-integral over mode sums of `D_m` denominators.
//! - The parallel-plate proximity estimate, used only as a sanity band.

use crate::energy::EnergyResult;
use crate::error::{Error, Result};
use crate::kernel::Polarization;
use crate::quadrature::{integrate_adaptive, QuadratureControls};
use crate::scaled::ScaledValue;
use crate::specfun;

/// Relative size at which the concentric mode sum stops adding terms.
const MODE_TAIL_CUT: f64 = 1e-16;

/// Hard cap on the adaptive mode cutoff.
const MODE_HARD_CAP: usize = 32_768;

/// Σ_{|m|≤cap} ln(1 − ratio_m) for the concentric geometry at one frequency.
fn mode_sum(a: f64, b: f64, y: f64, te: bool, cap: usize) -> Result<(f64, bool)> {
    let (ia, ka, ib, kb) = if te {
        (
            specfun::bessel_i_prime_family(cap, y * a)?,
            specfun::bessel_k_prime_family(cap, y * a)?,
            specfun::bessel_i_prime_family(cap, y * b)?,
            specfun::bessel_k_prime_family(cap, y * b)?,
        )
    } else {
        (
            specfun::bessel_i_family(cap, y * a)?,
            specfun::bessel_k_family(cap, y * a)?,
            specfun::bessel_i_family(cap, y * b)?,
            specfun::bessel_k_family(cap, y * b)?,
        )
    };
    let mut total = 0.0f64;
    for m in 0..=cap {
        let ratio = ia[m].mul(&kb[m]).div(&ib[m].mul(&ka[m])).value();
        let term = (-ratio).ln_1p();
        total += if m == 0 { term } else { 2.0 * term };
        if m >= 2 && (term == 0.0 || term.abs() < MODE_TAIL_CUT * total.abs()) {
            return Ok((total, true));
        }
    }
    Ok((total, false))
}

/// The concentric log-determinant `Σ_m ln(1 − ratio_m)`; `m_max: None` grows
/// the cutoff until the tail is negligible, `Some(S)` truncates exactly as
/// the 2S+1-point collocation does.
pub fn concentric_log_q(
    a: f64,
    b: f64,
    y: f64,
    pol: Polarization,
    m_max: Option<usize>,
) -> Result<f64> {
    let te = match pol {
        Polarization::Tm => false,
        Polarization::TeRadial | Polarization::TeNormal => true,
    };
    match m_max {
        Some(cap) => Ok(mode_sum(a, b, y, te, cap)?.0),
        None => {
            let mut cap = 32;
            loop {
                let (total, converged) = mode_sum(a, b, y, te, cap)?;
                if converged {
                    return Ok(total);
                }
                cap *= 2;
                if cap > MODE_HARD_CAP {
                    return Err(Error::NonConvergence(format!(
                        "concentric mode sum still growing at m={MODE_HARD_CAP}"
                    )));
                }
            }
        }
    }
}

fn concentric_energy(
    a: f64,
    b: f64,
    pol: Polarization,
    quad: &QuadratureControls,
    m_max: Option<usize>,
) -> Result<EnergyResult> {
    if !(a.is_finite() && b.is_finite()) || a <= 0.0 || b <= a {
        return Err(Error::InvalidParameter(format!(
            "need 0 < a < b, got a={a}, b={b}"
        )));
    }
    let est = integrate_adaptive(
        |y| Ok(y * concentric_log_q(a, b, y, pol, m_max)?),
        quad.y_min,
        30.0 / (b - a),
        quad,
    )?;
    let scale = 1.0 / (4.0 * std::f64::consts::PI);
    Ok(EnergyResult {
        energy: est.value * scale,
        parts: vec![(pol, est.value * scale)],
        quad_error: est.error * scale,
        max_im_residual: 0.0,
        // the mode sum is diagonal; no matrix to condition
        min_pivot_ratio: 1.0,
        nodes: est.evaluations,
        y_max: est.upper_limit,
    })
}

/// Concentric TM (Dirichlet) interaction energy per unit length.
pub fn concentric_tm(
    a: f64,
    b: f64,
    quad: &QuadratureControls,
    m_max: Option<usize>,
) -> Result<EnergyResult> {
    concentric_energy(a, b, Polarization::Tm, quad, m_max)
}

/// Concentric TE (Neumann) interaction energy per unit length.
pub fn concentric_te(
    a: f64,
    b: f64,
    quad: &QuadratureControls,
    m_max: Option<usize>,
) -> Result<EnergyResult> {
    concentric_energy(a, b, Polarization::TeRadial, quad, m_max)
}

/// Parallel-plate proximity estimate for nested cylinders at small gap,
/// `−π³ a / (360 (b−a)³)` per unit length (both polarizations combined).
/// A sanity band, not ground truth.
pub fn pfa_concentric(a: f64, b: f64) -> f64 {
    let d = b - a;
    -std::f64::consts::PI.powi(3) * a / (360.0 * d * d * d)
}

/// `D_m(y; x) = I_m(x[1+y]) K_m(x[1−y]) − I_m(x[1−y]) K_m(x[1+y])`,
/// positive for 0 < y < 1.
pub fn d_m(m: i32, y: f64, x: f64) -> Result<f64> {
    Ok(d_m_scaled(m.unsigned_abs() as usize, y, x)?.value())
}

fn d_m_scaled(m: usize, y: f64, x: f64) -> Result<ScaledValue> {
    if !y.is_finite() || y <= 0.0 || y >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "D_m needs 0 < y < 1, got {y}"
        )));
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::InvalidParameter(format!("D_m needs x > 0, got {x}")));
    }
    let xp = x * (1.0 + y);
    let xm = x * (1.0 - y);
    let ip = specfun::bessel_i(m as i32, xp)?;
    let im = specfun::bessel_i(m as i32, xm)?;
    let kp = specfun::bessel_k(m as i32, xp)?;
    let km = specfun::bessel_k(m as i32, xm)?;
    Ok(ip.mul(&km).sub(&im.mul(&kp)))
}

/// Family version used by the `B_ν` integrand: `D_0 … D_max` at one `x`.
fn d_family(max_order: usize, y: f64, x: f64) -> Result<Vec<ScaledValue>> {
    let xp = x * (1.0 + y);
    let xm = x * (1.0 - y);
    let ip = specfun::bessel_i_family(max_order, xp)?;
    let im = specfun::bessel_i_family(max_order, xm)?;
    let kp = specfun::bessel_k_family(max_order, xp)?;
    let km = specfun::bessel_k_family(max_order, xm)?;
    Ok((0..=max_order)
        .map(|m| ip[m].mul(&km[m]).sub(&im[m].mul(&kp[m])))
        .collect())
}

/// Controls for the `B_ν` double (mode sum × integral) evaluation.
#[derive(Debug, Clone)]
pub struct BNuControls {
    /// Relative tolerance of the x-integral.
    pub rel_tolerance: f64,
    /// Relative size at which the mode sum tail is declared negligible.
    pub mode_tail: f64,
}

impl Default for BNuControls {
    fn default() -> Self {
        BNuControls {
            rel_tolerance: 1e-8,
            mode_tail: 1e-12,
        }
    }
}

/// The dimensionless corrugation response
/// `B_ν(y) = (15/π⁴) Σ_m 8y³ ∫₀^∞ x dx · 4y²/((1−y²) D_m D_{m+ν})`.
pub fn b_nu(nu: u32, y: f64, controls: &BNuControls) -> Result<f64> {
    if nu == 0 {
        return Err(Error::InvalidParameter(
            "corrugation frequency must be >= 1".into(),
        ));
    }
    if !y.is_finite() || y <= 0.0 || y >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "B_nu needs 0 < y < 1, got {y}"
        )));
    }
    let nu_us = nu as usize;
    let mut mode_cap = 32 + 2 * nu_us;
    loop {
        let integrand = |x: f64| -> Result<f64> {
            let fam = d_family(mode_cap + nu_us, y, x)?;
            let mut sum = 0.0f64;
            let mut last = 0.0f64;
            for m in -(mode_cap as i64)..=(mode_cap as i64) {
                let lo = m.unsigned_abs() as usize;
                let hi = (m + nu as i64).unsigned_abs() as usize;
                let term = ScaledValue::ONE.div(&fam[lo].mul(&fam[hi])).value();
                sum += term;
                if m == mode_cap as i64 {
                    last = term;
                }
            }
            // remember whether the cutoff was generous enough at this node
            if last.abs() > controls.mode_tail * sum.abs() {
                return Err(Error::NonConvergence("mode tail".into()));
            }
            Ok(x * sum)
        };
        let quad = QuadratureControls {
            rel_tolerance: controls.rel_tolerance,
            y_min: 1e-10 / y,
            y_max: None,
            max_evals: 200_000,
        };
        match integrate_adaptive(integrand, 1e-10 / y, 12.0 / y, &quad) {
            Ok(est) => {
                let pref = (15.0 / std::f64::consts::PI.powi(4)) * 8.0 * y.powi(3) * 4.0 * y * y
                    / (1.0 - y * y);
                return Ok(pref * est.value);
            }
            Err(Error::NonConvergence(msg)) if msg == "mode tail" => {
                mode_cap *= 2;
                if mode_cap > 4096 {
                    return Err(Error::NonConvergence(
                        "B_nu mode sum did not converge below the hard cap".into(),
                    ));
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// Amplitude of the `cos(ν·φ₀)` energy variation for corrugated concentric
/// cylinders at small amplitude, in units of `L/a²`:
/// `A = π r₊ · π²/(240 r₋⁵) · h̃² · B_ν(r₋/r₊)` with `r∓ = b∓a`, `a = 1`.
/// Perturbative in `h̃`; beyond `h̃ ≈ 0.1` the cosine model itself breaks
/// down.
pub fn perturbative_amplitude(nu: u32, alpha: f64, h_tilde: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "radius ratio must exceed 1, got {alpha}"
        )));
    }
    if !h_tilde.is_finite() || h_tilde <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "corrugation amplitude must be positive, got {h_tilde}"
        )));
    }
    let r_minus = alpha - 1.0;
    let r_plus = alpha + 1.0;
    let y = r_minus / r_plus;
    let b = b_nu(nu, y, &BNuControls::default())?;
    Ok(
        std::f64::consts::PI * r_plus * std::f64::consts::PI.powi(2) / (240.0 * r_minus.powi(5))
            * h_tilde
            * h_tilde
            * b,
    )
}

/// One row of the corrugation-amplitude reference table.
#[derive(Debug, Clone, Copy)]
pub struct Table1Row {
    pub nu: u32,
    pub alpha: f64,
    pub h_tilde: f64,
    pub amplitude: f64,
}

/// The reference table of perturbative amplitudes: three `(ν, α)` blocks,
/// four corrugation amplitudes each. `B_ν` is evaluated once per block and
/// scaled by the exact `h̃²` dependence.
pub fn table1() -> Result<Vec<Table1Row>> {
    let blocks = [(3u32, 2.0f64), (3, 2.5), (5, 2.0)];
    let h_values = [0.01, 0.05, 0.1, 0.3];
    let mut rows = Vec::with_capacity(blocks.len() * h_values.len());
    for &(nu, alpha) in &blocks {
        let unit = perturbative_amplitude(nu, alpha, 1.0)?;
        for &h in &h_values {
            rows.push(Table1Row {
                nu,
                alpha,
                h_tilde: h,
                amplitude: unit * h * h,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn d_m_even_in_order() {
        for &(m, y, x) in &[(3i32, 0.3, 1.5), (7, 0.6, 0.4)] {
            assert_eq!(d_m(m, y, x).unwrap(), d_m(-m, y, x).unwrap());
        }
    }

    #[test]
    fn d_m_positive_on_grid() {
        for m in 0..12 {
            for &y in &[0.1, 1.0 / 3.0, 0.7, 0.95] {
                for &x in &[0.05, 0.8, 3.0, 20.0] {
                    let v = d_m(m, y, x).unwrap();
                    assert!(v > 0.0, "D_{m}({y},{x}) = {v}");
                }
            }
        }
    }

    #[test]
    fn d_m_vanishes_as_y_to_zero() {
        let coarse = d_m(2, 1e-4, 1.3).unwrap();
        let finer = d_m(2, 1e-6, 1.3).unwrap();
        assert!(coarse.abs() < 1e-3);
        assert!(finer.abs() < coarse.abs());
    }

    #[test]
    fn d_0_small_x_limit_is_log_ratio() {
        // D_0(y, x→0) → ln((1+y)/(1−y))
        let y = 1.0 / 3.0;
        let v = d_m(0, y, 1e-8).unwrap();
        assert_relative_eq!(v, 2.0f64.ln(), max_relative = 1e-6);
    }

    #[test]
    fn d_m_small_x_limit_closed_form() {
        // D_m(y, x→0) → [w^m − w^{−m}]/(2m), w = (1+y)/(1−y)
        let y = 1.0 / 3.0; // w = 2
        for m in 1..6i32 {
            let expect = (2f64.powi(m) - 2f64.powi(-m)) / (2.0 * m as f64);
            assert_relative_eq!(d_m(m, y, 1e-7).unwrap(), expect, max_relative = 1e-5);
        }
    }

    #[test]
    fn b_nu_smoke_values() {
        // pinned from an independent (scipy) evaluation of the same integral
        let b3 = b_nu(3, 1.0 / 3.0, &BNuControls::default()).unwrap();
        assert_relative_eq!(b3, 0.784_715, max_relative = 2e-4);
        let b5 = b_nu(5, 1.0 / 3.0, &BNuControls::default()).unwrap();
        assert!(b5 < b3, "higher corrugation frequency couples weaker");
    }

    #[test]
    fn amplitude_scales_quadratically() {
        let rows = table1().unwrap();
        let a001 = rows
            .iter()
            .find(|r| r.nu == 3 && r.alpha == 2.0 && r.h_tilde == 0.01)
            .unwrap();
        let a005 = rows
            .iter()
            .find(|r| r.nu == 3 && r.alpha == 2.0 && r.h_tilde == 0.05)
            .unwrap();
        assert_relative_eq!(a005.amplitude / a001.amplitude, 25.0, max_relative = 1e-12);
    }

    #[test]
    fn pfa_value() {
        assert_relative_eq!(
            pfa_concentric(1.0, 1.05),
            -std::f64::consts::PI.powi(3) / (360.0 * 0.05f64.powi(3)),
            max_relative = 1e-14
        );
    }

    #[test]
    fn concentric_scale_covariance() {
        let quad = QuadratureControls {
            rel_tolerance: 1e-8,
            ..Default::default()
        };
        let e1 = concentric_tm(1.0, 2.0, &quad, Some(12)).unwrap().energy;
        let quad2 = QuadratureControls {
            rel_tolerance: 1e-8,
            y_min: 1e-6 / 2.5,
            ..Default::default()
        };
        let e2 = concentric_tm(2.5, 5.0, &quad2, Some(12)).unwrap().energy;
        assert_relative_eq!(e2 * 2.5 * 2.5, e1, max_relative = 1e-8);
    }

    #[test]
    fn concentric_reference_energies() {
        // pinned from an independent (scipy) mode-sum evaluation, |m| <= 10
        let quad = QuadratureControls {
            rel_tolerance: 1e-9,
            ..Default::default()
        };
        let tm = concentric_tm(1.0, 2.0, &quad, Some(10)).unwrap().energy;
        assert_relative_eq!(tm, -6.207_378_767_764e-2, max_relative = 1e-7);
        let te = concentric_te(1.0, 2.0, &quad, Some(10)).unwrap().energy;
        assert_relative_eq!(te, -5.035_729_926_278e-2, max_relative = 1e-7);
    }

    #[test]
    fn tm_dominates_te_at_large_ratio() {
        let quad = QuadratureControls {
            rel_tolerance: 1e-7,
            ..Default::default()
        };
        let tm = concentric_tm(1.0, 4.0, &quad, None).unwrap().energy;
        let te = concentric_te(1.0, 4.0, &quad, None).unwrap().energy;
        assert!(
            tm.abs() > te.abs(),
            "TM {tm} should exceed TE {te} in magnitude"
        );
    }
}
