//! Exponentially scaled modified Bessel functions of integer order.
//!
//! These are the only special functions the collocation matrices need.
//! Everything is returned as a [`ScaledValue`] so that `I_m(x)` (which grows
//! like `e^x`) and `K_m(x)` (which decays like `e^-x`) stay representable up
//! to arguments of order 1e4 and orders of a few hundred.
//!
//! Algorithms:
//! - `I_m`: ascending power series for x ≤ 12 (all terms positive, no
//!   cancellation), Miller backward recurrence normalized against
//!   `e^x = I_0 + 2 Σ I_k` for larger x;
//! - `K_0`, `K_1`: ascending series for x ≤ 2, Steed's continued fraction
//!   for x > 2; higher orders by forward recurrence (stable for K);
//! - derivatives through `I'_m = (I_{m−1}+I_{m+1})/2`,
//!   `K'_m = −(K_{m−1}+K_{m+1})/2`.

use crate::error::{Error, Result};
use crate::scaled::ScaledValue;

/// Order cap for the single-order convenience API. The family functions take
/// an explicit limit instead.
pub const MAX_ORDER: usize = 256;

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Switch point between the I series and the Miller recurrence.
const I_SERIES_X_MAX: f64 = 12.0;

/// Switch point between the K series and Steed's continued fraction.
const K_SERIES_X_MAX: f64 = 2.0;

/// Magnitude at which running recurrences fold a shift into the exponent.
const RENORM_THRESHOLD: f64 = 1e250;

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::SpecFunDomain(format!(
            "argument must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

fn check_order(order: i32) -> Result<usize> {
    let m = order.unsigned_abs() as usize;
    if m > MAX_ORDER {
        return Err(Error::SpecFunDomain(format!(
            "order |{order}| exceeds the supported limit {MAX_ORDER}"
        )));
    }
    Ok(m)
}

/// ln(n!) — exact table product below 21, Stirling series above.
fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 20 {
        let mut f = 1.0f64;
        for k in 2..=n {
            f *= k as f64;
        }
        return f.ln();
    }
    let x = (n + 1) as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Stirling for ln Γ(x): error < 1e-15 for x ≥ 21
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// `I_m(x)` by the ascending series, with the `(x/2)^m / m!` prefactor kept
/// in the exponent. All terms are positive so there is no cancellation.
fn bessel_i_series(m: usize, x: f64) -> ScaledValue {
    let q = 0.25 * x * x;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..400 {
        term *= q / ((k as f64) * (m + k) as f64);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    let log_prefactor = (m as f64) * (0.5 * x).ln() - ln_factorial(m);
    ScaledValue::new(sum, log_prefactor)
}

/// Whole family `I_0(x) … I_max(x)` by Miller's backward recurrence with the
/// `e^x = I_0 + 2 Σ_k I_k` normalization. The start order is chosen so both
/// the seed contamination and the truncated normalization tail are below
/// ~1e-19 relative.
fn bessel_i_family_miller(max_order: usize, x: f64) -> Vec<ScaledValue> {
    let start = max_order + 14 + (90.0 * x).sqrt().ceil() as usize;
    let mut upper = 0.0f64; // u_{k+1}
    let mut current = 1.0f64; // u_k
    let mut norm = 0.0f64; // running u_0 + 2 Σ_{k≥1} u_k in the moving frame
    let mut frame = 0.0f64; // true value = stored · e^frame
    let mut stored: Vec<ScaledValue> = vec![ScaledValue::ZERO; max_order + 1];

    let mut k = start;
    loop {
        if k <= max_order {
            stored[k] = ScaledValue::new(current, frame);
        }
        norm += if k == 0 { current } else { 2.0 * current };
        if k == 0 {
            break;
        }
        let next = upper + (2.0 * k as f64 / x) * current;
        upper = current;
        current = next;
        if current.abs() > RENORM_THRESHOLD {
            let shift = current.abs().ln().round();
            let scale = (-shift).exp();
            current *= scale;
            upper *= scale;
            norm *= scale;
            frame += shift;
        }
        k -= 1;
    }
    let norm_sv = ScaledValue::new(norm, frame);
    let scale = ScaledValue::new(1.0, x).div(&norm_sv); // e^x / norm
    for v in stored.iter_mut() {
        *v = v.mul(&scale);
    }
    stored
}

/// `K_0(x)`, `K_1(x)` by the ascending series (x ≤ 2).
fn k0_k1_series(x: f64) -> (ScaledValue, ScaledValue) {
    let q = 0.25 * x * x;
    let lh = (0.5 * x).ln();

    // I_0, I_1 directly (x ≤ 2, plain f64 is fine)
    let (mut i0, mut i1) = (1.0f64, 1.0f64);
    let (mut t0, mut t1) = (1.0f64, 1.0f64);
    for k in 1..60 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        i0 += t0;
        i1 += t1;
        if t0 < 1e-18 && t1 < 1e-18 {
            break;
        }
    }
    i1 *= 0.5 * x;

    // K_0 = −(ln(x/2)+γ) I_0 + Σ_{k≥1} q^k/(k!)² H_k
    let mut k0 = -(lh + EULER_GAMMA) * i0;
    let mut term = 1.0f64;
    let mut harmonic = 0.0f64;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        let contrib = term * harmonic;
        k0 += contrib;
        if contrib.abs() < 1e-18 * k0.abs() {
            break;
        }
    }

    // K_1 = 1/x + ln(x/2) I_1 − (x/4) Σ_k [ψ(k+1)+ψ(k+2)] q^k/(k!(k+1)!)
    let mut psi_a = -EULER_GAMMA; // ψ(k+1)
    let mut psi_b = 1.0 - EULER_GAMMA; // ψ(k+2)
    let mut fac = 1.0f64; // q^k/(k!(k+1)!)
    let mut s = psi_a + psi_b;
    for k in 1..60 {
        let kf = k as f64;
        fac *= q / (kf * (kf + 1.0));
        psi_a += 1.0 / kf;
        psi_b += 1.0 / (kf + 1.0);
        let contrib = (psi_a + psi_b) * fac;
        s += contrib;
        if contrib.abs() < 1e-18 * s.abs() {
            break;
        }
    }
    let k1 = 1.0 / x + lh * i1 - 0.25 * x * s;
    (ScaledValue::from_f64(k0), ScaledValue::from_f64(k1))
}

/// `K_0(x)`, `K_1(x)` by Steed's continued fraction (x > 2), with the
/// `e^{-x}` factor kept in the exponent.
fn k0_k1_steed(x: f64) -> Result<(ScaledValue, ScaledValue)> {
    let mut a = -0.25f64;
    let mut b = 2.0 * (x + 1.0);
    let mut d = 1.0 / b;
    let mut delta = d;
    let mut f = d;
    let mut prev = 0.0f64;
    let mut cur = 1.0f64;
    let mut q = 0.25f64;
    let mut c = 0.25f64;
    let mut s = 1.0 + q * delta;

    for k in 2..10_000 {
        let kf = k as f64;
        a -= 2.0 * (kf - 1.0);
        b += 2.0;
        d = 1.0 / (a * d + b);
        delta *= b * d - 1.0;
        f += delta;
        let t = (prev - (b - 2.0) * cur) / a;
        prev = cur;
        cur = t;
        c *= -a / kf;
        q += c * t;
        s += q * delta;
        if (q * delta).abs() < s.abs() * 0.5 * f64::EPSILON {
            let mantissa = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
            let k0 = ScaledValue::new(mantissa, -x);
            let k1 = k0.scale((0.5 + x - 0.25 * f) / x);
            return Ok((k0, k1));
        }
    }
    Err(Error::SpecFunDomain(format!(
        "K continued fraction did not converge at x={x}"
    )))
}

/// Family `I_0(x) … I_{max_order}(x)`, exponentially scaled.
pub fn bessel_i_family(max_order: usize, x: f64) -> Result<Vec<ScaledValue>> {
    check_argument(x)?;
    if x <= I_SERIES_X_MAX {
        Ok((0..=max_order).map(|m| bessel_i_series(m, x)).collect())
    } else {
        Ok(bessel_i_family_miller(max_order, x))
    }
}

/// Family `K_0(x) … K_{max_order}(x)` by stable forward recurrence.
pub fn bessel_k_family(max_order: usize, x: f64) -> Result<Vec<ScaledValue>> {
    check_argument(x)?;
    let (k0, k1) = if x <= K_SERIES_X_MAX {
        k0_k1_series(x)
    } else {
        k0_k1_steed(x)?
    };
    let mut out = Vec::with_capacity(max_order + 1);
    out.push(k0);
    if max_order == 0 {
        return Ok(out);
    }
    // run the recurrence in a shared exponent frame, folding growth into it
    let frame0 = k0.exponent().min(k1.exponent());
    let mut prev = k0.mantissa() * (k0.exponent() - frame0).exp();
    let mut cur = k1.mantissa() * (k1.exponent() - frame0).exp();
    let mut frame = frame0;
    out.push(ScaledValue::new(cur, frame));
    for m in 1..max_order {
        let next = prev + (2.0 * m as f64 / x) * cur;
        prev = cur;
        cur = next;
        if cur > RENORM_THRESHOLD {
            let shift = cur.ln().round();
            let scale = (-shift).exp();
            cur *= scale;
            prev *= scale;
            frame += shift;
        }
        out.push(ScaledValue::new(cur, frame));
    }
    Ok(out)
}

/// Family of radial derivatives `I'_0 … I'_{max_order}` via the recurrence
/// `I'_m = (I_{m−1} + I_{m+1})/2` (`I'_0 = I_1`).
pub fn bessel_i_prime_family(max_order: usize, x: f64) -> Result<Vec<ScaledValue>> {
    let values = bessel_i_family(max_order + 1, x)?;
    Ok((0..=max_order)
        .map(|m| {
            if m == 0 {
                values[1]
            } else {
                values[m - 1].add(&values[m + 1]).scale(0.5)
            }
        })
        .collect())
}

/// Family `K'_0 … K'_{max_order}` via `K'_m = −(K_{m−1} + K_{m+1})/2`
/// (`K'_0 = −K_1`). All values are negative.
pub fn bessel_k_prime_family(max_order: usize, x: f64) -> Result<Vec<ScaledValue>> {
    let values = bessel_k_family(max_order + 1, x)?;
    Ok((0..=max_order)
        .map(|m| {
            if m == 0 {
                values[1].neg()
            } else {
                values[m - 1].add(&values[m + 1]).scale(-0.5)
            }
        })
        .collect())
}

/// `I_m(x)`, scaled; negative orders fold through `I_{−m} = I_m`.
pub fn bessel_i(order: i32, x: f64) -> Result<ScaledValue> {
    let m = check_order(order)?;
    check_argument(x)?;
    if x <= I_SERIES_X_MAX {
        Ok(bessel_i_series(m, x))
    } else {
        Ok(bessel_i_family_miller(m, x)[m])
    }
}

/// `K_m(x)`, scaled; `K_{−m} = K_m`.
pub fn bessel_k(order: i32, x: f64) -> Result<ScaledValue> {
    let m = check_order(order)?;
    Ok(bessel_k_family(m, x)?[m])
}

/// `I'_m(x)`, scaled.
pub fn bessel_i_prime(order: i32, x: f64) -> Result<ScaledValue> {
    let m = check_order(order)?;
    Ok(bessel_i_prime_family(m, x)?[m])
}

/// `K'_m(x)`, scaled.
pub fn bessel_k_prime(order: i32, x: f64) -> Result<ScaledValue> {
    let m = check_order(order)?;
    Ok(bessel_k_prime_family(m, x)?[m])
}
