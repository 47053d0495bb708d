//! Least-squares cosine fit of corrugation sweeps.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("cosine fit needs at least 8 points, got {0}")]
    TooFewPoints(usize),
    #[error("sweep spans {span:.4} rad but one period is {period:.4} rad")]
    IncompleteCoverage { span: f64, period: f64 },
    #[error("degenerate fit (all cosine samples identical)")]
    Degenerate,
}

/// Amplitude of the `cos(ν·φ₀)` model fitted to a sweep.
#[derive(Debug, Clone, Copy)]
pub struct FitResult {
    /// Fitted amplitude A of `E(φ₀) = E̅ + A cos(ν φ₀)`.
    pub amplitude: f64,
    /// RMS of the residuals relative to |A|.
    pub residual: f64,
    /// Fitted mean E̅.
    pub mean: f64,
}

/// Least squares for `E(φ₀) = E̅ + A cos(ν φ₀)` over at least one period.
pub fn fit_amplitude(phi0: &[f64], energy: &[f64], frequency: u32) -> Result<FitResult, FitError> {
    assert_eq!(phi0.len(), energy.len(), "mismatched sweep columns");
    let n = phi0.len();
    if n < 8 {
        return Err(FitError::TooFewPoints(n));
    }
    let period = 2.0 * std::f64::consts::PI / frequency as f64;
    let span = phi0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - phi0.iter().copied().fold(f64::INFINITY, f64::min);
    // an endpoint-exclusive uniform grid over one period spans (n−1)/n of it
    if span < period * (1.0 - 1.0 / n as f64) * (1.0 - 1e-9) {
        return Err(FitError::IncompleteCoverage { span, period });
    }

    let nf = n as f64;
    let cos: Vec<f64> = phi0.iter().map(|&p| (frequency as f64 * p).cos()).collect();
    let sum_c: f64 = cos.iter().sum();
    let sum_cc: f64 = cos.iter().map(|c| c * c).sum();
    let sum_e: f64 = energy.iter().sum();
    let sum_ce: f64 = cos.iter().zip(energy).map(|(c, e)| c * e).sum();

    let det = nf * sum_cc - sum_c * sum_c;
    if det.abs() < 1e-12 * nf * sum_cc.abs().max(1.0) {
        return Err(FitError::Degenerate);
    }
    let mean = (sum_e * sum_cc - sum_c * sum_ce) / det;
    let amplitude = (nf * sum_ce - sum_c * sum_e) / det;

    let ss: f64 = cos
        .iter()
        .zip(energy)
        .map(|(c, e)| {
            let r = e - mean - amplitude * c;
            r * r
        })
        .sum();
    let residual = (ss / nf).sqrt() / amplitude.abs().max(f64::MIN_POSITIVE);

    Ok(FitResult {
        amplitude,
        residual,
        mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_model_recovered() {
        // 0.5 + 0.001 cos(3φ) sampled over a full period
        let nu = 3;
        let phi: Vec<f64> = (0..16)
            .map(|i| 2.0 * std::f64::consts::PI / 3.0 * i as f64 / 16.0)
            .collect();
        let e: Vec<f64> = phi.iter().map(|&p| 0.5 + 0.001 * (3.0 * p).cos()).collect();
        let fit = fit_amplitude(&phi, &e, nu).unwrap();
        assert_relative_eq!(fit.amplitude, 0.001, max_relative = 1e-12);
        assert_relative_eq!(fit.mean, 0.5, max_relative = 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let phi = vec![0.0, 0.5, 1.0, 1.5, 2.0];
        let e = vec![0.0; 5];
        assert_eq!(
            fit_amplitude(&phi, &e, 3).unwrap_err(),
            FitError::TooFewPoints(5)
        );
    }

    #[test]
    fn incomplete_period_rejected() {
        let nu = 3;
        let phi: Vec<f64> = (0..10).map(|i| 0.1 * i as f64).collect(); // 0.9 rad < 2π/3
        let e = vec![1.0; 10];
        assert!(matches!(
            fit_amplitude(&phi, &e, nu),
            Err(FitError::IncompleteCoverage { .. })
        ));
    }

    #[test]
    fn higher_harmonics_leave_residual() {
        // a sharper-than-cosine profile is not fit by the model
        let nu = 1;
        let phi: Vec<f64> = (0..32)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / 32.0)
            .collect();
        let e: Vec<f64> = phi
            .iter()
            .map(|&p| 0.001 * p.cos() + 0.0005 * (2.0 * p).cos())
            .collect();
        let fit = fit_amplitude(&phi, &e, nu).unwrap();
        assert_relative_eq!(fit.amplitude, 0.001, max_relative = 1e-10);
        assert!(fit.residual > 0.1);
    }
}
