//! Cross-section curves and collocation point grids.
//!
//! Every curve is described in polar form `r(θ)` about the *expansion
//! origin*, which is always the center of the inner cylinder. Curves must be
//! star-shaped about that origin: a unique positive radius for every angle.
//! Offsets (`center`) are positions of the outer body's own center (focus,
//! for the parabola) relative to the origin.

use crate::error::{Error, Result};

/// Tolerance for the implicit-equation bisection on offset parabolas.
const ROOT_TOLERANCE: f64 = 1e-14;

/// Samples used by the nesting check.
const NESTING_SAMPLES: usize = 4096;

/// A closed star-shaped cross-section curve.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCurve {
    /// Circle of the given radius centered on the origin.
    Circle { radius: f64 },
    /// Circle whose center is displaced from the origin.
    EccentricCircle { radius: f64, center: (f64, f64) },
    /// Sinusoidally corrugated circle `r(θ) = mean_radius + amplitude·sin(frequency·θ + phase)`.
    CorrugatedCircle {
        mean_radius: f64,
        amplitude: f64,
        frequency: u32,
        phase: f64,
    },
    /// Axis-aligned ellipse, major semiaxis along x, center displaced.
    Ellipse {
        semi_minor: f64,
        semi_major: f64,
        center: (f64, f64),
    },
    /// Parabola `r = 2f/(1+cos φ)` about its focus, truncated at polar angle
    /// ±theta_cut and closed with a straight chord; `center` is the focus
    /// position relative to the origin.
    Parabola {
        focal_distance: f64,
        theta_cut: f64,
        center: (f64, f64),
    },
}

/// One collocation point in polar coordinates about the expansion origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub radius: f64,
    pub theta: f64,
}

/// The 2S+1 collocation points of one curve, ordered by increasing angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGrid {
    points: Vec<GridPoint>,
}

impl BoundaryCurve {
    /// Checks parameter ranges and that the curve is star-shaped about the
    /// origin with the origin strictly inside.
    pub fn validate(&self) -> Result<()> {
        match *self {
            BoundaryCurve::Circle { radius } => {
                if radius <= 0.0 || !radius.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "circle radius must be positive, got {radius}"
                    )));
                }
            }
            BoundaryCurve::EccentricCircle { radius, center } => {
                if radius <= 0.0 || !radius.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "circle radius must be positive, got {radius}"
                    )));
                }
                let offset = (center.0 * center.0 + center.1 * center.1).sqrt();
                if offset >= radius {
                    return Err(Error::StarShapeViolation(format!(
                        "origin outside eccentric circle: |offset|={offset} >= radius={radius}"
                    )));
                }
            }
            BoundaryCurve::CorrugatedCircle {
                mean_radius,
                amplitude,
                frequency,
                ..
            } => {
                if mean_radius <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "corrugated mean radius must be positive".into(),
                    ));
                }
                if frequency == 0 {
                    return Err(Error::InvalidParameter(
                        "corrugation frequency must be a positive integer".into(),
                    ));
                }
                if amplitude.abs() >= mean_radius {
                    return Err(Error::StarShapeViolation(format!(
                        "corrugation amplitude {amplitude} reaches the origin (mean radius {mean_radius})"
                    )));
                }
            }
            BoundaryCurve::Ellipse {
                semi_minor,
                semi_major,
                center,
            } => {
                if semi_minor <= 0.0 || semi_major <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "ellipse semiaxes must be positive".into(),
                    ));
                }
                if semi_minor > semi_major {
                    return Err(Error::InvalidParameter(format!(
                        "ellipse semi_minor {semi_minor} exceeds semi_major {semi_major} (major axis is along x)"
                    )));
                }
                let u = center.0 / semi_major;
                let v = center.1 / semi_minor;
                if u * u + v * v >= 1.0 {
                    return Err(Error::StarShapeViolation(
                        "origin outside the ellipse".into(),
                    ));
                }
            }
            BoundaryCurve::Parabola {
                focal_distance,
                theta_cut,
                center,
            } => {
                if focal_distance <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "parabola focal distance must be positive".into(),
                    ));
                }
                if !(theta_cut > std::f64::consts::FRAC_PI_2 && theta_cut < std::f64::consts::PI) {
                    return Err(Error::InvalidParameter(format!(
                        "parabola theta_cut must lie in (pi/2, pi), got {theta_cut}"
                    )));
                }
                // origin must be strictly inside the truncated region
                let q = (-center.0, -center.1);
                let phi = q.1.atan2(q.0);
                let rho = truncated_parabola_profile(focal_distance, theta_cut, phi);
                if (q.0 * q.0 + q.1 * q.1).sqrt() >= rho {
                    return Err(Error::StarShapeViolation(
                        "origin outside the truncated parabola".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The unique positive radius of the curve at angle `theta`.
    pub fn radial_profile(&self, theta: f64) -> Result<f64> {
        match *self {
            BoundaryCurve::Circle { radius } => Ok(radius),
            BoundaryCurve::EccentricCircle { radius, center } => {
                // r² − 2 r (c·û) + |c|² = R²  →  r = c·û + sqrt(R² − |c|² + (c·û)²)
                let s = center.0 * theta.cos() + center.1 * theta.sin();
                let c2 = center.0 * center.0 + center.1 * center.1;
                let disc = radius * radius - c2 + s * s;
                if disc <= 0.0 {
                    return Err(Error::StarShapeViolation(format!(
                        "no radius on eccentric circle at theta={theta}"
                    )));
                }
                let r = s + disc.sqrt();
                if r <= 0.0 {
                    return Err(Error::StarShapeViolation(format!(
                        "nonpositive radius on eccentric circle at theta={theta}"
                    )));
                }
                Ok(r)
            }
            BoundaryCurve::CorrugatedCircle {
                mean_radius,
                amplitude,
                frequency,
                phase,
            } => {
                let r = mean_radius + amplitude * (frequency as f64 * theta + phase).sin();
                if r <= 0.0 {
                    return Err(Error::StarShapeViolation(format!(
                        "corrugated radius nonpositive at theta={theta}"
                    )));
                }
                Ok(r)
            }
            BoundaryCurve::Ellipse {
                semi_minor,
                semi_major,
                center,
            } => {
                // ((r cosθ − cx)/b2)² + ((r sinθ − cy)/b1)² = 1, c = curve center
                let (ct, st) = (theta.cos(), theta.sin());
                let a2 = semi_major * semi_major;
                let b2 = semi_minor * semi_minor;
                let qa = ct * ct / a2 + st * st / b2;
                let qb = -2.0 * (center.0 * ct / a2 + center.1 * st / b2);
                let qc = center.0 * center.0 / a2 + center.1 * center.1 / b2 - 1.0;
                let disc = qb * qb - 4.0 * qa * qc;
                if disc <= 0.0 || qc >= 0.0 {
                    return Err(Error::StarShapeViolation(format!(
                        "no unique radius on ellipse at theta={theta}"
                    )));
                }
                Ok((-qb + disc.sqrt()) / (2.0 * qa))
            }
            BoundaryCurve::Parabola {
                focal_distance,
                theta_cut,
                center,
            } => {
                if center == (0.0, 0.0) {
                    return Ok(truncated_parabola_profile(focal_distance, theta_cut, theta));
                }
                // offset curve: bracket and bisect g(r) = |q(r)| − ρ(arg q(r))
                let (ct, st) = (theta.cos(), theta.sin());
                let g = |r: f64| -> f64 {
                    let q = (r * ct - center.0, r * st - center.1);
                    let rho = truncated_parabola_profile(focal_distance, theta_cut, q.1.atan2(q.0));
                    (q.0 * q.0 + q.1 * q.1).sqrt() - rho
                };
                if g(0.0) >= 0.0 {
                    return Err(Error::StarShapeViolation(
                        "origin outside the offset parabola".into(),
                    ));
                }
                let mut hi = focal_distance.max(1.0);
                let mut grow = 0;
                while g(hi) < 0.0 {
                    hi *= 2.0;
                    grow += 1;
                    if grow > 90 {
                        return Err(Error::StarShapeViolation(
                            "could not bracket the parabola boundary".into(),
                        ));
                    }
                }
                let mut lo = 0.0f64;
                while hi - lo > ROOT_TOLERANCE * hi.max(1.0) {
                    let mid = 0.5 * (lo + hi);
                    if g(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }

    /// dr/dθ of the polar profile.
    pub fn radial_derivative(&self, theta: f64) -> Result<f64> {
        match *self {
            BoundaryCurve::Circle { .. } => Ok(0.0),
            BoundaryCurve::EccentricCircle { radius, center } => {
                let s = center.0 * theta.cos() + center.1 * theta.sin();
                let sp = -center.0 * theta.sin() + center.1 * theta.cos();
                let c2 = center.0 * center.0 + center.1 * center.1;
                let root = (radius * radius - c2 + s * s).sqrt();
                Ok(sp * (1.0 + s / root))
            }
            BoundaryCurve::CorrugatedCircle {
                amplitude,
                frequency,
                phase,
                ..
            } => Ok(amplitude * frequency as f64 * (frequency as f64 * theta + phase).cos()),
            BoundaryCurve::Ellipse {
                semi_minor,
                semi_major,
                center,
            } => {
                // implicit differentiation of F(r,θ)=0
                let r = self.radial_profile(theta)?;
                let (ct, st) = (theta.cos(), theta.sin());
                let a2 = semi_major * semi_major;
                let b2 = semi_minor * semi_minor;
                let x = r * ct - center.0;
                let y = r * st - center.1;
                let f_r = 2.0 * (x * ct / a2 + y * st / b2);
                let f_t = 2.0 * (-x * r * st / a2 + y * r * ct / b2);
                Ok(-f_t / f_r)
            }
            BoundaryCurve::Parabola { .. } => {
                // central difference; adequate for the optional normal mode
                let h = 1e-6;
                Ok((self.radial_profile(theta + h)? - self.radial_profile(theta - h)?) / (2.0 * h))
            }
        }
    }

    /// Unit outward normal at the boundary point with polar angle `theta`.
    pub fn outward_normal(&self, theta: f64) -> Result<[f64; 2]> {
        let r = self.radial_profile(theta)?;
        let rp = self.radial_derivative(theta)?;
        let (ct, st) = (theta.cos(), theta.sin());
        // n ∝ r r̂ − r' θ̂
        let nx = r * ct + rp * st;
        let ny = r * st - rp * ct;
        let norm = (nx * nx + ny * ny).sqrt();
        Ok([nx / norm, ny / norm])
    }

    /// Normalized residual of the curve's implicit equation at a Cartesian
    /// point; zero (to rounding) iff the point lies on the curve.
    pub fn boundary_residual(&self, x: f64, y: f64) -> f64 {
        match *self {
            BoundaryCurve::Circle { radius } => ((x * x + y * y).sqrt() - radius) / radius,
            BoundaryCurve::EccentricCircle { radius, center } => {
                let dx = x - center.0;
                let dy = y - center.1;
                ((dx * dx + dy * dy).sqrt() - radius) / radius
            }
            BoundaryCurve::CorrugatedCircle {
                mean_radius,
                amplitude,
                frequency,
                phase,
            } => {
                let theta = y.atan2(x);
                let r = (x * x + y * y).sqrt();
                (r - mean_radius - amplitude * (frequency as f64 * theta + phase).sin())
                    / mean_radius
            }
            BoundaryCurve::Ellipse {
                semi_minor,
                semi_major,
                center,
            } => {
                let u = (x - center.0) / semi_major;
                let v = (y - center.1) / semi_minor;
                u * u + v * v - 1.0
            }
            BoundaryCurve::Parabola {
                focal_distance,
                theta_cut,
                center,
            } => {
                let qx = x - center.0;
                let qy = y - center.1;
                let phi = qy.atan2(qx);
                let rho = truncated_parabola_profile(focal_distance, theta_cut, phi);
                ((qx * qx + qy * qy).sqrt() - rho) / rho
            }
        }
    }
}

/// Polar profile of the truncated parabola about its own focus: the arc
/// `2f/(1+cos φ)` for |φ| ≤ theta_cut, the closing chord (a vertical segment
/// behind the focus) elsewhere.
fn truncated_parabola_profile(focal_distance: f64, theta_cut: f64, phi: f64) -> f64 {
    let mut phi = phi.rem_euclid(2.0 * std::f64::consts::PI);
    if phi > std::f64::consts::PI {
        phi -= 2.0 * std::f64::consts::PI;
    }
    if phi.abs() <= theta_cut {
        2.0 * focal_distance / (1.0 + phi.cos())
    } else {
        // chord at x_cut = r(θc) cos θc < 0; on it, r = x_cut / cos φ
        let x_cut = 2.0 * focal_distance * theta_cut.cos() / (1.0 + theta_cut.cos());
        x_cut / phi.cos()
    }
}

impl PointGrid {
    /// Collocation grid: 2S+1 points at `θ_p = 2πp/(2S+1)` on the curve.
    pub fn sample(curve: &BoundaryCurve, s: usize) -> Result<PointGrid> {
        if s == 0 {
            return Err(Error::InvalidParameter("mode cutoff S must be >= 1".into()));
        }
        curve.validate()?;
        let n = 2 * s + 1;
        let mut points = Vec::with_capacity(n);
        for p in 0..n {
            let theta = 2.0 * std::f64::consts::PI * p as f64 / n as f64;
            points.push(GridPoint {
                radius: curve.radial_profile(theta)?,
                theta,
            });
        }
        Ok(PointGrid { points })
    }

    /// Builds a grid from explicit points (used by tests and rotations).
    /// Unlike [`PointGrid::sample`], a single-point grid (S = 0) is allowed
    /// here; the collocation system is then the scalar m = 0 mode.
    pub fn from_points(points: Vec<GridPoint>) -> Result<PointGrid> {
        if points.is_empty() || points.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(
                "a point grid holds an odd number (2S+1) of points".into(),
            ));
        }
        if points.iter().any(|p| p.radius <= 0.0) {
            return Err(Error::InvalidParameter(
                "grid radii must be positive".into(),
            ));
        }
        Ok(PointGrid { points })
    }

    /// Rigid rotation of the grid by `angle`; points are re-sorted so angles
    /// stay increasing in [0, 2π). A cyclic relabeling leaves every
    /// collocation determinant unchanged.
    pub fn rotate(&self, angle: f64) -> PointGrid {
        let mut points: Vec<GridPoint> = self
            .points
            .iter()
            .map(|p| GridPoint {
                radius: p.radius,
                theta: (p.theta + angle).rem_euclid(2.0 * std::f64::consts::PI),
            })
            .collect();
        points.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        PointGrid { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    /// The S implied by the point count.
    pub fn mode_cutoff(&self) -> usize {
        (self.points.len() - 1) / 2
    }
}

/// Minimum of `r_outer(θ) − r_inner(θ)` over a dense angular grid.
pub fn min_gap(inner: &BoundaryCurve, outer: &BoundaryCurve) -> Result<f64> {
    let mut min = f64::INFINITY;
    for i in 0..NESTING_SAMPLES {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / NESTING_SAMPLES as f64;
        let gap = outer.radial_profile(theta)? - inner.radial_profile(theta)?;
        if gap < min {
            min = gap;
        }
    }
    Ok(min)
}

/// Rejects configurations where the curves touch, intersect, or are not
/// strictly nested.
pub fn validate_nested(inner: &BoundaryCurve, outer: &BoundaryCurve) -> Result<f64> {
    inner.validate()?;
    outer.validate()?;
    let gap = min_gap(inner, outer)?;
    if gap <= 0.0 {
        return Err(Error::NestingViolation { min_gap: gap });
    }
    Ok(gap)
}
