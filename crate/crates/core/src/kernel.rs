//! Collocation matrices on the imaginary frequency axis and the
//! log-determinant `ln Q(iy)`.
//!
//! For 2S+1 collocation points `(r_p, θ_p)` on the inner curve and
//! `(r_q, θ_q)` on the outer one, the four matrices are
//!
//! ```text
//! (M̃₁)_{pm} = I_m(y r_p) e^{imθ_p}    (M̃₂)_{pm} = K_m(y r_p) e^{imθ_p}
//! (Ñ₁)_{qm} = I_m(y r_q) e^{imθ_q}    (Ñ₂)_{qm} = K_m(y r_q) e^{imθ_q}
//! ```
//!
//! with `m = −S…S`, and `Q(iy) = det[I − M̃₁ Ñ₁⁻¹ Ñ₂ M̃₂⁻¹]`. The `i^m`,
//! `(−i)^m` and `2/π` prefactors of the underlying wave functions cancel in
//! `Q` and are never stored. For TE polarization each Bessel factor is
//! replaced by its radial derivative times `y` (exact for circular
//! sections), or optionally by the full normal derivative
//! `n·∇[f_m(yr)e^{imθ}]`.
//!
//! Scaling: each column shares one exponential factor (per-column log
//! scales, chosen as the column maximum over the curve that dominates it).
//! Because the scales are shared between the matrix pairs `(M̃₁, Ñ₁)` and
//! `(Ñ₂, M̃₂)`, they cancel identically in `M̃₁Ñ₁⁻¹` and `Ñ₂M̃₂⁻¹`, so the
//! product matrix is assembled from well-scaled mantissas only and overflow
//! is impossible by construction.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{validate_nested, BoundaryCurve, PointGrid};
use crate::linalg::{log_det_one_minus, solve_equilibrated, LuError};
use crate::scaled::ScaledValue;
use crate::specfun;

/// Which scalar boundary problem the matrices represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    /// Dirichlet boundary conditions.
    Tm,
    /// Neumann via the radial derivative (exact for circular sections).
    TeRadial,
    /// Neumann via the true outward-normal derivative.
    TeNormal,
}

impl Polarization {
    pub fn label(&self) -> &'static str {
        match self {
            Polarization::Tm => "tm",
            Polarization::TeRadial => "te_radial",
            Polarization::TeNormal => "te_normal",
        }
    }
}

/// One collocation matrix with per-column log scales: the true entry is
/// `mantissas[(row, col)] · exp(col_scales[col])`.
#[derive(Debug, Clone)]
pub struct ScaledMatrix {
    pub mantissas: Array2<Complex64>,
    pub col_scales: Vec<f64>,
}

impl ScaledMatrix {
    /// Reconstructs an entry as a plain complex number (may overflow for
    /// extreme scales; intended for tests and diagnostics).
    pub fn reconstruct(&self, row: usize, col: usize) -> Complex64 {
        self.mantissas[(row, col)] * self.col_scales[col].exp()
    }
}

/// The four collocation matrices at one imaginary frequency.
#[derive(Debug, Clone)]
pub struct SpectralMatrixSet {
    /// `M̃₁`: I-type entries on the inner curve.
    pub inner_i: ScaledMatrix,
    /// `M̃₂`: K-type entries on the inner curve.
    pub inner_k: ScaledMatrix,
    /// `Ñ₁`: I-type entries on the outer curve.
    pub outer_i: ScaledMatrix,
    /// `Ñ₂`: K-type entries on the outer curve.
    pub outer_k: ScaledMatrix,
}

impl SpectralMatrixSet {
    pub fn size(&self) -> usize {
        self.inner_i.mantissas.nrows()
    }
}

/// `ln Q(iy)` with its reality diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct LogQ {
    /// `Re ln det[I − M̃₁Ñ₁⁻¹Ñ₂M̃₂⁻¹]`; ≤ 0 on valid configurations.
    pub value: f64,
    /// `|Im ln det|` reduced mod 2π; Q(iy) is real so this is pure noise.
    pub im_residual: f64,
    /// Smallest equilibrated pivot over norm across the two collocation
    /// solves; small values flag a grid near its resolving limit.
    pub min_pivot_ratio: f64,
}

/// Reusable evaluator for one geometry pair, mode cutoff and polarization.
/// Evaluations at distinct `y` are independent; `&self` methods are safe to
/// call concurrently.
#[derive(Debug, Clone)]
pub struct CollocationSetup {
    grid_inner: PointGrid,
    grid_outer: PointGrid,
    pol: Polarization,
    /// Unit outward normals, only for `TeNormal`.
    normals_inner: Option<Vec<[f64; 2]>>,
    normals_outer: Option<Vec<[f64; 2]>>,
}

/// Scaled complex entry of one matrix: `value = mantissa · e^exponent`.
#[derive(Clone, Copy)]
struct Entry {
    mantissa: Complex64,
    exponent: f64,
}

impl CollocationSetup {
    /// Validates nesting and samples both grids on the shared θ set.
    pub fn new(
        inner: &BoundaryCurve,
        outer: &BoundaryCurve,
        s: usize,
        pol: Polarization,
    ) -> Result<Self> {
        validate_nested(inner, outer)?;
        let grid_inner = PointGrid::sample(inner, s)?;
        let grid_outer = PointGrid::sample(outer, s)?;
        let (normals_inner, normals_outer) = if pol == Polarization::TeNormal {
            let ni = grid_inner
                .points()
                .iter()
                .map(|p| inner.outward_normal(p.theta))
                .collect::<Result<Vec<_>>>()?;
            let no = grid_outer
                .points()
                .iter()
                .map(|p| outer.outward_normal(p.theta))
                .collect::<Result<Vec<_>>>()?;
            (Some(ni), Some(no))
        } else {
            (None, None)
        };
        Ok(CollocationSetup {
            grid_inner,
            grid_outer,
            pol,
            normals_inner,
            normals_outer,
        })
    }

    /// Builds an evaluator from explicit grids (no curve needed; `TeNormal`
    /// is not available on this path).
    pub fn from_grids(
        grid_inner: PointGrid,
        grid_outer: PointGrid,
        pol: Polarization,
    ) -> Result<Self> {
        if pol == Polarization::TeNormal {
            return Err(Error::InvalidParameter(
                "normal-derivative TE needs the curves; use CollocationSetup::new".into(),
            ));
        }
        if grid_inner.len() != grid_outer.len() {
            return Err(Error::InvalidParameter(
                "inner and outer grids must have the same number of points".into(),
            ));
        }
        Ok(CollocationSetup {
            grid_inner,
            grid_outer,
            pol,
            normals_inner: None,
            normals_outer: None,
        })
    }

    pub fn mode_cutoff(&self) -> usize {
        self.grid_inner.mode_cutoff()
    }

    pub fn polarization(&self) -> Polarization {
        self.pol
    }

    /// Entries of one matrix row: the Bessel factor (or its TE replacement)
    /// times `e^{imθ}` for `m = −S…S`.
    fn row_entries(
        &self,
        y: f64,
        radius: f64,
        theta: f64,
        normal: Option<&[f64; 2]>,
        kind: BesselKind,
        s: usize,
    ) -> Result<Vec<Entry>> {
        let x = y * radius;
        let n = 2 * s + 1;
        let mut out = Vec::with_capacity(n);
        match self.pol {
            Polarization::Tm => {
                let fam = match kind {
                    BesselKind::I => specfun::bessel_i_family(s, x)?,
                    BesselKind::K => specfun::bessel_k_family(s, x)?,
                };
                for c in 0..n {
                    let m = c as i64 - s as i64;
                    let v = fam[m.unsigned_abs() as usize];
                    out.push(Entry {
                        mantissa: phase(m, theta) * v.mantissa(),
                        exponent: v.exponent(),
                    });
                }
            }
            Polarization::TeRadial => {
                // y·f'_m(y r): the y factors cancel in Q but are kept so the
                // stored entries equal the documented definition
                let fam = match kind {
                    BesselKind::I => specfun::bessel_i_prime_family(s, x)?,
                    BesselKind::K => specfun::bessel_k_prime_family(s, x)?,
                };
                let ln_y = y.ln();
                for c in 0..n {
                    let m = c as i64 - s as i64;
                    let v = fam[m.unsigned_abs() as usize];
                    out.push(Entry {
                        mantissa: phase(m, theta) * v.mantissa(),
                        exponent: v.exponent() + ln_y,
                    });
                }
            }
            Polarization::TeNormal => {
                // n·∇[f_m(yr)e^{imθ}] = e^{imθ} [ n_r y f'_m(yr) + i m n_θ f_m(yr)/r ]
                let nvec = normal.expect("normals precomputed for TeNormal");
                let (ct, st) = (theta.cos(), theta.sin());
                let n_r = nvec[0] * ct + nvec[1] * st;
                let n_t = -nvec[0] * st + nvec[1] * ct;
                let (vals, ders) = match kind {
                    BesselKind::I => (
                        specfun::bessel_i_family(s, x)?,
                        specfun::bessel_i_prime_family(s, x)?,
                    ),
                    BesselKind::K => (
                        specfun::bessel_k_family(s, x)?,
                        specfun::bessel_k_prime_family(s, x)?,
                    ),
                };
                for c in 0..n {
                    let m = c as i64 - s as i64;
                    let ma = m.unsigned_abs() as usize;
                    let radial = ders[ma].scale(n_r * y);
                    let angular = vals[ma].scale(n_t * m as f64 / radius);
                    // combine on a common exponent
                    let exponent = radial.ln_abs().max(angular.ln_abs());
                    let re = shifted(radial, exponent);
                    let im = shifted(angular, exponent);
                    out.push(Entry {
                        mantissa: phase(m, theta) * Complex64::new(re, im),
                        exponent,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Assembles the four matrices at imaginary frequency `y`.
    pub fn assemble(&self, y: f64) -> Result<SpectralMatrixSet> {
        if !y.is_finite() || y <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "imaginary frequency y must be positive, got {y}"
            )));
        }
        let s = self.mode_cutoff();
        let n = 2 * s + 1;

        let rows = |grid: &PointGrid,
                    normals: Option<&Vec<[f64; 2]>>,
                    kind: BesselKind|
         -> Result<Vec<Vec<Entry>>> {
            grid.points()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    self.row_entries(y, p.radius, p.theta, normals.map(|v| &v[i]), kind, s)
                })
                .collect()
        };

        let inner_i = rows(&self.grid_inner, self.normals_inner.as_ref(), BesselKind::I)?;
        let inner_k = rows(&self.grid_inner, self.normals_inner.as_ref(), BesselKind::K)?;
        let outer_i = rows(&self.grid_outer, self.normals_outer.as_ref(), BesselKind::I)?;
        let outer_k = rows(&self.grid_outer, self.normals_outer.as_ref(), BesselKind::K)?;

        // I-columns are dominated by the outer curve (I grows with r),
        // K-columns by the inner one (K decays with r); sharing each scale
        // across the matrix pair makes it drop out of Q exactly.
        let i_scales = column_maxima(&outer_i, n);
        let k_scales = column_maxima(&inner_k, n);

        Ok(SpectralMatrixSet {
            inner_i: collapse(inner_i, &i_scales),
            outer_i: collapse(outer_i, &i_scales),
            inner_k: collapse(inner_k, &k_scales),
            outer_k: collapse(outer_k, &k_scales),
        })
    }

    /// `ln Q(iy) = ln det[I − M̃₁Ñ₁⁻¹Ñ₂M̃₂⁻¹]`, never forming an inverse:
    /// two pivoted solves and one multiplication, then the determinant of
    /// the similarity-transformed `I − M̃₂⁻¹(M̃₁Ñ₁⁻¹Ñ₂)`.
    pub fn log_q(&self, y: f64) -> Result<LogQ> {
        let set = self.assemble(y)?;
        let outer = solve_equilibrated(&set.outer_i.mantissas, &set.outer_k.mantissas)
            .map_err(|e| singular(e, y, "outer I collocation matrix"))?;
        let w = outer.solution;
        if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::SingularCollocation {
                y,
                context: "reflection solve overflowed".into(),
            });
        }
        let t = set.inner_i.mantissas.dot(&w);
        let inner = solve_equilibrated(&set.inner_k.mantissas, &t)
            .map_err(|e| singular(e, y, "inner K collocation matrix"))?;
        let (value, im_residual) = log_det_one_minus(&inner.solution)
            .map_err(|e| singular(e, y, "interaction determinant"))?;
        if !value.is_finite() {
            return Err(Error::SingularCollocation {
                y,
                context: "non-finite log determinant".into(),
            });
        }
        Ok(LogQ {
            value,
            im_residual: im_residual.abs(),
            min_pivot_ratio: outer.min_pivot_ratio.min(inner.min_pivot_ratio),
        })
    }

    /// The reality diagnostic `|Im ln det|` alone.
    pub fn q_imag_residual(&self, y: f64) -> Result<f64> {
        Ok(self.log_q(y)?.im_residual)
    }
}

#[derive(Clone, Copy)]
enum BesselKind {
    I,
    K,
}

fn phase(m: i64, theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, m as f64 * theta)
}

/// Mantissa of `v` re-expressed against the common exponent `target`.
fn shifted(v: ScaledValue, target: f64) -> f64 {
    if v.is_zero() {
        0.0
    } else {
        v.mantissa() * (v.exponent() - target).exp()
    }
}

fn column_maxima(rows: &[Vec<Entry>], n: usize) -> Vec<f64> {
    let mut scales = vec![f64::NEG_INFINITY; n];
    for row in rows {
        for (c, e) in row.iter().enumerate() {
            let ln = e.mantissa.norm().ln() + e.exponent;
            if ln > scales[c] {
                scales[c] = ln;
            }
        }
    }
    scales
}

fn collapse(rows: Vec<Vec<Entry>>, scales: &[f64]) -> ScaledMatrix {
    let n = rows.len();
    let mut m = Array2::zeros((n, n));
    for (r, row) in rows.iter().enumerate() {
        for (c, e) in row.iter().enumerate() {
            m[(r, c)] = e.mantissa * (e.exponent - scales[c]).exp();
        }
    }
    ScaledMatrix {
        mantissas: m,
        col_scales: scales.to_vec(),
    }
}

fn singular(e: LuError, y: f64, what: &str) -> Error {
    let LuError::Singular { step } = e;
    Error::SingularCollocation {
        y,
        context: format!("{what} singular at elimination step {step}"),
    }
}
