//! Small dense complex linear algebra: LU with partial pivoting,
//! multi-right-hand-side solves and log-determinants.
//!
//! Matrices here are at most a few hundred square, so plain O(n³) loops are
//! the right tool; no external solver is involved.

use ndarray::Array2;
use num_complex::Complex64;

/// Relative pivot threshold below which a matrix is declared singular.
const PIVOT_RELATIVE_FLOOR: f64 = 1e3 * f64::EPSILON;

pub(crate) struct LuFactors {
    lu: Array2<Complex64>,
    pivots: Vec<usize>,
    row_swaps: usize,
    /// Smallest pivot over the matrix max-norm; a crude conditioning gauge.
    pub(crate) min_pivot_ratio: f64,
}

pub(crate) enum LuError {
    Singular { step: usize },
}

/// Factorizes `a` in place (PA = LU, unit lower triangle implicit).
pub(crate) fn lu_factor(mut a: Array2<Complex64>) -> Result<LuFactors, LuError> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let norm = a
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut pivots = vec![0usize; n];
    let mut row_swaps = 0usize;
    let mut min_pivot_ratio = f64::INFINITY;

    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_mag = a[(k, k)].norm();
        for i in (k + 1)..n {
            let mag = a[(i, k)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_mag < PIVOT_RELATIVE_FLOOR * norm {
            return Err(LuError::Singular { step: k });
        }
        min_pivot_ratio = min_pivot_ratio.min(pivot_mag / norm);
        pivots[k] = pivot_row;
        if pivot_row != k {
            row_swaps += 1;
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = tmp;
            }
        }
        let inv_pivot = Complex64::new(1.0, 0.0) / a[(k, k)];
        for i in (k + 1)..n {
            let mult = a[(i, k)] * inv_pivot;
            a[(i, k)] = mult;
            if mult != Complex64::new(0.0, 0.0) {
                for j in (k + 1)..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= mult * akj;
                }
            }
        }
    }
    Ok(LuFactors {
        lu: a,
        pivots,
        row_swaps,
        min_pivot_ratio,
    })
}

impl LuFactors {
    /// Solves `A X = B` for all columns of `b` in place.
    pub(crate) fn solve_in_place(&self, b: &mut Array2<Complex64>) {
        let n = self.lu.nrows();
        let ncols = b.ncols();
        // apply the row permutation
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                for j in 0..ncols {
                    let tmp = b[(k, j)];
                    b[(k, j)] = b[(p, j)];
                    b[(p, j)] = tmp;
                }
            }
        }
        // forward substitution with the implicit unit lower triangle
        for k in 0..n {
            for i in (k + 1)..n {
                let mult = self.lu[(i, k)];
                if mult != Complex64::new(0.0, 0.0) {
                    for j in 0..ncols {
                        let bkj = b[(k, j)];
                        b[(i, j)] -= mult * bkj;
                    }
                }
            }
        }
        // back substitution
        for k in (0..n).rev() {
            let inv = Complex64::new(1.0, 0.0) / self.lu[(k, k)];
            for j in 0..ncols {
                b[(k, j)] *= inv;
            }
            for i in 0..k {
                let mult = self.lu[(i, k)];
                if mult != Complex64::new(0.0, 0.0) {
                    for j in 0..ncols {
                        let bkj = b[(k, j)];
                        b[(i, j)] -= mult * bkj;
                    }
                }
            }
        }
    }

    /// `ln det A` as (ln|det|, arg residual). The argument is accumulated
    /// over the pivots (plus `π` per row swap) and reduced modulo 2π, which
    /// is the meaningful residual when the determinant is known to be real
    /// and positive.
    pub(crate) fn log_det(&self) -> (f64, f64) {
        let n = self.lu.nrows();
        let mut ln_abs = 0.0f64;
        let mut arg = if self.row_swaps % 2 == 1 {
            std::f64::consts::PI
        } else {
            0.0
        };
        for k in 0..n {
            let u = self.lu[(k, k)];
            ln_abs += u.norm().ln();
            arg += u.arg();
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let wrapped = arg - two_pi * (arg / two_pi).round();
        (ln_abs, wrapped)
    }
}

/// Solves `A X = B` after row-equilibrating the system by A's own row
/// maxima. The scaling (applied to both sides) cancels exactly in the
/// solution but keeps partial pivoting meaningful when A's rows span many
/// orders of magnitude, as the collocation matrices do on spread-out
/// geometries.
pub(crate) struct EquilibratedSolve {
    pub(crate) solution: Array2<Complex64>,
    pub(crate) min_pivot_ratio: f64,
}

pub(crate) fn solve_equilibrated(
    a: &Array2<Complex64>,
    b: &Array2<Complex64>,
) -> Result<EquilibratedSolve, LuError> {
    let n = a.nrows();
    let ncols = b.ncols();
    let mut a_eq = a.clone();
    let mut b_eq = b.clone();
    for i in 0..n {
        let mut row_max = 0.0f64;
        for j in 0..n {
            row_max = row_max.max(a_eq[(i, j)].norm());
        }
        if row_max > 0.0 && row_max.is_finite() {
            let inv = 1.0 / row_max;
            for j in 0..n {
                a_eq[(i, j)] *= inv;
            }
            for j in 0..ncols {
                b_eq[(i, j)] *= inv;
            }
        }
    }
    let factors = lu_factor(a_eq.clone())?;
    let mut x = b_eq.clone();
    factors.solve_in_place(&mut x);
    // one step of iterative refinement: the collocation systems can be
    // ill-conditioned at the extremes of the spectrum, and the refined
    // solution restores near-machine backward error there
    let mut residual = &b_eq - &a_eq.dot(&x);
    factors.solve_in_place(&mut residual);
    x += &residual;
    Ok(EquilibratedSolve {
        solution: x,
        min_pivot_ratio: factors.min_pivot_ratio,
    })
}

/// `ln det(I − Z)` as (real part, imaginary residual mod 2π).
pub(crate) fn log_det_one_minus(z: &Array2<Complex64>) -> Result<(f64, f64), LuError> {
    let n = z.nrows();
    let mut a = -z.clone();
    for k in 0..n {
        a[(k, k)] += Complex64::new(1.0, 0.0);
    }
    let factors = lu_factor(a)?;
    Ok(factors.log_det())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solve_known_system() {
        let a = array![[c(2.0, 0.0), c(1.0, 1.0)], [c(0.0, -1.0), c(3.0, 0.0)]];
        let x_true = array![[c(1.0, 2.0)], [c(-0.5, 0.25)]];
        let b = a.dot(&x_true);
        let x = solve_equilibrated(&a, &b).map_err(|_| ()).unwrap().solution;
        for i in 0..2 {
            assert_relative_eq!(x[(i, 0)].re, x_true[(i, 0)].re, epsilon = 1e-13);
            assert_relative_eq!(x[(i, 0)].im, x_true[(i, 0)].im, epsilon = 1e-13);
        }
    }

    #[test]
    fn log_det_diagonal() {
        // det(I - diag(0.5, 0.25)) = 0.5 * 0.75
        let z = array![[c(0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.25, 0.0)]];
        let (re, im) = log_det_one_minus(&z).map_err(|_| ()).unwrap();
        assert_relative_eq!(re, (0.5f64 * 0.75).ln(), epsilon = 1e-14);
        assert!(im.abs() < 1e-14);
    }

    #[test]
    fn log_det_real_positive_with_complex_entries() {
        // Z = v v† /4 with complex v: I - Z is Hermitian positive definite
        let v = [c(1.0, 1.0), c(0.5, -0.25)];
        let mut z = Array2::zeros((2, 2));
        for i in 0..2 {
            for j in 0..2 {
                z[(i, j)] = v[i] * v[j].conj() * 0.25;
            }
        }
        let trace = (v[0].norm_sqr() + v[1].norm_sqr()) * 0.25;
        let (re, im) = log_det_one_minus(&z).map_err(|_| ()).unwrap();
        assert_relative_eq!(re, (1.0 - trace).ln(), epsilon = 1e-13);
        assert!(im.abs() < 1e-13);
    }

    #[test]
    fn singular_detected() {
        let a = array![[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        let b = Array2::eye(2);
        assert!(matches!(
            solve_equilibrated(&a, &b),
            Err(LuError::Singular { .. })
        ));
    }

    #[test]
    fn equilibration_handles_wild_row_scales() {
        // rows spanning 1e±260: unequilibrated pivoting would lose the tiny row
        let s = 1e260;
        let a = array![
            [c(2.0 * s, 0.0), c(s, 0.0)],
            [c(1.0 / s, 0.0), c(3.0 / s, 0.0)]
        ];
        let x_true = array![[c(2.0, 0.0)], [c(-1.0, 0.0)]];
        let b = a.dot(&x_true);
        let x = solve_equilibrated(&a, &b).map_err(|_| ()).unwrap().solution;
        assert_relative_eq!(x[(0, 0)].re, 2.0, epsilon = 1e-12);
        assert_relative_eq!(x[(1, 0)].re, -1.0, epsilon = 1e-12);
    }
}
