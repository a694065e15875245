//! Points of the Siegel upper half space in floating point.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `z = x + i·y` with `x, y` real symmetric and `y` positive definite.
#[derive(Clone, Debug, PartialEq)]
pub struct PointInHn {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

/// Floating-point Jacobi decomposition `y = ᵗW·D·W`.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatJacobi {
    pub d: Vec<f64>,
    pub w: DMatrix<f64>,
}

const SYMMETRY_TOL: f64 = 1e-12;

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.ncols(),
        });
    }
    let scale = m.amax().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric);
            }
        }
    }
    Ok(())
}

pub fn float_jacobi(y: &DMatrix<f64>) -> Result<FloatJacobi> {
    let n = y.nrows();
    let mut d = Vec::with_capacity(n);
    let mut w = DMatrix::<f64>::identity(n, n);
    let scale = y.amax().max(f64::MIN_POSITIVE);
    for i in 0..n {
        let mut di = y[(i, i)];
        for k in 0..i {
            di -= d[k] * w[(k, i)] * w[(k, i)];
        }
        if !(di > 1e-14 * scale) {
            return Err(Error::NotPositiveDefinite);
        }
        for j in i + 1..n {
            let mut acc = y[(i, j)];
            for k in 0..i {
                acc -= d[k] * w[(k, i)] * w[(k, j)];
            }
            w[(i, j)] = acc / di;
        }
        d.push(di);
    }
    Ok(FloatJacobi { d, w })
}

impl FloatJacobi {
    /// Provable lower bound for the smallest eigenvalue:
    /// `ᵗv·y·v = |D^{1/2}·W·v|² ≥ min dᵢ · |v|² / ‖W⁻¹‖_F²`.
    pub fn min_eigenvalue_lower_bound(&self) -> f64 {
        let n = self.d.len();
        let winv = self.w.clone().try_inverse().expect("unit triangular");
        let fro2: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| winv[(i, j)].powi(2))
            .sum();
        let dmin = self.d.iter().cloned().fold(f64::INFINITY, f64::min);
        dmin / fro2
    }
}

impl PointInHn {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&x)?;
        check_symmetric(&y)?;
        if x.nrows() != y.nrows() {
            return Err(Error::DimensionMismatch {
                expected: y.nrows(),
                got: x.nrows(),
            });
        }
        float_jacobi(&y)?;
        Ok(PointInHn { x, y })
    }

    pub fn from_rows(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<Self> {
        let n = y.len();
        let to_m = |r: &[Vec<f64>]| {
            if r.iter().any(|row| row.len() != n) || r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            Ok(DMatrix::from_fn(n, n, |i, j| r[i][j]))
        };
        Self::new(to_m(x)?, to_m(y)?)
    }

    /// `i·y` for a diagonal `y`.
    pub fn imaginary_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::new(
            DMatrix::zeros(n, n),
            DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 }),
        )
    }

    pub fn from_complex(z: &DMatrix<Complex64>) -> Result<Self> {
        let x = z.map(|c| c.re);
        let y = z.map(|c| c.im);
        // symmetrise away rounding noise from matrix inversion
        let xs = (&x + x.transpose()) * 0.5;
        let ys = (&y + y.transpose()) * 0.5;
        Self::new(xs, ys)
    }

    pub fn genus(&self) -> usize {
        self.y.nrows()
    }

    pub fn real_part(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn imag_part(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        let n = self.genus();
        DMatrix::from_fn(n, n, |i, j| Complex64::new(self.x[(i, j)], self.y[(i, j)]))
    }

    pub fn jacobi(&self) -> FloatJacobi {
        float_jacobi(&self.y).expect("validated on construction")
    }

    /// Block-diagonal point `diag(self, other)`.
    pub fn block_diag(&self, other: &PointInHn) -> PointInHn {
        let (n1, n2) = (self.genus(), other.genus());
        let n = n1 + n2;
        let embed = |a: &DMatrix<f64>, b: &DMatrix<f64>| {
            DMatrix::from_fn(n, n, |i, j| {
                if i < n1 && j < n1 {
                    a[(i, j)]
                } else if i >= n1 && j >= n1 {
                    b[(i - n1, j - n1)]
                } else {
                    0.0
                }
            })
        };
        PointInHn {
            x: embed(&self.x, &other.x),
            y: embed(&self.y, &other.y),
        }
    }
}

/// Membership in the Siegel domain with parameter `u`: `|x_ij| < u`,
/// `|w_ij| < u`, `d_i < u·d_{i+1}` and `1 < u·d_1`.
pub fn siegel_domain_contains(z: &PointInHn, u: f64) -> bool {
    let n = z.genus();
    let jac = z.jacobi();
    let cond_a = z.x.iter().all(|v| v.abs() < u);
    let cond_b = (0..n).all(|i| (i + 1..n).all(|j| jac.w[(i, j)].abs() < u));
    let cond_c = (0..n.saturating_sub(1)).all(|i| jac.d[i] < u * jac.d[i + 1]);
    let cond_d = 1.0 < u * jac.d[0];
    cond_a && cond_b && cond_c && cond_d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_examples() {
        let z = PointInHn::imaginary_diagonal(&[1.0, 1.0]).unwrap();
        assert!(siegel_domain_contains(&z, 2.0));
        let z = PointInHn::imaginary_diagonal(&[1.0, 100.0]).unwrap();
        assert!(siegel_domain_contains(&z, 2.0));
        let z = PointInHn::imaginary_diagonal(&[100.0, 1.0]).unwrap();
        assert!(!siegel_domain_contains(&z, 2.0));
        let z = PointInHn::from_rows(&[vec![10.0]], &[vec![1.0]]).unwrap();
        assert!(!siegel_domain_contains(&z, 2.0));
    }

    #[test]
    fn condition_d_and_b() {
        let z = PointInHn::imaginary_diagonal(&[0.4]).unwrap();
        assert!(!siegel_domain_contains(&z, 2.0));
        let z = PointInHn::from_rows(
            &[vec![0.0, 0.0], vec![0.0, 0.0]],
            &[vec![1.0, 3.0], vec![3.0, 10.0]],
        )
        .unwrap();
        assert_eq!(z.jacobi().w[(0, 1)], 3.0);
        assert!(!siegel_domain_contains(&z, 2.0));
    }

    #[test]
    fn invalid_points_rejected() {
        assert!(PointInHn::from_rows(
            &[vec![0.0, 0.0], vec![0.0, 0.0]],
            &[vec![1.0, 2.0], vec![2.0, 1.0]]
        )
        .is_err());
        assert!(PointInHn::from_rows(
            &[vec![0.0, 1.0], vec![0.0, 0.0]],
            &[vec![1.0, 0.0], vec![0.0, 1.0]]
        )
        .is_err());
    }

    #[test]
    fn eigenvalue_bound_is_a_lower_bound() {
        let y = DMatrix::from_row_slice(3, 3, &[2.0, 0.7, -0.3, 0.7, 1.5, 0.2, -0.3, 0.2, 1.1]);
        let jac = float_jacobi(&y).unwrap();
        let lo = jac.min_eigenvalue_lower_bound();
        let eig = y.symmetric_eigenvalues().min();
        assert!(lo > 0.0 && lo <= eig + 1e-12);
    }
}
