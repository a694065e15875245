//! Jacobi decomposition, quadratic-form minima and binary reduction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::{ExponentMatrix, RationalSymmetricMatrix, UnimodularMatrix};
use crate::error::{Error, Result};

/// `y = ᵗW·D·W` with `D` diagonal and `W` unit upper-triangular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiDecomposition {
    pub d: Vec<BigRational>,
    /// Row-major `n×n`, unit diagonal, zero below the diagonal.
    pub w: Vec<Vec<BigRational>>,
}

impl JacobiDecomposition {
    pub fn size(&self) -> usize {
        self.d.len()
    }

    pub fn reconstruct(&self) -> RationalSymmetricMatrix {
        let n = self.size();
        let mut rows = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for k in 0..=i.min(j) {
                    acc += &self.w[k][i] * &self.d[k] * &self.w[k][j];
                }
                rows[i][j] = acc;
            }
        }
        RationalSymmetricMatrix::from_rows(rows).expect("symmetric by construction")
    }
}

pub fn jacobi_decompose(y: &RationalSymmetricMatrix) -> Result<JacobiDecomposition> {
    let n = y.size();
    let mut d: Vec<BigRational> = Vec::with_capacity(n);
    let mut w = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        w[i][i] = BigRational::one();
        let mut di = y.get(i, i).clone();
        for k in 0..i {
            di -= &d[k] * &w[k][i] * &w[k][i];
        }
        if !di.is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        for j in i + 1..n {
            let mut acc = y.get(i, j).clone();
            for k in 0..i {
                acc -= &d[k] * &w[k][i] * &w[k][j];
            }
            w[i][j] = acc / &di;
        }
        d.push(di);
    }
    Ok(JacobiDecomposition { d, w })
}

pub fn is_positive_definite(y: &RationalSymmetricMatrix) -> bool {
    jacobi_decompose(y).is_ok()
}

fn floor_rat(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// Smallest `x ≥ 0` with `x² ≥ r` is not needed; this returns `⌊√r⌋` for `r ≥ 0`.
fn isqrt_floor_rat(r: &BigRational) -> i64 {
    if !r.is_positive() {
        return 0;
    }
    let guess = r.to_f64().unwrap_or(f64::MAX).sqrt().floor() as i64;
    let mut s = guess.max(0);
    let sq = |s: i64| BigRational::from_integer(BigInt::from(s) * BigInt::from(s));
    while sq(s) > *r {
        s -= 1;
    }
    while sq(s + 1) <= *r {
        s += 1;
    }
    s
}

/// All nonzero integer vectors with `ᵗx·v·x ≤ bound`, by Fincke–Pohst
/// enumeration on the Jacobi decomposition. Exact: every candidate range is
/// derived with rational arithmetic.
pub fn short_vectors(v: &RationalSymmetricMatrix, bound: &BigRational) -> Result<Vec<Vec<i64>>> {
    let jac = jacobi_decompose(v)?;
    let n = jac.size();
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    // v[x] = Σ d_i (x_i + Σ_{j>i} w_ij x_j)²
    fn recurse(
        i: usize,
        remaining: BigRational,
        jac: &JacobiDecomposition,
        x: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        let n = jac.size();
        let mut center = BigRational::zero();
        for j in i + 1..n {
            if x[j] != 0 {
                center -= &jac.w[i][j] * BigRational::from_integer(x[j].into());
            }
        }
        // (x_i - center)² ≤ remaining / d_i
        let radius_sq = &remaining / &jac.d[i];
        let r = isqrt_floor_rat(&radius_sq) + 1;
        let c = floor_rat(&center).to_i64().expect("center fits");
        for xi in (c - r)..=(c + r + 1) {
            let diff = BigRational::from_integer(xi.into()) - &center;
            let contrib = &jac.d[i] * &diff * &diff;
            if contrib > remaining {
                continue;
            }
            x[i] = xi;
            let rest = &remaining - &contrib;
            if i == 0 {
                if x.iter().any(|&t| t != 0) {
                    out.push(x.clone());
                }
            } else {
                recurse(i - 1, rest, jac, x, out);
            }
        }
        x[i] = 0;
    }
    recurse(n - 1, bound.clone(), &jac, &mut x, &mut out);
    Ok(out)
}

/// Minimum of `x ↦ ᵗx·v·x` over nonzero integer vectors.
///
/// The minimum is at most the smallest diagonal entry, so enumerating all
/// vectors below that bound certifies it.
pub fn minkowski_min(v: &RationalSymmetricMatrix) -> Result<BigRational> {
    jacobi_decompose(v)?;
    let bound = (0..v.size())
        .map(|i| v.get(i, i).clone())
        .min()
        .expect("n >= 1");
    let vecs = short_vectors(v, &bound)?;
    Ok(vecs
        .iter()
        .map(|x| v.eval_integer(x))
        .min()
        .unwrap_or(bound))
}

/// GL₂(ℤ)-reduction of a psd binary form `[[a,b],[b,c]]`.
///
/// The representative satisfies `0 ≤ 2·E₁₂ ≤ E₁₁ ≤ E₂₂`; since `diag(1,−1)`
/// lies in GL₂(ℤ) the sign of `E₁₂` can always be normalised, which makes the
/// representative unique. The witness satisfies `ᵗu·T·u = R`.
pub fn reduce_gl2(t: &ExponentMatrix) -> Result<(ExponentMatrix, UnimodularMatrix)> {
    if t.size() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: t.size(),
        });
    }
    if !t.is_psd() {
        return Err(Error::NotPositiveSemiDefinite);
    }
    let (mut a, mut b, mut c) = (
        t.get(0, 0) as i128,
        t.get(0, 1) as i128,
        t.get(1, 1) as i128,
    );
    // u accumulated as [[p, q], [r, s]]
    let (mut p, mut q, mut r, mut s) = (1i128, 0i128, 0i128, 1i128);
    loop {
        if a > c {
            // swap basis vectors
            std::mem::swap(&mut a, &mut c);
            std::mem::swap(&mut p, &mut q);
            std::mem::swap(&mut r, &mut s);
        }
        if a == 0 {
            debug_assert_eq!(b, 0);
            break;
        }
        if 2 * b.abs() <= a {
            if a <= c {
                break;
            }
            continue;
        }
        // second basis vector -= k · first
        let k = (2 * b + a).div_euclid(2 * a);
        let nb = b - k * a;
        let nc = c - 2 * k * b + k * k * a;
        b = nb;
        c = nc;
        q -= k * p;
        s -= k * r;
    }
    if b < 0 {
        b = -b;
        q = -q;
        s = -s;
    }
    let red = ExponentMatrix::from_upper(2, &[a as i64, b as i64, c as i64]);
    let u = UnimodularMatrix::from_rows(&[vec![p as i64, q as i64], vec![r as i64, s as i64]])?;
    debug_assert_eq!(t.transform(&u), red);
    Ok((red, u))
}
