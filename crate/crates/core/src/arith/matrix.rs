use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Exact symmetric matrix over the rationals, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalSymmetricMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl RationalSymmetricMatrix {
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "matrix size must be at least 1".into(),
            ));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            entries.extend(row.iter().cloned());
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(RationalSymmetricMatrix { n, entries })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| BigRational::from_integer(BigInt::from(x)))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigRational::from_integer(1.into());
        }
        RationalSymmetricMatrix { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    /// `ᵗx·self·x` for an integer vector.
    pub fn eval_integer(&self, x: &[i64]) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..self.n {
            if x[i] == 0 {
                continue;
            }
            let mut row = BigRational::zero();
            for j in 0..self.n {
                if x[j] != 0 {
                    row += self.get(i, j) * BigRational::from_integer(x[j].into());
                }
            }
            acc += row * BigRational::from_integer(x[i].into());
        }
        acc
    }

    /// `ᵗu·self·u`.
    pub fn transform(&self, u: &UnimodularMatrix) -> Result<Self> {
        if u.size() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: u.size(),
            });
        }
        let n = self.n;
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for k in 0..n {
                    let uki = u.get(k, i);
                    if uki == 0 {
                        continue;
                    }
                    for l in 0..n {
                        let ulj = u.get(l, j);
                        if ulj != 0 {
                            acc += self.get(k, l) * BigRational::from_integer((uki * ulj).into());
                        }
                    }
                }
                entries[i * n + j] = acc;
            }
        }
        Ok(RationalSymmetricMatrix { n, entries })
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }
}

/// Integer symmetric matrix `E = 8T` keying a Fourier exponent `T`.
///
/// Only the upper triangle is stored, row by row, so the derived ordering is
/// the row-major lexicographic order of the full matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentMatrix {
    n: usize,
    upper: SmallVec<[i64; 10]>,
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i.saturating_sub(1)) / 2 - if i > 0 { i } else { 0 } + j
}

impl ExponentMatrix {
    pub fn zero(n: usize) -> Self {
        ExponentMatrix {
            n,
            upper: SmallVec::from_elem(0, n * (n + 1) / 2),
        }
    }

    /// Builds from full rows; rejects non-symmetric input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut e = Self::zero(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for j in 0..n {
                if rows[j][i] != row[j] {
                    return Err(Error::NotSymmetric);
                }
                if i <= j {
                    e.set(i, j, row[j]);
                }
            }
        }
        Ok(e)
    }

    /// Builds from the upper triangle listed row by row.
    pub fn from_upper(n: usize, upper: &[i64]) -> Self {
        assert_eq!(upper.len(), n * (n + 1) / 2);
        ExponentMatrix {
            n,
            upper: SmallVec::from_slice(upper),
        }
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let mut e = Self::zero(d.len());
        for (i, &x) in d.iter().enumerate() {
            e.set(i, i, x);
        }
        e
    }

    /// `w·ᵗw`.
    pub fn outer(w: &[i64]) -> Self {
        let n = w.len();
        let mut e = Self::zero(n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                e.upper[k] = w[i] * w[j];
                k += 1;
            }
        }
        e
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.upper[upper_index(self.n, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        let k = upper_index(self.n, i, j);
        self.upper[k] = v;
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn trace(&self) -> i64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &ExponentMatrix) -> ExponentMatrix {
        debug_assert_eq!(self.n, other.n);
        let mut upper = self.upper.clone();
        for (a, b) in upper.iter_mut().zip(other.upper.iter()) {
            *a += *b;
        }
        ExponentMatrix { n: self.n, upper }
    }

    pub fn neg(&self) -> ExponentMatrix {
        ExponentMatrix {
            n: self.n,
            upper: self.upper.iter().map(|x| -x).collect(),
        }
    }

    /// `ᵗu·self·u`.
    pub fn transform(&self, u: &UnimodularMatrix) -> ExponentMatrix {
        self.transform_by(u.size(), |i, j| u.get(i, j))
    }

    /// `ᵗu·self·u` for an arbitrary integer matrix given entrywise.
    pub fn transform_by(&self, n: usize, u: impl Fn(usize, usize) -> i64) -> ExponentMatrix {
        assert_eq!(n, self.n);
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0i64;
                for k in 0..n {
                    let uki = u(k, i);
                    if uki == 0 {
                        continue;
                    }
                    for l in 0..n {
                        acc += uki * self.get(k, l) * u(l, j);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Embeds into genus `n + 1` by a zero last row and column.
    pub fn extend_zero(&self) -> ExponentMatrix {
        let mut out = Self::zero(self.n + 1);
        for i in 0..self.n {
            for j in i..self.n {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Drops the last row and column.
    pub fn truncate_last(&self) -> ExponentMatrix {
        let m = self.n - 1;
        let mut out = Self::zero(m);
        for i in 0..m {
            for j in i..m {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    pub fn last_row_is_zero(&self) -> bool {
        let l = self.n - 1;
        (0..self.n).all(|j| self.get(l, j) == 0)
    }

    pub fn block_diag(a: &ExponentMatrix, b: &ExponentMatrix) -> ExponentMatrix {
        let n = a.n + b.n;
        let mut out = Self::zero(n);
        for i in 0..a.n {
            for j in i..a.n {
                out.set(i, j, a.get(i, j));
            }
        }
        for i in 0..b.n {
            for j in i..b.n {
                out.set(a.n + i, a.n + j, b.get(i, j));
            }
        }
        out
    }

    /// Upper-left `n1×n1` block and lower-right complement.
    pub fn diagonal_blocks(&self, n1: usize) -> (ExponentMatrix, ExponentMatrix) {
        let n2 = self.n - n1;
        let mut a = Self::zero(n1);
        let mut b = Self::zero(n2);
        for i in 0..n1 {
            for j in i..n1 {
                a.set(i, j, self.get(i, j));
            }
        }
        for i in 0..n2 {
            for j in i..n2 {
                b.set(i, j, self.get(n1 + i, n1 + j));
            }
        }
        (a, b)
    }

    pub fn is_block_diagonal(&self, n1: usize) -> bool {
        (0..n1).all(|i| (n1..self.n).all(|j| self.get(i, j) == 0))
    }

    /// Exact positive semi-definiteness: every principal minor is nonnegative.
    pub fn is_psd(&self) -> bool {
        let n = self.n;
        if (0..n).any(|i| self.get(i, i) < 0) {
            return false;
        }
        if n == 2 {
            let (a, b, c) = (
                self.get(0, 0) as i128,
                self.get(0, 1) as i128,
                self.get(1, 1) as i128,
            );
            return a * c - b * b >= 0;
        }
        for mask in 1u32..(1u32 << n) {
            if mask.count_ones() < 2 {
                continue;
            }
            let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let m: Vec<Vec<BigInt>> = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| BigInt::from(self.get(i, j))).collect())
                .collect();
            if bareiss_det(m).is_negative() {
                return false;
            }
        }
        true
    }

    pub fn to_rational(&self) -> RationalSymmetricMatrix {
        RationalSymmetricMatrix::from_i64_rows(&self.rows()).expect("symmetric by construction")
    }
}

impl fmt::Debug for ExponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

impl fmt::Display for ExponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

impl Serialize for ExponentMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExponentMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        ExponentMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Fraction-free Gaussian elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Integer matrix with determinant ±1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl UnimodularMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        let u = UnimodularMatrix { n, entries };
        let d = u.det();
        if d != 1 && d != -1 {
            return Err(Error::InvalidArgument(format!("determinant {d} is not ±1")));
        }
        Ok(u)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        UnimodularMatrix { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn det(&self) -> i64 {
        let m = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        i64::try_from(bareiss_det(m)).expect("determinant fits in i64")
    }

    pub fn mul(&self, other: &UnimodularMatrix) -> UnimodularMatrix {
        let n = self.n;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        UnimodularMatrix { n, entries }
    }

    /// Inverse via the adjugate (exact since `det = ±1`); sizes up to 4.
    pub fn inverse(&self) -> UnimodularMatrix {
        let n = self.n;
        let det = self.det();
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<BigInt>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != i)
                            .map(|c| BigInt::from(self.get(r, c)))
                            .collect()
                    })
                    .collect();
                let cof = i64::try_from(bareiss_det(minor)).expect("cofactor fits");
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                entries[i * n + j] = sign * cof * det;
            }
        }
        UnimodularMatrix { n, entries }
    }

    pub fn transpose(&self) -> UnimodularMatrix {
        let n = self.n;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.get(i, j);
            }
        }
        UnimodularMatrix { n, entries }
    }

    /// Permutation matrix sending basis vector `j` to `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut entries = vec![0; n * n];
        for (j, &i) in perm.iter().enumerate() {
            entries[i * n + j] = 1;
        }
        UnimodularMatrix { n, entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_indexing_matches_rows() {
        let rows = vec![vec![1, 2, 3], vec![2, 4, 5], vec![3, 5, 6]];
        let e = ExponentMatrix::from_rows(&rows).unwrap();
        assert_eq!(e.upper(), &[1, 2, 3, 4, 5, 6]);
        assert_eq!(e.rows(), rows);
        assert_eq!(e.trace(), 11);
    }

    #[test]
    fn asymmetric_rows_rejected() {
        assert_eq!(
            ExponentMatrix::from_rows(&[vec![1, 2], vec![3, 4]]),
            Err(Error::NotSymmetric)
        );
    }

    #[test]
    fn ordering_is_row_major_lexicographic() {
        let a = ExponentMatrix::from_rows(&[vec![0, 5], vec![5, 9]]).unwrap();
        let b = ExponentMatrix::from_rows(&[vec![1, -3], vec![-3, 9]]).unwrap();
        let c = ExponentMatrix::from_rows(&[vec![1, -3], vec![-3, 10]]).unwrap();
        assert!(a < b && b < c);
    }

    #[test]
    fn psd_detection() {
        assert!(ExponentMatrix::from_rows(&[vec![1, 1], vec![1, 1]])
            .unwrap()
            .is_psd());
        assert!(!ExponentMatrix::from_rows(&[vec![1, 2], vec![2, 1]])
            .unwrap()
            .is_psd());
        // all 2x2 leading minors fine, but the (1,3) principal minor is negative
        let e = ExponentMatrix::from_rows(&[vec![1, 0, 2], vec![0, 1, 0], vec![2, 0, 1]]).unwrap();
        assert!(!e.is_psd());
        let z = ExponentMatrix::from_rows(&[vec![0, 0, 0], vec![0, 2, 1], vec![0, 1, 2]]).unwrap();
        assert!(z.is_psd());
    }

    #[test]
    fn unimodular_inverse() {
        let u =
            UnimodularMatrix::from_rows(&[vec![2, 1, 0], vec![1, 1, 0], vec![3, -2, -1]]).unwrap();
        assert_eq!(u.mul(&u.inverse()), UnimodularMatrix::identity(3));
        assert!(UnimodularMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn transform_matches_rational_path() {
        let e = ExponentMatrix::from_rows(&[vec![5, 2], vec![2, 1]]).unwrap();
        let u = UnimodularMatrix::from_rows(&[vec![1, -2], vec![0, 1]]).unwrap();
        let t = e.transform(&u);
        assert_eq!(t.to_rational(), e.to_rational().transform(&u).unwrap());
        assert_eq!(t.rows(), vec![vec![5, -8], vec![-8, 13]]);
    }
}
