//! Integral symplectic matrices, their reductions mod 2, and the affine
//! action on theta characteristics.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::characteristic::{all_characteristics, ThetaCharacteristic};
use crate::arith::PointInHn;
use crate::error::{Error, Result};

/// `J = (0 I; −I 0)` of size `2n`.
pub fn standard_j(n: usize) -> DMatrix<i64> {
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i < n && j == i + n {
            1
        } else if i >= n && j + n == i {
            -1
        } else {
            0
        }
    })
}

/// Element of `Sp_{2n}(ℤ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerSymplectic {
    n: usize,
    m: DMatrix<i64>,
}

impl IntegerSymplectic {
    pub fn new(m: DMatrix<i64>) -> Result<Self> {
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
            return Err(Error::NotSymplectic(
                ": not a square matrix of even size".into(),
            ));
        }
        let n = m.nrows() / 2;
        let j = standard_j(n);
        if &m * &j * m.transpose() != j {
            return Err(Error::NotSymplectic(String::new()));
        }
        Ok(IntegerSymplectic { n, m })
    }

    pub fn identity(n: usize) -> Self {
        IntegerSymplectic {
            n,
            m: DMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn j(n: usize) -> Self {
        IntegerSymplectic {
            n,
            m: standard_j(n),
        }
    }

    /// `(I S; 0 I)` for an integral symmetric `S`.
    pub fn translation(s: &DMatrix<i64>) -> Self {
        let n = s.nrows();
        let mut m = DMatrix::identity(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                m[(i, n + j)] = s[(i, j)];
            }
        }
        IntegerSymplectic { n, m }
    }

    pub fn genus(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<i64> {
        &self.m
    }

    /// Blocks `(a, b, c, d)`.
    pub fn blocks(&self) -> (DMatrix<i64>, DMatrix<i64>, DMatrix<i64>, DMatrix<i64>) {
        let n = self.n;
        (
            self.m.view((0, 0), (n, n)).into_owned(),
            self.m.view((0, n), (n, n)).into_owned(),
            self.m.view((n, 0), (n, n)).into_owned(),
            self.m.view((n, n), (n, n)).into_owned(),
        )
    }

    pub fn mul(&self, other: &IntegerSymplectic) -> IntegerSymplectic {
        IntegerSymplectic {
            n: self.n,
            m: &self.m * &other.m,
        }
    }

    /// `M⁻¹ = −J·ᵗM·J`.
    pub fn inverse(&self) -> IntegerSymplectic {
        let j = standard_j(self.n);
        IntegerSymplectic {
            n: self.n,
            m: -(&j * self.m.transpose() * &j),
        }
    }

    /// `det(cτ + d)` and `(aτ + b)(cτ + d)⁻¹`.
    pub fn act_on_point(&self, tau: &PointInHn) -> Result<(Complex64, PointInHn)> {
        if tau.genus() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: tau.genus(),
            });
        }
        let (a, b, c, d) = self.blocks();
        let cx = |m: &DMatrix<i64>| m.map(|v| Complex64::new(v as f64, 0.0));
        let z = tau.to_complex();
        let num = cx(&a) * &z + cx(&b);
        let den = cx(&c) * &z + cx(&d);
        let det = den.determinant();
        let inv = den
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("cτ + d is singular".into()))?;
        Ok((det, PointInHn::from_complex(&(num * inv))?))
    }

    pub fn mod2(&self) -> SymplecticMod2 {
        SymplecticMod2 {
            n: self.n,
            m: self.m.map(|x| x.rem_euclid(2) as u8),
        }
    }
}

/// The fixed generating set: `J` and the translations by symmetric 0/1
/// basis matrices `E_ii` and `E_ij + E_ji`.
pub fn integer_generators(n: usize) -> Vec<IntegerSymplectic> {
    let mut gens = vec![IntegerSymplectic::j(n)];
    for i in 0..n {
        for j in i..n {
            let mut s = DMatrix::zeros(n, n);
            s[(i, j)] = 1;
            s[(j, i)] = 1;
            gens.push(IntegerSymplectic::translation(&s));
        }
    }
    gens
}

/// Element of `Sp_{2n}(F₂)`, entries in `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticMod2 {
    n: usize,
    m: DMatrix<u8>,
}

impl SymplecticMod2 {
    pub fn new(m: DMatrix<u8>) -> Result<Self> {
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
            return Err(Error::NotSymplectic(
                ": not a square matrix of even size".into(),
            ));
        }
        if m.iter().any(|&x| x > 1) {
            return Err(Error::InvalidArgument("entries must be 0 or 1".into()));
        }
        let s = SymplecticMod2 {
            n: m.nrows() / 2,
            m,
        };
        if !s.is_symplectic() {
            return Err(Error::NotSymplectic(" modulo 2".into()));
        }
        Ok(s)
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMod2 {
            n,
            m: DMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn genus(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<u8> {
        &self.m
    }

    fn is_symplectic(&self) -> bool {
        let j = standard_j(self.n).map(|x| x.rem_euclid(2) as u8);
        self.mul_raw(&j, &self.m.transpose()) == j
    }

    fn mul_raw(&self, a: &DMatrix<u8>, b: &DMatrix<u8>) -> DMatrix<u8> {
        let p = self.m.map(|x| x as u32) * a.map(|x| x as u32) * b.map(|x| x as u32);
        p.map(|x| (x % 2) as u8)
    }

    pub fn mul(&self, other: &SymplecticMod2) -> SymplecticMod2 {
        let p = self.m.map(|x| x as u32) * other.m.map(|x| x as u32);
        SymplecticMod2 {
            n: self.n,
            m: p.map(|x| (x % 2) as u8),
        }
    }

    fn entry(&self, i: usize, j: usize) -> u8 {
        self.m[(i, j)]
    }

    /// `γ·(α; β) = (dα − cβ + diag(c·ᵗd); −bα + aβ + diag(a·ᵗb)) mod 2`.
    pub fn act(&self, m: &ThetaCharacteristic) -> ThetaCharacteristic {
        let n = self.n;
        let (alpha, beta) = (m.a_bits(), m.b_bits());
        let bit = |v: u16, j: usize| ((v >> j) & 1) as u8;
        let mut na = 0u16;
        let mut nb = 0u16;
        for i in 0..n {
            let mut x = 0u8;
            let mut y = 0u8;
            for j in 0..n {
                let (a, b) = (self.entry(i, j), self.entry(i, n + j));
                let (c, d) = (self.entry(n + i, j), self.entry(n + i, n + j));
                x ^= (d & bit(alpha, j)) ^ (c & bit(beta, j)) ^ (c & d);
                y ^= (b & bit(alpha, j)) ^ (a & bit(beta, j)) ^ (a & b);
            }
            na |= (x as u16) << i;
            nb |= (y as u16) << i;
        }
        ThetaCharacteristic::from_bits(n, na, nb)
    }

    /// The induced permutation of characteristic indices.
    pub fn permutation(&self) -> Vec<u16> {
        all_characteristics(self.n)
            .map(|m| self.act(&m).index() as u16)
            .collect()
    }
}

pub fn sp_act(g: &SymplecticMod2, m: &ThetaCharacteristic) -> Result<ThetaCharacteristic> {
    if g.genus() != m.genus() {
        return Err(Error::DimensionMismatch {
            expected: g.genus(),
            got: m.genus(),
        });
    }
    if !g.is_symplectic() {
        return Err(Error::NotSymplectic(" modulo 2".into()));
    }
    Ok(g.act(m))
}

pub fn generators_mod2(n: usize) -> Vec<SymplecticMod2> {
    integer_generators(n).iter().map(|g| g.mod2()).collect()
}

pub fn generator_permutations(n: usize) -> Vec<Vec<u16>> {
    generators_mod2(n).iter().map(|g| g.permutation()).collect()
}

/// `|Sp_{2n}(F₂)| = 2^{n²} ∏_{i=1}^{n} (2^{2i} − 1)`.
pub fn sp2n_f2_order(n: usize) -> u128 {
    let mut order: u128 = 1 << (n * n);
    for i in 1..=n {
        order *= (1u128 << (2 * i)) - 1;
    }
    order
}

/// Partition of all characteristics into orbits under the generators, each
/// block sorted, blocks ordered by their smallest index.
pub fn orbits(n: usize) -> Result<Vec<Vec<ThetaCharacteristic>>> {
    if n == 0 || n > 4 {
        return Err(Error::InvalidArgument(format!(
            "orbit enumeration supports genus 1..=4, got {n}"
        )));
    }
    let perms = generator_permutations(n);
    let total = 1usize << (2 * n);
    let mut seen = vec![false; total];
    let mut blocks = Vec::new();
    for start in 0..total {
        if seen[start] {
            continue;
        }
        let mut block = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            block.push(i);
            for p in &perms {
                let j = p[i] as usize;
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        block.sort_unstable();
        blocks.push(
            block
                .into_iter()
                .map(|i| ThetaCharacteristic::from_index(n, i))
                .collect(),
        );
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_inverts_in_genus_one() {
        let tau = PointInHn::from_rows(&[vec![0.3]], &[vec![1.2]]).unwrap();
        let (det, image) = IntegerSymplectic::j(1).act_on_point(&tau).unwrap();
        let z = Complex64::new(0.3, 1.2);
        assert!((det - (-z)).norm() < 1e-14);
        let w = -1.0 / z;
        assert!((image.real_part()[(0, 0)] - w.re).abs() < 1e-14);
        assert!((image.imag_part()[(0, 0)] - w.im).abs() < 1e-14);
    }
    use std::collections::HashSet;

    /// Closure of the generators under multiplication.
    fn enumerate_group(n: usize) -> Vec<SymplecticMod2> {
        let gens = generators_mod2(n);
        let mut seen: HashSet<SymplecticMod2> = HashSet::new();
        let id = SymplecticMod2::identity(n);
        let mut queue = VecDeque::from([id.clone()]);
        seen.insert(id);
        while let Some(g) = queue.pop_front() {
            for h in &gens {
                let p = g.mul(h);
                if seen.insert(p.clone()) {
                    queue.push_back(p);
                }
            }
        }
        seen.into_iter().collect()
    }

    #[test]
    fn group_order_formula_matches_enumeration() {
        assert_eq!(enumerate_group(1).len() as u128, sp2n_f2_order(1));
        assert_eq!(enumerate_group(2).len() as u128, sp2n_f2_order(2));
        assert_eq!(sp2n_f2_order(2), 720);
        assert_eq!(sp2n_f2_order(3), 1_451_520);
    }

    #[test]
    fn generators_are_symplectic() {
        for n in 1..=4 {
            for g in integer_generators(n) {
                assert!(IntegerSymplectic::new(g.matrix().clone()).is_ok());
                assert_eq!(g.mul(&g.inverse()), IntegerSymplectic::identity(n));
            }
        }
    }

    #[test]
    fn identity_acts_trivially() {
        for n in 1..=3 {
            let id = SymplecticMod2::identity(n);
            for m in all_characteristics(n) {
                assert_eq!(sp_act(&id, &m).unwrap(), m);
            }
        }
    }

    #[test]
    fn parity_preserved_exhaustively_genus_one() {
        for g in enumerate_group(1) {
            for m in all_characteristics(1) {
                assert_eq!(g.act(&m).parity(), m.parity());
            }
        }
    }

    #[test]
    fn group_action_law_exhaustive_genus_two() {
        let group = enumerate_group(2);
        let gens = generators_mod2(2);
        for g in &gens {
            for h in &group {
                for m in all_characteristics(2) {
                    assert_eq!(g.mul(h).act(&m), g.act(&h.act(&m)), "g={g:?} h={h:?} m={m}");
                }
            }
        }
    }

    #[test]
    fn non_symplectic_rejected() {
        let mut m = DMatrix::<u8>::identity(2, 2);
        m[(0, 1)] = 1;
        m[(1, 0)] = 1;
        assert!(SymplecticMod2::new(m).is_err());
        let bad = SymplecticMod2 {
            n: 1,
            m: DMatrix::from_row_slice(2, 2, &[1, 1, 1, 1]),
        };
        assert!(sp_act(&bad, &ThetaCharacteristic::from_index(1, 0)).is_err());
    }

    #[test]
    fn two_orbits_with_expected_sizes() {
        for (n, even, odd) in [(1usize, 3usize, 1usize), (2, 10, 6), (3, 36, 28)] {
            let blocks = orbits(n).unwrap();
            assert_eq!(blocks.len(), 2);
            let mut sizes: Vec<usize> = blocks.iter().map(|b| b.len()).collect();
            sizes.sort_unstable();
            assert_eq!(sizes, vec![odd, even]);
            for b in &blocks {
                assert!(b.iter().all(|m| m.parity() == b[0].parity()));
            }
        }
    }
}
