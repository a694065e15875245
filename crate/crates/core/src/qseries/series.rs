use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::ExponentMatrix;
use crate::coeff::GaussianRational;
use crate::error::{Error, Result};

/// Truncated Fourier expansion `Σ a(T)·e(tr Tτ)` keyed by `E = 8T`.
///
/// Every stored key is psd with `tr(E) ≤ trunc`; absent keys have
/// coefficient zero, and the expansion is exact for every key up to `trunc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiegelFourierSeries {
    genus: usize,
    weight: BigRational,
    trunc: u64,
    coeffs: BTreeMap<ExponentMatrix, GaussianRational>,
}

/// Products with fewer term pairs than this run on the calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 14;

impl SiegelFourierSeries {
    pub fn zero(genus: usize, weight: BigRational, trunc: u64) -> Self {
        SiegelFourierSeries {
            genus,
            weight,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant `c` as a weight-0 series.
    pub fn constant(genus: usize, c: GaussianRational, trunc: u64) -> Self {
        let mut s = Self::zero(genus, BigRational::zero(), trunc);
        if !c.is_zero() {
            s.coeffs.insert(ExponentMatrix::zero(genus), c);
        }
        s
    }

    pub fn one(genus: usize, trunc: u64) -> Self {
        Self::constant(genus, GaussianRational::one(), trunc)
    }

    /// Validated construction from `(key, coefficient)` pairs; repeated keys
    /// are rejected.
    pub fn from_terms(
        genus: usize,
        weight: BigRational,
        trunc: u64,
        terms: impl IntoIterator<Item = (ExponentMatrix, GaussianRational)>,
    ) -> Result<Self> {
        let mut s = Self::zero(genus, weight, trunc);
        for (e, c) in terms {
            s.check_key(&e)?;
            if s.coeffs.contains_key(&e) {
                return Err(Error::InvalidArgument(format!("duplicate key {e}")));
            }
            if !c.is_zero() {
                s.coeffs.insert(e, c);
            }
        }
        Ok(s)
    }

    fn check_key(&self, e: &ExponentMatrix) -> Result<()> {
        if e.size() != self.genus {
            return Err(Error::DimensionMismatch {
                expected: self.genus,
                got: e.size(),
            });
        }
        if !e.is_psd() {
            return Err(Error::NotPositiveSemiDefinite);
        }
        if e.trace() < 0 || e.trace() as u64 > self.trunc {
            return Err(Error::InvalidArgument(format!(
                "key {e} has trace above truncation {}",
                self.trunc
            )));
        }
        Ok(())
    }

    /// Adds `c` to the coefficient at `e`; the key must be psd and in bound.
    pub fn add_term(&mut self, e: ExponentMatrix, c: &GaussianRational) -> Result<()> {
        self.check_key(&e)?;
        self.add_term_unchecked(e, c);
        Ok(())
    }

    pub(crate) fn add_term_unchecked(&mut self, e: ExponentMatrix, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn set_coeff(&mut self, e: ExponentMatrix, c: GaussianRational) -> Result<()> {
        self.check_key(&e)?;
        if c.is_zero() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, c);
        }
        Ok(())
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn weight(&self) -> &BigRational {
        &self.weight
    }

    pub fn with_weight(mut self, weight: BigRational) -> Self {
        self.weight = weight;
        self
    }

    pub fn trunc(&self) -> u64 {
        self.trunc
    }

    pub fn coeff(&self, e: &ExponentMatrix) -> GaussianRational {
        self.coeffs.get(e).cloned().unwrap_or_default()
    }

    pub fn get(&self, e: &ExponentMatrix) -> Option<&GaussianRational> {
        self.coeffs.get(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ExponentMatrix, &GaussianRational)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest trace in the support; `trunc + 1` for the zero series.
    pub fn valuation(&self) -> u64 {
        self.coeffs
            .keys()
            .map(|e| e.trace() as u64)
            .min()
            .unwrap_or(self.trunc + 1)
    }

    /// Drops every key above `trunc` (which must not exceed the current one).
    pub fn truncate(&self, trunc: u64) -> Self {
        let trunc = trunc.min(self.trunc);
        SiegelFourierSeries {
            genus: self.genus,
            weight: self.weight.clone(),
            trunc,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| e.trace() as u64 <= trunc)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        SiegelFourierSeries {
            genus: self.genus,
            weight: self.weight.clone(),
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero(self.genus, self.weight.clone(), self.trunc);
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.coeffs {
            out.coeffs.insert(e.clone(), v * c);
        }
        out
    }

    fn check_genus(&self, other: &Self) -> Result<()> {
        if self.genus != other.genus {
            return Err(Error::DimensionMismatch {
                expected: self.genus,
                got: other.genus,
            });
        }
        Ok(())
    }

    /// Sum, truncated to the smaller bound. Weights must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_genus(other)?;
        if self.weight != other.weight {
            return Err(Error::InvalidArgument(format!(
                "cannot add series of weights {} and {}",
                self.weight, other.weight
            )));
        }
        let trunc = self.trunc.min(other.trunc);
        let mut out = self.truncate(trunc);
        for (e, c) in &other.coeffs {
            if e.trace() as u64 <= trunc {
                out.add_term_unchecked(e.clone(), c);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Product truncated at `min(trunc_f, trunc_g)`; weights add.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_genus(other)?;
        let trunc = self.trunc.min(other.trunc);
        Ok(self.convolve(other, trunc))
    }

    /// Product carrying the sharper bound `min(B_f + v_g, B_g + v_f)`, where
    /// `v` is the valuation (smallest support trace). Exact because psd keys
    /// have nonnegative trace and trace is additive.
    pub fn mul_graded(&self, other: &Self) -> Result<Self> {
        self.check_genus(other)?;
        let trunc = (self.trunc + other.valuation()).min(other.trunc + self.valuation());
        Ok(self.convolve(other, trunc))
    }

    fn convolve(&self, other: &Self, trunc: u64) -> Self {
        let weight = &self.weight + &other.weight;
        let mut right: Vec<(&ExponentMatrix, &GaussianRational, i64)> = other
            .coeffs
            .iter()
            .map(|(e, c)| (e, c, e.trace()))
            .collect();
        right.sort_by_key(|t| t.2);
        let left: Vec<(&ExponentMatrix, &GaussianRational, i64)> =
            self.coeffs.iter().map(|(e, c)| (e, c, e.trace())).collect();
        let trunc_i = trunc as i64;

        let accumulate = |chunk: &[(&ExponentMatrix, &GaussianRational, i64)]| {
            let mut acc: HashMap<ExponentMatrix, GaussianRational> = HashMap::new();
            for &(e1, c1, t1) in chunk {
                for &(e2, c2, t2) in &right {
                    if t1 + t2 > trunc_i {
                        break;
                    }
                    acc.entry(e1.add(e2)).or_default().add_product(c1, c2);
                }
            }
            acc
        };

        let partials: Vec<HashMap<ExponentMatrix, GaussianRational>> =
            if left.len() * right.len() < PARALLEL_THRESHOLD {
                vec![accumulate(&left)]
            } else {
                let chunk = (left.len() / (4 * rayon::current_num_threads()).max(1)).max(1);
                left.par_chunks(chunk).map(accumulate).collect()
            };
        let mut coeffs: BTreeMap<ExponentMatrix, GaussianRational> = BTreeMap::new();
        for part in partials {
            for (e, c) in part {
                match coeffs.entry(e) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += &c;
                    }
                }
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        SiegelFourierSeries {
            genus: self.genus,
            weight,
            trunc,
            coeffs,
        }
    }

    pub fn square(&self) -> Self {
        self.mul(self).expect("same genus")
    }

    /// `f^e` by repeated squaring under the min-truncation rule.
    pub fn pow(&self, e: u32) -> Self {
        self.pow_with(e, |a, b| a.mul(b).expect("same genus"))
    }

    /// `f^e` by repeated squaring with graded truncation.
    pub fn pow_graded(&self, e: u32) -> Self {
        self.pow_with(e, |a, b| a.mul_graded(b).expect("same genus"))
    }

    fn pow_with(&self, e: u32, mul: impl Fn(&Self, &Self) -> Self) -> Self {
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => mul(&r, &base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = mul(&base, &base);
            }
        }
        result.unwrap_or_else(|| Self::one(self.genus, self.trunc))
    }

    /// Siegel Φ operator: keeps keys with zero last row and column.
    pub fn phi(&self) -> Result<Self> {
        if self.genus == 0 {
            return Err(Error::InvalidArgument("Φ is undefined in genus 0".into()));
        }
        let mut out = Self::zero(self.genus - 1, self.weight.clone(), self.trunc);
        for (e, c) in &self.coeffs {
            if e.last_row_is_zero() {
                out.coeffs.insert(e.truncate_last(), c.clone());
            }
        }
        Ok(out)
    }

    /// Restriction to block-diagonal arguments `diag(τ₁, τ₂)` with
    /// `τ₁ ∈ H_{n₁}`: sums coefficients over the off-diagonal block.
    pub fn restrict_block(&self, n1: usize) -> Result<BlockRestriction> {
        if n1 == 0 || n1 >= self.genus {
            return Err(Error::InvalidArgument(format!(
                "block size {n1} must lie in 1..{}",
                self.genus
            )));
        }
        let mut out = Self::zero(self.genus, self.weight.clone(), self.trunc);
        for (e, c) in &self.coeffs {
            let (a, b) = e.diagonal_blocks(n1);
            out.add_term_unchecked(ExponentMatrix::block_diag(&a, &b), c);
        }
        Ok(BlockRestriction { n1, series: out })
    }

    /// Embeds a genus-`n` series as a function of the first (`first = true`)
    /// or last block of a genus `n + other_genus` argument.
    pub fn embed_block(&self, other_genus: usize, first: bool) -> Self {
        let zero_other = ExponentMatrix::zero(other_genus);
        let mut out = Self::zero(self.genus + other_genus, self.weight.clone(), self.trunc);
        for (e, c) in &self.coeffs {
            let key = if first {
                ExponentMatrix::block_diag(e, &zero_other)
            } else {
                ExponentMatrix::block_diag(&zero_other, e)
            };
            out.coeffs.insert(key, c.clone());
        }
        out
    }

    /// `f ⊗ g`, the function `(τ₁, τ₂) ↦ f(τ₁)·g(τ₂)` on block-diagonal
    /// arguments, with graded truncation.
    pub fn tensor(&self, other: &Self) -> BlockRestriction {
        let a = self.embed_block(other.genus, true);
        let b = other.embed_block(self.genus, false);
        BlockRestriction {
            n1: self.genus,
            series: a.mul_graded(&b).expect("same genus"),
        }
    }

    /// Applies `E ↦ ᵗu·E·u` to every key (trace bound unchanged only for
    /// trace-preserving `u`; callers truncate as needed).
    pub fn map_keys(
        &self,
        f: impl Fn(&ExponentMatrix) -> ExponentMatrix,
    ) -> BTreeMap<ExponentMatrix, GaussianRational> {
        self.coeffs.iter().map(|(e, c)| (f(e), c.clone())).collect()
    }

    /// Coefficientwise equality on every key with trace at most `trunc`.
    pub fn agrees_up_to(&self, other: &Self, trunc: u64) -> bool {
        let lhs = self
            .coeffs
            .iter()
            .filter(|(e, _)| e.trace() as u64 <= trunc);
        let rhs = other
            .coeffs
            .iter()
            .filter(|(e, _)| e.trace() as u64 <= trunc);
        lhs.eq(rhs)
    }

    /// First key (in trace, then key order) where the two series differ up
    /// to `trunc`.
    pub fn first_difference(&self, other: &Self, trunc: u64) -> Option<ExponentMatrix> {
        let mut keys: Vec<&ExponentMatrix> =
            self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.sort_by_key(|e| (e.trace(), (*e).clone()));
        keys.dedup();
        keys.into_iter()
            .filter(|e| e.trace() as u64 <= trunc)
            .find(|e| self.coeff(e) != other.coeff(e))
            .cloned()
    }
}

/// Coefficients of `f(diag(τ₁, τ₂))`, keyed by pairs of diagonal blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockRestriction {
    n1: usize,
    series: SiegelFourierSeries,
}

impl BlockRestriction {
    pub fn first_genus(&self) -> usize {
        self.n1
    }

    pub fn second_genus(&self) -> usize {
        self.series.genus - self.n1
    }

    /// Underlying series on block-diagonal keys of the full genus.
    pub fn series(&self) -> &SiegelFourierSeries {
        &self.series
    }

    pub fn trunc(&self) -> u64 {
        self.series.trunc
    }

    pub fn get(&self, e1: &ExponentMatrix, e2: &ExponentMatrix) -> GaussianRational {
        self.series.coeff(&ExponentMatrix::block_diag(e1, e2))
    }

    pub fn iter(
        &self,
    ) -> impl Iterator<Item = ((ExponentMatrix, ExponentMatrix), &GaussianRational)> + '_ {
        self.series
            .iter()
            .map(move |(e, c)| (e.diagonal_blocks(self.n1), c))
    }

    pub fn mul(&self, other: &BlockRestriction) -> Result<BlockRestriction> {
        if self.n1 != other.n1 {
            return Err(Error::DimensionMismatch {
                expected: self.n1,
                got: other.n1,
            });
        }
        Ok(BlockRestriction {
            n1: self.n1,
            series: self.series.mul(&other.series)?,
        })
    }

    pub fn mul_graded(&self, other: &BlockRestriction) -> Result<BlockRestriction> {
        if self.n1 != other.n1 {
            return Err(Error::DimensionMismatch {
                expected: self.n1,
                got: other.n1,
            });
        }
        Ok(BlockRestriction {
            n1: self.n1,
            series: self.series.mul_graded(&other.series)?,
        })
    }

    pub fn pow_graded(&self, e: u32) -> BlockRestriction {
        BlockRestriction {
            n1: self.n1,
            series: self.series.pow_graded(e),
        }
    }

    pub fn truncate(&self, trunc: u64) -> BlockRestriction {
        BlockRestriction {
            n1: self.n1,
            series: self.series.truncate(trunc),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rational;

    fn s1(terms: &[(i64, i64)], trunc: u64) -> SiegelFourierSeries {
        SiegelFourierSeries::from_terms(
            1,
            rational(0, 1),
            trunc,
            terms.iter().map(|&(e, c)| {
                (
                    ExponentMatrix::diagonal(&[e]),
                    GaussianRational::from_integer(c),
                )
            }),
        )
        .unwrap()
    }

    #[test]
    fn identity_and_negation() {
        let f = s1(&[(0, 1), (1, 2), (4, -3)], 8);
        assert_eq!(f.mul(&SiegelFourierSeries::one(1, 8)).unwrap(), f);
        assert!(f.add(&f.neg()).unwrap().is_zero());
    }

    #[test]
    fn trunc_bookkeeping() {
        let f = s1(&[(0, 1), (1, 1)], 8);
        let g = s1(&[(0, 1), (2, 1)], 5);
        let p = f.mul(&g).unwrap();
        assert_eq!(p.trunc(), 5);
        assert_eq!(
            p.coeff(&ExponentMatrix::diagonal(&[3])),
            GaussianRational::from_integer(1)
        );
    }

    #[test]
    fn graded_truncation_is_exact() {
        // q·(1 + q) known to q^4, times q^2 known to q^6: graded bound is min(4 + 2, 6 + 1) = 6
        let f = s1(&[(1, 1), (2, 1)], 4);
        let g = s1(&[(2, 1)], 6);
        let p = f.mul_graded(&g).unwrap();
        assert_eq!(p.trunc(), 6);
        assert_eq!(p.valuation(), 3);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn from_terms_validation() {
        let bad = ExponentMatrix::from_rows(&[vec![1, 2], vec![2, 1]]).unwrap();
        assert!(SiegelFourierSeries::from_terms(
            2,
            rational(0, 1),
            8,
            [(bad, GaussianRational::one())]
        )
        .is_err());
        let big = ExponentMatrix::diagonal(&[9]);
        assert!(SiegelFourierSeries::from_terms(
            1,
            rational(0, 1),
            8,
            [(big, GaussianRational::one())]
        )
        .is_err());
        let e = ExponentMatrix::diagonal(&[1]);
        let dup = [
            (e.clone(), GaussianRational::one()),
            (e, GaussianRational::one()),
        ];
        assert!(SiegelFourierSeries::from_terms(1, rational(0, 1), 8, dup).is_err());
    }

    #[test]
    fn genus_and_weight_mismatch() {
        let f = s1(&[(0, 1)], 4);
        let g = SiegelFourierSeries::one(2, 4);
        assert!(f.mul(&g).is_err());
        let h = f.clone().with_weight(rational(1, 2));
        assert!(f.add(&h).is_err());
    }

    #[test]
    fn phi_of_constant() {
        let one = SiegelFourierSeries::one(2, 8);
        assert_eq!(one.phi().unwrap(), SiegelFourierSeries::one(1, 8));
        let z = SiegelFourierSeries::one(0, 8);
        assert!(z.phi().is_err());
    }

    #[test]
    fn restriction_of_block_diagonal_support_is_reindexing() {
        let e = ExponentMatrix::from_rows(&[vec![1, 0], vec![0, 4]]).unwrap();
        let f = SiegelFourierSeries::from_terms(
            2,
            rational(0, 1),
            8,
            [(e.clone(), GaussianRational::from_integer(5))],
        )
        .unwrap();
        let r = f.restrict_block(1).unwrap();
        assert_eq!(r.series(), &f);
        assert_eq!(
            r.get(
                &ExponentMatrix::diagonal(&[1]),
                &ExponentMatrix::diagonal(&[4])
            ),
            GaussianRational::from_integer(5)
        );
    }

    #[test]
    fn pow_zero_is_one() {
        let f = s1(&[(1, 1)], 4);
        assert_eq!(f.pow(0), SiegelFourierSeries::one(1, 4));
        assert_eq!(
            f.pow(3).coeff(&ExponentMatrix::diagonal(&[3])),
            GaussianRational::one()
        );
    }
}
