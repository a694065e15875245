use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;

use super::jacobi::{JacobiKey, JacobiTable};
use crate::arith::{ExponentMatrix, UnimodularMatrix};
use crate::coeff::GaussianRational;
use crate::error::{Error, Result};
use crate::qseries::{check_gl_symmetry, SiegelFourierSeries, SymmetryReport};

/// Genus-2 Fourier coefficients `a(T)` keyed by `E = 8T`, exact for every
/// psd key with `tr(E) ≤ trunc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierTable {
    pub weight: i64,
    pub trunc: u64,
    coeffs: BTreeMap<ExponentMatrix, GaussianRational>,
}

impl FourierTable {
    pub fn new(weight: i64, trunc: u64) -> Self {
        FourierTable {
            weight,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_series(f: &SiegelFourierSeries) -> Result<Self> {
        if f.genus() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: f.genus(),
            });
        }
        let weight = integral_weight(f.weight())?;
        Ok(FourierTable {
            weight,
            trunc: f.trunc(),
            coeffs: f.iter().map(|(e, c)| (e.clone(), c.clone())).collect(),
        })
    }

    pub fn to_series(&self) -> Result<SiegelFourierSeries> {
        SiegelFourierSeries::from_terms(
            2,
            BigRational::from_integer(self.weight.into()),
            self.trunc,
            self.coeffs.iter().map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    pub fn set(&mut self, e: ExponentMatrix, c: GaussianRational) -> Result<()> {
        if e.size() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: e.size(),
            });
        }
        if !e.is_psd() {
            return Err(Error::NotPositiveSemiDefinite);
        }
        if e.trace() as u64 > self.trunc {
            return Err(Error::InvalidArgument(format!(
                "key {e} has trace above truncation {}",
                self.trunc
            )));
        }
        if c.is_zero() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, c);
        }
        Ok(())
    }

    pub fn coeff(&self, e: &ExponentMatrix) -> GaussianRational {
        self.coeffs.get(e).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ExponentMatrix, &GaussianRational)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

fn integral_weight(w: &BigRational) -> Result<i64> {
    if !w.is_integer() {
        return Err(Error::InvalidArgument(format!(
            "weight {w} is not integral"
        )));
    }
    i64::try_from(w.to_integer())
        .map_err(|_| Error::InvalidArgument(format!("weight {w} out of range")))
}

/// The Jacobi tables of every index `0, 1, …, M` of one genus-2 expansion
/// truncated at `tr(E) ≤ trunc`, with a common denominator `h ∈ {1, 2, 4, 8}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalFJSeries {
    weight: i64,
    denominator: u32,
    trunc: u64,
    tables: Vec<JacobiTable>,
}

impl FormalFJSeries {
    /// All-zero tables for every index with `8m/h ≤ trunc`.
    pub fn empty(weight: i64, denominator: u32, trunc: u64) -> Result<Self> {
        check_denominator(denominator)?;
        let h = denominator as i64;
        let max_index = h * trunc as i64 / 8;
        let tables = (0..=max_index)
            .map(|m| JacobiTable::new(m, denominator, weight, n_bound(h, trunc, m)))
            .collect::<Result<_>>()?;
        Ok(FormalFJSeries {
            weight,
            denominator,
            trunc,
            tables,
        })
    }

    /// Validated assembly from tables: weight, denominator and the bound
    /// `n_max` implied by `trunc` must agree, and indices must be distinct.
    pub fn from_tables(
        weight: i64,
        denominator: u32,
        trunc: u64,
        tables: Vec<JacobiTable>,
    ) -> Result<Self> {
        check_denominator(denominator)?;
        let h = denominator as i64;
        let mut seen = BTreeSet::new();
        for t in &tables {
            if t.denominator() != denominator || t.weight() != weight {
                return Err(Error::ScalingMismatch(format!(
                    "table of index {} has denominator {} and weight {}, series has {denominator} and {weight}",
                    t.index(),
                    t.denominator(),
                    t.weight()
                )));
            }
            if !seen.insert(t.index()) {
                return Err(Error::InvalidArgument(format!(
                    "index {} appears twice",
                    t.index()
                )));
            }
            if 8 * t.index() > h * trunc as i64 || t.n_max() != n_bound(h, trunc, t.index()) {
                return Err(Error::ScalingMismatch(format!(
                    "table of index {} does not match truncation {trunc}",
                    t.index()
                )));
            }
        }
        let mut tables = tables;
        tables.sort_by_key(|t| t.index());
        Ok(FormalFJSeries {
            weight,
            denominator,
            trunc,
            tables,
        })
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    pub fn trunc(&self) -> u64 {
        self.trunc
    }

    pub fn tables(&self) -> &[JacobiTable] {
        &self.tables
    }

    pub fn table(&self, index: i64) -> Option<&JacobiTable> {
        self.tables.iter().find(|t| t.index() == index)
    }

    pub fn tables_mut(&mut self) -> &mut [JacobiTable] {
        &mut self.tables
    }
}

fn check_denominator(h: u32) -> Result<()> {
    if h == 0 || 8 % h != 0 {
        return Err(Error::ScalingMismatch(format!(
            "denominator {h} must divide 8"
        )));
    }
    Ok(())
}

/// Largest scaled `n` of a key of index `m` with `tr(E) ≤ trunc`.
fn n_bound(h: i64, trunc: u64, m: i64) -> i64 {
    (h * trunc as i64 - 8 * m).div_euclid(8)
}

/// Smallest `h ∈ {1, 2, 4, 8}` putting every key on the scaled lattice.
fn minimal_denominator(keys: &[&ExponentMatrix]) -> u32 {
    [1u32, 2, 4, 8]
        .into_iter()
        .find(|&h| {
            let h = h as i64;
            keys.iter().all(|e| {
                (h * e.get(0, 0)) % 8 == 0
                    && (h * e.get(0, 1)) % 4 == 0
                    && (h * e.get(1, 1)) % 8 == 0
            })
        })
        .expect("h = 8 always fits")
}

/// Groups the coefficients of a genus-2 expansion by the bottom-right entry
/// of `E`: `c_m(n, r) = a([[n, r/2], [r/2, m]])` in scaled units.
pub fn fj_decompose(f: &SiegelFourierSeries) -> Result<FormalFJSeries> {
    if f.genus() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: f.genus(),
        });
    }
    let weight = integral_weight(f.weight())?;
    let keys: Vec<&ExponentMatrix> = f.iter().map(|(e, _)| e).collect();
    let h = minimal_denominator(&keys);
    let mut s = FormalFJSeries::empty(weight, h, f.trunc())?;
    let hi = h as i64;
    for (e, c) in f.iter() {
        let m = hi * e.get(1, 1) / 8;
        let key = JacobiKey::new(hi * e.get(0, 0) / 8, hi * e.get(0, 1) / 4);
        s.tables[m as usize].set(key, c.clone())?;
    }
    Ok(s)
}

/// Reassembles the Fourier table:
/// `a([[T₁, T₁₂], [T₁₂, T₂]]) = c_{T₂}(T₁, 2T₁₂)`.
pub fn assemble_formal_fourier(s: &FormalFJSeries) -> Result<FourierTable> {
    let h = s.denominator as i64;
    let mut out = FourierTable::new(s.weight, s.trunc);
    for t in &s.tables {
        for (key, c) in t.iter() {
            if (4 * key.r) % h != 0 {
                return Err(Error::ScalingMismatch(format!(
                    "r = {} of index {} is off the lattice for denominator {h}",
                    key.r,
                    t.index()
                )));
            }
            let e =
                ExponentMatrix::from_upper(2, &[8 * key.n / h, 4 * key.r / h, 8 * t.index() / h]);
            if out.coeffs.insert(e.clone(), c.clone()).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "key {e} received two contributions"
                )));
            }
            if !e.is_psd() || e.trace() as u64 > s.trunc {
                return Err(Error::InvalidArgument(format!(
                    "key {e} lies outside the truncated psd cone"
                )));
            }
        }
    }
    Ok(out)
}

/// `a(ᵗu·T·u) = det(u)^k·a(T)` for each generator on every in-bound pair.
pub fn check_symmetric(
    t: &FourierTable,
    k: i64,
    generators: &[UnimodularMatrix],
) -> Result<SymmetryReport> {
    let mut f = t.to_series()?;
    if !f.weight().is_zero() || k != 0 {
        f = f.with_weight(BigRational::from_integer(k.into()));
    }
    check_gl_symmetry(&f, k, generators)
}
