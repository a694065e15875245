use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::coeff::GaussianRational;
use crate::error::{Error, Result};

/// `(n, r)`: the `τ₁`- and `τ₁₂`-exponents of a Jacobi coefficient, both
/// multiplied by the table's denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct JacobiKey {
    pub n: i64,
    pub r: i64,
}

impl JacobiKey {
    pub fn new(n: i64, r: i64) -> Self {
        JacobiKey { n, r }
    }

    /// `[[n, r/2], [r/2, m]]` is positive semi-definite.
    pub fn is_psd(&self, m: i64) -> bool {
        self.n >= 0 && m >= 0 && 4 * self.n * m - self.r * self.r >= 0
    }

    /// `(n + λr + λ²m, r + 2λm)`.
    pub fn translate(&self, m: i64, lambda: i64) -> JacobiKey {
        JacobiKey {
            n: self.n + lambda * self.r + lambda * lambda * m,
            r: self.r + 2 * lambda * m,
        }
    }
}

/// The Jacobi coefficient `φ_m(τ₁, τ₁₂) = Σ c(n, r)·e(nτ₁ + rτ₁₂)` of one
/// index, with all exponents scaled by `denominator`: the actual index is
/// `index / denominator`.
///
/// Coefficients are exact for every key with `n ≤ n_max`; keys beyond that
/// are unknown, absent keys below it are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiTable {
    index: i64,
    denominator: u32,
    weight: i64,
    n_max: i64,
    coeffs: BTreeMap<JacobiKey, GaussianRational>,
}

impl JacobiTable {
    pub fn new(index: i64, denominator: u32, weight: i64, n_max: i64) -> Result<Self> {
        if index < 0 {
            return Err(Error::InvalidArgument(format!("negative index {index}")));
        }
        if denominator == 0 {
            return Err(Error::ScalingMismatch(
                "denominator must be positive".into(),
            ));
        }
        Ok(JacobiTable {
            index,
            denominator,
            weight,
            n_max,
            coeffs: BTreeMap::new(),
        })
    }

    /// Sets `c(key)`. Keys outside the psd cone or above `n_max` are rejected.
    pub fn set(&mut self, key: JacobiKey, c: GaussianRational) -> Result<()> {
        if !key.is_psd(self.index) {
            return Err(Error::NotPositiveSemiDefinite);
        }
        if key.n > self.n_max {
            return Err(Error::InvalidArgument(format!(
                "n = {} exceeds the table bound {}",
                key.n, self.n_max
            )));
        }
        if c.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, c);
        }
        Ok(())
    }

    /// Inserts without the support checks, so that malformed tables can be
    /// handed to the validator.
    pub fn set_unchecked(&mut self, key: JacobiKey, c: GaussianRational) {
        if c.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, c);
        }
    }

    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn coeff(&self, key: &JacobiKey) -> GaussianRational {
        self.coeffs.get(key).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&JacobiKey, &GaussianRational)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EllipticViolation {
    pub key: JacobiKey,
    pub lambda: i64,
    pub image: JacobiKey,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct JacobiReport {
    pub index: i64,
    pub psd_violations: Vec<JacobiKey>,
    pub pairs_checked: usize,
    pub elliptic_violations: Vec<EllipticViolation>,
    pub passed: bool,
}

/// Integer `λ` (multiples of `step`, nonzero) with `n + λr + λ²m ≤ n_max`.
fn translations(key: &JacobiKey, m: i64, n_max: i64, step: i64) -> Vec<i64> {
    if m <= 0 {
        return Vec::new();
    }
    let disc = (key.r * key.r - 4 * m * (key.n - n_max)) as f64;
    if disc < 0.0 {
        return Vec::new();
    }
    let root = disc.sqrt();
    let lo = ((-(key.r as f64) - root) / (2.0 * m as f64)).floor() as i64 - 1;
    let hi = ((-(key.r as f64) + root) / (2.0 * m as f64)).ceil() as i64 + 1;
    (lo.div_euclid(step)..=hi.div_euclid(step) + 1)
        .map(|t| t * step)
        .filter(|&l| l != 0 && key.translate(m, l).n <= n_max)
        .collect()
}

/// Checks psd support and, for positive index, the elliptic invariance
/// `c(n, r) = c(n + λr + λ²m, r + 2λm)` for every `λ ∈ step·Z` keeping both
/// keys within `n ≤ n_max`.
///
/// `step = 1` is the full-level condition; theta products of level 2 satisfy
/// it for `step = 2`.
pub fn validate_jacobi(table: &JacobiTable, step: i64) -> Result<JacobiReport> {
    if step <= 0 {
        return Err(Error::InvalidArgument(format!(
            "lattice step {step} must be positive"
        )));
    }
    let m = table.index;
    let psd_violations: Vec<JacobiKey> = table
        .coeffs
        .keys()
        .filter(|k| !k.is_psd(m))
        .copied()
        .collect();
    let keys: Vec<&JacobiKey> = table
        .coeffs
        .keys()
        .filter(|k| k.is_psd(m) && k.n <= table.n_max)
        .collect();
    // every image of a support key is compared; the inverse translation
    // covers pairs whose nonzero side is the image
    let results: Vec<(usize, Vec<EllipticViolation>)> = keys
        .par_iter()
        .map(|key| {
            let c = table.coeff(key);
            let mut bad = Vec::new();
            let lambdas = translations(key, m, table.n_max, step);
            for &lambda in &lambdas {
                let image = key.translate(m, lambda);
                let found = table.coeff(&image);
                if found != c {
                    bad.push(EllipticViolation {
                        key: **key,
                        lambda,
                        image,
                        expected: c.to_string(),
                        found: found.to_string(),
                    });
                }
            }
            (lambdas.len(), bad)
        })
        .collect();
    let pairs_checked = results.iter().map(|r| r.0).sum();
    let elliptic_violations: Vec<EllipticViolation> =
        results.into_iter().flat_map(|r| r.1).collect();
    let passed = psd_violations.is_empty() && elliptic_violations.is_empty();
    Ok(JacobiReport {
        index: m,
        psd_violations,
        pairs_checked,
        elliptic_violations,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(k: i64) -> GaussianRational {
        GaussianRational::from_integer(k)
    }

    #[test]
    fn index_zero_needs_r_zero() {
        let mut t = JacobiTable::new(0, 1, 10, 5).unwrap();
        for n in 0..=5 {
            t.set(JacobiKey::new(n, 0), g(n + 1)).unwrap();
        }
        assert!(t.set(JacobiKey::new(2, 1), g(1)).is_err());
        let r = validate_jacobi(&t, 1).unwrap();
        assert!(r.passed);
        assert_eq!(r.pairs_checked, 0);
    }

    #[test]
    fn constructed_violation_has_witness() {
        let mut t = JacobiTable::new(1, 1, 10, 3).unwrap();
        t.set(JacobiKey::new(1, 2), g(5)).unwrap();
        t.set(JacobiKey::new(0, 0), g(4)).unwrap();
        let r = validate_jacobi(&t, 1).unwrap();
        assert!(!r.passed);
        assert!(r
            .elliptic_violations
            .iter()
            .any(|v| v.key == JacobiKey::new(1, 2)
                && v.lambda == -1
                && v.image == JacobiKey::new(0, 0)));
    }

    #[test]
    fn psd_violation_is_reported() {
        let mut t = JacobiTable::new(1, 1, 10, 3).unwrap();
        t.set_unchecked(JacobiKey::new(1, 3), g(1));
        let r = validate_jacobi(&t, 1).unwrap();
        assert_eq!(r.psd_violations, vec![JacobiKey::new(1, 3)]);
    }

    #[test]
    fn translations_stay_in_bound() {
        let key = JacobiKey::new(2, 1);
        for step in [1, 2] {
            let ls = translations(&key, 3, 20, step);
            assert!(!ls.is_empty());
            for l in &ls {
                assert_eq!(l % step, 0);
                assert!(key.translate(3, *l).n <= 20);
            }
            // nothing admissible is missed
            for l in -10..=10 {
                if l != 0 && l % step == 0 && key.translate(3, l).n <= 20 {
                    assert!(ls.contains(&l));
                }
            }
        }
    }
}
