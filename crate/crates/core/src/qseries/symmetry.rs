//! The unimodular symmetry `a(ᵗu·T·u) = det(u)^k · a(T)` of Fourier
//! coefficients.

use serde::Serialize;

use super::SiegelFourierSeries;
use crate::arith::{enumerate_psd_exponents, reduce_gl2, ExponentMatrix, UnimodularMatrix};
use crate::coeff::GaussianRational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryViolation {
    /// Index into the generator list, or `None` for canonical-reduction mode.
    pub generator: Option<usize>,
    pub key: ExponentMatrix,
    pub image: ExponentMatrix,
    /// `det(u)^k · a(key)`.
    pub expected: String,
    /// `a(image)`.
    pub found: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub pairs_checked: usize,
    pub violations: Vec<SymmetryViolation>,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The default generators of `GL₂(Z)`: `[[1,1],[0,1]]`, the swap and
/// `diag(−1, 1)`.
pub fn default_gl2_generators() -> Vec<UnimodularMatrix> {
    [
        vec![vec![1, 1], vec![0, 1]],
        vec![vec![0, 1], vec![1, 0]],
        vec![vec![-1, 0], vec![0, 1]],
    ]
    .iter()
    .map(|r| UnimodularMatrix::from_rows(r).expect("unimodular"))
    .collect()
}

/// `GL_n(Z)` generators for any `n`: adjacent transpositions, one elementary
/// shear and one sign change.
pub fn default_gl_generators(n: usize) -> Vec<UnimodularMatrix> {
    if n == 2 {
        return default_gl2_generators();
    }
    let mut gens = Vec::new();
    let build = |f: &dyn Fn(usize, usize) -> i64| {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        UnimodularMatrix::from_rows(&rows).expect("unimodular")
    };
    if n >= 2 {
        gens.push(build(&|i, j| i64::from(i == j || (i == 0 && j == 1))));
        for k in 0..n - 1 {
            gens.push(build(&|i, j| {
                let target = if i == k {
                    k + 1
                } else if i == k + 1 {
                    k
                } else {
                    i
                };
                i64::from(j == target)
            }));
        }
    }
    gens.push(build(&|i, j| {
        if i != j {
            0
        } else if i == 0 {
            -1
        } else {
            1
        }
    }));
    gens
}

fn sign(det: i64, k: i64) -> GaussianRational {
    if det == 1 || k.rem_euclid(2) == 0 {
        GaussianRational::one()
    } else {
        GaussianRational::from_integer(-1)
    }
}

/// Checks the symmetry for every generator `u` and every key `E` with both
/// `E` and `ᵗu·E·u` within the truncation. Pairs with both coefficients
/// zero are skipped, so every support key is examined in both directions.
pub fn check_gl_symmetry(
    f: &SiegelFourierSeries,
    k: i64,
    generators: &[UnimodularMatrix],
) -> Result<SymmetryReport> {
    let n = f.genus();
    let trunc = f.trunc() as i64;
    let mut report = SymmetryReport::default();
    for (gi, u) in generators.iter().enumerate() {
        if u.size() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: u.size(),
            });
        }
        let u_inv = u.inverse();
        let s = sign(u.det(), k);
        let mut pairs: Vec<(ExponentMatrix, ExponentMatrix)> = Vec::new();
        for (e, _) in f.iter() {
            let img = e.transform(u);
            if img.trace() <= trunc {
                pairs.push((e.clone(), img));
            }
            let pre = e.transform(&u_inv);
            if pre.trace() <= trunc && f.get(&pre).is_none() {
                pairs.push((pre, e.clone()));
            }
        }
        pairs.sort();
        pairs.dedup();
        for (e, img) in pairs {
            report.pairs_checked += 1;
            let expected = &s * &f.coeff(&e);
            let found = f.coeff(&img);
            if expected != found {
                report.violations.push(SymmetryViolation {
                    generator: Some(gi),
                    key: e,
                    image: img,
                    expected: expected.to_string(),
                    found: found.to_string(),
                });
            }
        }
    }
    Ok(report)
}

/// Unimodular `u` with `det(u) = −1` and `ᵗu·R·u = R`, if one exists.
pub fn odd_stabilizer_gl2(r: &ExponentMatrix) -> Option<UnimodularMatrix> {
    // stabilizers of GL₂-reduced forms have entries in {−1, 0, 1}
    let range = [-1i64, 0, 1];
    for p in range {
        for q in range {
            for s in range {
                for t in range {
                    if p * t - q * s != -1 {
                        continue;
                    }
                    let u = UnimodularMatrix::from_rows(&[vec![p, q], vec![s, t]]).expect("det −1");
                    if &r.transform(&u) == r {
                        return Some(u);
                    }
                }
            }
        }
    }
    None
}

/// Full-orbit check in genus 2: every psd key `E` with `tr(E) ≤ trunc` is
/// compared with its reduced representative `R = ᵗu·E·u`
/// (`a(E) = det(u)^k·a(R)`), and for odd `k` coefficients at forms with an
/// orientation-reversing stabilizer must vanish.
pub fn check_gl2_symmetry_full(f: &SiegelFourierSeries, k: i64) -> Result<SymmetryReport> {
    if f.genus() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: f.genus(),
        });
    }
    let mut report = SymmetryReport::default();
    let odd = k.rem_euclid(2) == 1;
    for e in enumerate_psd_exponents(2, f.trunc()) {
        let (r, u) = reduce_gl2(&e)?;
        report.pairs_checked += 1;
        let expected = &sign(u.det(), k) * &f.coeff(&r);
        let found = f.coeff(&e);
        if expected != found {
            report.violations.push(SymmetryViolation {
                generator: None,
                key: r.clone(),
                image: e.clone(),
                expected: expected.to_string(),
                found: found.to_string(),
            });
        }
        if odd && e == r && !found.is_zero() && odd_stabilizer_gl2(&r).is_some() {
            report.violations.push(SymmetryViolation {
                generator: None,
                key: r.clone(),
                image: r,
                expected: "0".into(),
                found: found.to_string(),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartheta::{theta_qexp, ThetaCharacteristic};
    use crate::coeff::rational;

    #[test]
    fn zero_series_passes() {
        let z = SiegelFourierSeries::zero(2, rational(4, 1), 16);
        assert!(check_gl_symmetry(&z, 4, &default_gl2_generators())
            .unwrap()
            .passed());
        assert!(check_gl2_symmetry_full(&z, 4).unwrap().passed());
    }

    #[test]
    fn genus_one_eighth_power_is_even() {
        let t = theta_qexp(&ThetaCharacteristic::new(1, &[0], &[0]).unwrap(), 24).pow(8);
        let u = UnimodularMatrix::from_rows(&[vec![-1]]).unwrap();
        assert!(check_gl_symmetry(&t, 4, &[u]).unwrap().passed());
    }

    fn level_one_genus_two() -> SiegelFourierSeries {
        // Σ over all ten even θ⁸ is a GL₂(Z)-symmetric weight-4 series
        let mut acc: Option<SiegelFourierSeries> = None;
        for m in crate::chartheta::even_characteristics(2) {
            let t = theta_qexp(&m, 24).pow(8);
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t).unwrap(),
            });
        }
        acc.unwrap()
    }

    #[test]
    fn perturbation_is_caught_with_witness() {
        let f = level_one_genus_two();
        assert!(check_gl_symmetry(&f, 4, &default_gl2_generators())
            .unwrap()
            .passed());
        assert!(check_gl2_symmetry_full(&f, 4).unwrap().passed());
        let key = ExponentMatrix::from_upper(2, &[8, 4, 8]);
        let mut g = f.clone();
        g.add_term(key.clone(), &GaussianRational::one()).unwrap();
        let rep = check_gl_symmetry(&g, 4, &default_gl2_generators()).unwrap();
        assert!(!rep.passed());
        assert!(rep
            .violations
            .iter()
            .all(|v| v.key == key || v.image == key));
        let rep = check_gl2_symmetry_full(&g, 4).unwrap();
        assert!(rep
            .violations
            .iter()
            .any(|v| v.key == key || v.image == key));
    }

    #[test]
    fn odd_weight_forces_zero_at_symmetric_forms() {
        let mut f = SiegelFourierSeries::zero(2, rational(5, 1), 16);
        f.add_term(
            ExponentMatrix::from_upper(2, &[4, 0, 8]),
            &GaussianRational::one(),
        )
        .unwrap();
        let rep = check_gl2_symmetry_full(&f, 5).unwrap();
        assert!(!rep.passed());
        assert!(odd_stabilizer_gl2(&ExponentMatrix::from_upper(2, &[4, 1, 6])).is_none());
    }

    #[test]
    fn default_generators_are_unimodular() {
        for n in 1..=4 {
            let g = default_gl_generators(n);
            assert!(g.iter().all(|u| u.size() == n && u.det().abs() == 1));
        }
    }
}
