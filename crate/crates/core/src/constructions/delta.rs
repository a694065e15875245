//! Comparison of `F_null⁸` in genus 1 with the discriminant `Δ`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::named::{construct_named, NamedForm};
use crate::arith::ExponentMatrix;
use crate::coeff::{format_rational, GaussianRational};
use crate::error::{Error, Result};
use crate::qseries::SiegelFourierSeries;

/// Coefficients of `q·∏_{m≥1}(1 − qᵐ)²⁴` for `q⁰ … q^{max_power}`.
pub fn delta_eta_product(max_power: usize) -> Vec<BigInt> {
    let len = max_power + 1;
    let mut poly = vec![BigInt::from(0); len];
    if len > 1 {
        poly[1] = BigInt::from(1);
    }
    for m in 1..len {
        for _ in 0..24 {
            // multiply in place by (1 − q^m), high degrees first
            for d in (m..len).rev() {
                let sub = poly[d - m].clone();
                poly[d] -= sub;
            }
        }
    }
    poly
}

/// `Δ` as a genus-1 series in exponent scale 8 (`qᵏ` sits at `E = [8k]`).
pub fn delta_series(bound: u64) -> SiegelFourierSeries {
    let coeffs = delta_eta_product((bound / 8) as usize);
    let mut s = SiegelFourierSeries::zero(1, BigRational::from_integer(12.into()), bound);
    for (k, c) in coeffs.into_iter().enumerate() {
        if c != BigInt::from(0) {
            let e = ExponentMatrix::diagonal(&[8 * k as i64]);
            s.add_term(
                e,
                &GaussianRational::from_rational(BigRational::from_integer(c)),
            )
            .expect("in bound");
        }
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaReport {
    pub trunc: u64,
    /// `c` with `F_null⁸ = c·Δ` on every key checked.
    pub constant: Option<String>,
    pub first_key: Option<ExponentMatrix>,
    /// `a(q²) / a(q¹)` of `F_null⁸`.
    pub ratio_q2_q1: Option<String>,
    pub keys_checked: usize,
    pub mismatches: Vec<ExponentMatrix>,
    pub passed: bool,
}

/// Determines the single constant `c` with `f = c·g` on all keys up to the
/// common truncation, if there is one. Returns the constant and the keys
/// where proportionality fails.
pub fn proportionality(
    f: &SiegelFourierSeries,
    g: &SiegelFourierSeries,
) -> (Option<GaussianRational>, Vec<ExponentMatrix>) {
    let trunc = f.trunc().min(g.trunc());
    let lead = g
        .iter()
        .find(|(e, _)| e.trace() as u64 <= trunc)
        .map(|(e, c)| (e.clone(), c.clone()));
    let Some((lead_key, lead_coeff)) = lead else {
        let bad: Vec<ExponentMatrix> = f
            .iter()
            .filter(|(e, _)| e.trace() as u64 <= trunc)
            .map(|(e, _)| e.clone())
            .collect();
        return (None, bad);
    };
    let c = f
        .coeff(&lead_key)
        .checked_div(&lead_coeff)
        .expect("nonzero leading coefficient");
    let mut keys: Vec<&ExponentMatrix> = f
        .iter()
        .map(|(e, _)| e)
        .chain(g.iter().map(|(e, _)| e))
        .collect();
    keys.sort();
    keys.dedup();
    let bad: Vec<ExponentMatrix> = keys
        .into_iter()
        .filter(|e| e.trace() as u64 <= trunc)
        .filter(|e| f.coeff(e) != &c * &g.coeff(e))
        .cloned()
        .collect();
    (Some(c), bad)
}

/// Computes `F_null⁸` in genus 1 through `bound` and checks it against the
/// eta-product expansion of `Δ`.
pub fn delta_compare(bound: u64) -> Result<DeltaReport> {
    if bound < 16 {
        return Err(Error::InvalidArgument(format!(
            "trunc {bound} below 16 leaves fewer than two q-coefficients"
        )));
    }
    let f = construct_named(&NamedForm::f_null(1), bound)?.pow(8);
    let delta = delta_series(bound);
    let (c, mismatches) = proportionality(&f, &delta);
    let first_key = f.iter().map(|(e, _)| e.clone()).min_by_key(|e| e.trace());
    let q1 = f.coeff(&ExponentMatrix::diagonal(&[8]));
    let q2 = f.coeff(&ExponentMatrix::diagonal(&[16]));
    let ratio = q2.checked_div(&q1).map(|r| r.to_string());
    let constant = c.as_ref().filter(|c| !c.is_zero());
    let passed = mismatches.is_empty() && constant.is_some_and(|c| c.is_real());
    Ok(DeltaReport {
        trunc: bound,
        constant: constant.map(|c| format_rational(&c.re)),
        first_key,
        ratio_q2_q1: ratio,
        keys_checked: (bound + 1) as usize,
        mismatches,
        passed,
    })
}
