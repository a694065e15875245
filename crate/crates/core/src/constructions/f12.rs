//! Restriction of `θ[E₁ × E₂]⁸` to the block-diagonal locus `H₁ × H₂`.

use rayon::prelude::*;
use serde::Serialize;

use super::delta::{delta_series, proportionality};
use super::named::{theta_set_power, theta_set_power_window, theta_valuation};
use crate::arith::ExponentMatrix;
use crate::chartheta::{all_characteristics, theta_qexp, CharacteristicSet, ThetaCharacteristic};
use crate::coeff::GaussianRational;
use crate::error::Result;
use crate::qseries::BlockRestriction;

#[derive(Clone, Debug, Serialize)]
pub struct F12Report {
    /// Absolute trace bound for the literal comparison.
    pub trunc: u64,
    /// Keys above the valuation covered by the window comparison.
    pub window: u64,
    /// Smallest exponent trace of `θ[E₁×E₂]⁸`.
    pub valuation: u64,
    /// Number of characteristics in `E₁ × E₂`.
    pub set_size: usize,
    /// Exponents of `θ[E₁]` and `θ[E₂]` in the restriction.
    pub exponents: (u32, u32),
    /// Literal check through `trunc`; vacuous when `trunc < valuation`.
    pub literal_equal: bool,
    pub literal_nonzero_keys: usize,
    /// `restrict(θ[E₁×E₂]⁸) = θ[E₁]⁸⁰ ⊗ θ[E₂]²⁴` on keys up to
    /// `valuation + window`.
    pub window_equal: bool,
    pub window_nonzero_keys: usize,
    /// `θ[E₁]⁸ = c₁·Δ`.
    pub delta_constant: Option<String>,
    /// `θ[E₂]² = c₂·χ₁₀`, with `χ₁₀` normalized to coefficient 1 at
    /// `E = [[8,4],[4,8]]`.
    pub chi10_constant: Option<String>,
    /// `restrict = C·Δ¹⁰ ⊗ χ₁₀¹²` on the window.
    pub product_constant: Option<String>,
    pub product_constant_consistent: bool,
    /// Characteristics `(m₁, m₂)` with odd `m₁` whose restriction did not
    /// vanish.
    pub odd_first_nonvanishing: Vec<String>,
    pub passed: bool,
}

fn count_multiplicities(set: &CharacteristicSet) -> (u32, u32) {
    // each m₁ ∈ E₁ appears |E₂| times and each m₂ ∈ E₂ appears |E₁| times
    let members = set.members();
    let m1 = members[0].split(1).0;
    let m2 = members[0].split(1).1;
    let c1 = members.iter().filter(|m| m.split(1).0 == m1).count() as u32;
    let c2 = members.iter().filter(|m| m.split(1).1 == m2).count() as u32;
    (8 * c1, 8 * c2)
}

/// Genus-3 `θ[m]⁸` restricted to `H₁ × H₂` on the window above its
/// valuation.
fn restricted_eighth_power(m: &ThetaCharacteristic, window: u64) -> BlockRestriction {
    let v = theta_valuation(m);
    theta_qexp(m, v + window)
        .restrict_block(1)
        .expect("genus 3")
        .pow_graded(8)
}

pub fn verify_f12_restriction(trunc: u64, window: u64) -> Result<F12Report> {
    let e1 = CharacteristicSet::even(1);
    let e2 = CharacteristicSet::even(2);
    let set = CharacteristicSet::product(&[e1.clone(), e2.clone()]);
    let (p1, p2) = count_multiplicities(&set);

    // literal comparison at absolute truncation
    let lhs = theta_set_power(&set, 8, trunc)?.restrict_block(1)?;
    let rhs = theta_set_power(&e1, p1, trunc)?
        .tensor(&theta_set_power(&e2, p2, trunc)?)
        .truncate(trunc);
    let literal_equal = lhs.series().agrees_up_to(rhs.series(), trunc);

    // window comparison, restricting each factor before multiplying
    let factors: Vec<BlockRestriction> = set
        .members()
        .par_iter()
        .map(|m| restricted_eighth_power(m, window))
        .collect();
    let lhs_w = factors
        .into_iter()
        .reduce(|a, b| a.mul_graded(&b).expect("same split"))
        .expect("nonempty set");
    let valuation = lhs_w.series().valuation();
    let top = valuation + window;
    let rhs_w =
        theta_set_power_window(&e1, p1, window)?.tensor(&theta_set_power_window(&e2, p2, window)?);
    let window_equal = lhs_w.trunc() == top && lhs_w.series().agrees_up_to(rhs_w.series(), top);

    // constants against Δ and the normalized χ₁₀
    let theta_e1_8 = theta_set_power_window(&e1, 8, window)?;
    let delta = delta_series(8 + window);
    let (c1, _) = proportionality(&theta_e1_8, &delta);
    let theta_e2_2 = theta_set_power_window(&e2, 2, window)?;
    let lead = ExponentMatrix::from_upper(2, &[8, 4, 8]);
    let c2 = theta_e2_2.coeff(&lead);
    let chi10 = theta_e2_2.scale(
        &GaussianRational::one()
            .checked_div(&c2)
            .expect("nonzero leading coefficient"),
    );
    let model = delta.pow_graded(p1 / 8).tensor(&chi10.pow_graded(p2 / 2));
    let (c, bad) = proportionality(lhs_w.series(), model.series());
    let product_ok = bad.is_empty();
    let expected_c = c1.as_ref().map(|c1| {
        let mut acc = GaussianRational::one();
        for _ in 0..p1 / 8 {
            acc = &acc * c1;
        }
        for _ in 0..p2 / 2 {
            acc = &acc * &c2;
        }
        acc
    });
    let product_constant_consistent = product_ok && c.is_some() && c == expected_c;

    // summands with odd first component restrict to zero
    let odd1 = ThetaCharacteristic::new(1, &[1], &[1])?;
    let odd_first_nonvanishing: Vec<String> = all_characteristics(2)
        .map(|m2| odd1.concat(&m2))
        .filter(|m| {
            let literal = theta_qexp(m, trunc)
                .pow(8)
                .restrict_block(1)
                .expect("genus 3");
            let windowed = theta_qexp(m, theta_valuation(m) + window)
                .restrict_block(1)
                .expect("genus 3");
            !(literal.series().is_zero() && windowed.series().is_zero())
        })
        .map(|m| m.to_string())
        .collect();

    let passed = literal_equal
        && window_equal
        && lhs_w.series().len() > 0
        && product_constant_consistent
        && odd_first_nonvanishing.is_empty()
        && set.len() == 30
        && (p1, p2) == (80, 24);
    Ok(F12Report {
        trunc,
        window,
        valuation,
        set_size: set.len(),
        exponents: (p1, p2),
        literal_equal,
        literal_nonzero_keys: lhs.series().len(),
        window_equal,
        window_nonzero_keys: lhs_w.series().len(),
        delta_constant: c1.map(|c| c.to_string()),
        chi10_constant: Some(c2.to_string()),
        product_constant: c.map(|c| c.to_string()),
        product_constant_consistent,
        odd_first_nonvanishing,
        passed,
    })
}
