//! Named forms built from theta constants and their exact expansions.

use std::fmt;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::chartheta::{theta_qexp, CharacteristicSet, ThetaCharacteristic};
use crate::coeff::{rational, GaussianRational};
use crate::error::{Error, Result};
use crate::qseries::SiegelFourierSeries;

/// Which construction a [`NamedForm`] denotes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormKind {
    /// `θ[E_n]`, the product of all even theta constants.
    FNull,
    /// `Σ_{m ∈ E_n} θ[E_n ∖ {m}]⁸`.
    F1,
    /// `2ⁿ Σ θ[m]¹⁶ − (Σ θ[m]⁸)²`.
    FT,
    /// The hyperelliptic form; its characteristic sets are not available.
    FH,
    /// `θ[S]^power`.
    ThetaSetPower { set: CharacteristicSet, power: u32 },
    /// `stabilizer · Σ_{S′ ∈ orbit(S)} θ[S′]⁸`.
    Pushforward { set: CharacteristicSet },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedForm {
    pub label: String,
    pub kind: FormKind,
    pub genus: usize,
    pub weight: BigRational,
}

/// Number of characteristics in the hyperelliptic construction for genus 4.
pub const HYPERELLIPTIC_SET_SIZE_GENUS_4: usize = 10;

fn even_count(n: usize) -> i64 {
    (1i64 << (n - 1)) * ((1i64 << n) + 1)
}

fn binomial(n: u64, k: u64) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

impl NamedForm {
    pub fn f_null(n: usize) -> Self {
        // |E_n| / 2 = 2^{n−2}(2ⁿ + 1)
        NamedForm {
            label: "F_null".into(),
            kind: FormKind::FNull,
            genus: n,
            weight: rational(even_count(n), 2),
        }
    }

    pub fn f1(n: usize) -> Self {
        let w = (1i64 << (n + 1)) * ((1i64 << n) + 1) - 4;
        NamedForm {
            label: "F_1".into(),
            kind: FormKind::F1,
            genus: n,
            weight: rational(w, 1),
        }
    }

    pub fn f_t(n: usize) -> Self {
        NamedForm {
            label: "F_T".into(),
            kind: FormKind::FT,
            genus: n,
            weight: rational(8, 1),
        }
    }

    /// Weight `2·binom(2n+2, n+1)`; only the metadata is available.
    pub fn f_h(n: usize) -> Self {
        let w = 2 * binomial(2 * n as u64 + 2, n as u64 + 1);
        NamedForm {
            label: "F_H".into(),
            kind: FormKind::FH,
            genus: n,
            weight: rational(w, 1),
        }
    }

    pub fn theta_set_power(set: CharacteristicSet, power: u32) -> Self {
        let genus = set.genus();
        let weight = rational(set.len() as i64 * power as i64, 2);
        NamedForm {
            label: format!("theta_set^{power}"),
            kind: FormKind::ThetaSetPower { set, power },
            genus,
            weight,
        }
    }

    /// Orbit-sum pushforward of `θ[S]⁸`, weight `4|S|`.
    pub fn pushforward(label: &str, set: CharacteristicSet) -> Self {
        let genus = set.genus();
        let weight = rational(4 * set.len() as i64, 1);
        NamedForm {
            label: label.into(),
            kind: FormKind::Pushforward { set },
            genus,
            weight,
        }
    }

    /// Pushforward of `θ[E_{n₁} × E_{n₂} × …]⁸`, with `E*` for factors
    /// listed in `starred`.
    pub fn block_pushforward(blocks: &[usize], starred: &[bool]) -> Self {
        let parts: Vec<CharacteristicSet> = blocks
            .iter()
            .zip(starred.iter().chain(std::iter::repeat(&false)))
            .map(|(&b, &s)| {
                if s {
                    CharacteristicSet::even_nonzero(b)
                } else {
                    CharacteristicSet::even(b)
                }
            })
            .collect();
        let mut label = format!(
            "F_{{{}}}",
            blocks
                .iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        if starred.iter().any(|&s| s) {
            label.push('*');
        }
        Self::pushforward(&label, CharacteristicSet::product(&parts))
    }

    /// Recognizes `F_null`, `F_1`, `F_T`, `F_H` and block pushforwards such
    /// as `F_{1,2}`, `F12`, `F13*` (the digits are the block sizes).
    pub fn parse(name: &str, n: usize) -> Result<Self> {
        let key: String = name
            .chars()
            .filter(|c| !matches!(c, '_' | '{' | '}' | ',' | ' '))
            .collect();
        let key = key.to_ascii_lowercase();
        let form = match key.as_str() {
            "fnull" => Self::f_null(n),
            "f1" => Self::f1(n),
            "ft" => Self::f_t(n),
            "fh" => Self::f_h(n),
            _ => {
                let body = key
                    .strip_prefix('f')
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown form name {name}")))?;
                let (digits, starred) = match body.strip_suffix('*') {
                    Some(d) => (d, true),
                    None => (body, false),
                };
                if digits.len() < 2 || !digits.chars().all(|c| c.is_ascii_digit() && c != '0') {
                    return Err(Error::InvalidArgument(format!("unknown form name {name}")));
                }
                let blocks: Vec<usize> =
                    digits.chars().map(|c| c as usize - '0' as usize).collect();
                let mut stars = vec![false; blocks.len()];
                if starred {
                    *stars.last_mut().expect("nonempty") = true;
                }
                let f = Self::block_pushforward(&blocks, &stars);
                if f.genus != n {
                    return Err(Error::InvalidArgument(format!(
                        "{name} lives in genus {}, not {n}",
                        f.genus
                    )));
                }
                f
            }
        };
        if form.genus == 0 || form.genus > crate::chartheta::MAX_GENUS {
            return Err(Error::InvalidArgument(format!(
                "genus {} unsupported",
                form.genus
            )));
        }
        Ok(form)
    }

    /// The characteristic set whose product defines the form, where one
    /// exists.
    pub fn defining_set(&self) -> Option<CharacteristicSet> {
        match &self.kind {
            FormKind::FNull => Some(CharacteristicSet::even(self.genus)),
            FormKind::ThetaSetPower { set, .. } | FormKind::Pushforward { set } => {
                Some(set.clone())
            }
            _ => None,
        }
    }
}

impl fmt::Display for NamedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (genus {}, weight {})",
            self.label, self.genus, self.weight
        )
    }
}

/// Upper estimate of the number of integer symmetric `n×n` matrices with
/// nonnegative diagonal, trace at most `bound` and `|e_ij|² ≤ e_ii e_jj`.
pub fn estimate_key_count(n: usize, bound: u64) -> f64 {
    fn rec(i: usize, n: usize, left: u64, diag: &mut Vec<u64>) -> f64 {
        if i == n {
            let mut prod = 1.0;
            for a in 0..n {
                for b in a + 1..n {
                    prod *= 2.0 * ((diag[a] * diag[b]) as f64).sqrt().floor() + 1.0;
                }
            }
            return prod;
        }
        let mut total = 0.0;
        for d in 0..=left {
            diag.push(d);
            total += rec(i + 1, n, left - d, diag);
            diag.pop();
        }
        total
    }
    rec(0, n, bound, &mut Vec::new())
}

/// Largest key-count estimate accepted by [`construct_named`].
pub const KEY_COUNT_LIMIT: f64 = 2.0e7;

#[derive(Clone, Debug, Serialize)]
pub struct CostEstimate {
    pub keys: f64,
    pub factors: usize,
}

fn feasibility(form: &NamedForm, bound: u64) -> Result<CostEstimate> {
    let n = form.genus;
    let (max_genus, factors) = match &form.kind {
        FormKind::FNull => (3, even_count(n) as usize),
        FormKind::F1 => (3, 3 * even_count(n) as usize),
        FormKind::FT => (4, even_count(n) as usize),
        FormKind::ThetaSetPower { set, .. } => (4, set.len()),
        FormKind::FH => {
            return Err(Error::RequiresExternalData(format!(
                "F_H needs the {HYPERELLIPTIC_SET_SIZE_GENUS_4} characteristic sets of the hyperelliptic construction, which are not bundled"
            )))
        }
        FormKind::Pushforward { .. } => {
            return Err(Error::Infeasible(format!(
                "{}: orbit-sum expansions are only evaluated numerically",
                form.label
            )))
        }
    };
    let keys = estimate_key_count(n, bound);
    let est = CostEstimate { keys, factors };
    if n > max_genus || keys > KEY_COUNT_LIMIT {
        return Err(Error::Infeasible(format!(
            "{} at genus {n}, trunc {bound}: about {keys:.2e} coefficient keys over {factors} factor products (limit genus {max_genus}, {KEY_COUNT_LIMIT:.0e} keys)",
            form.label
        )));
    }
    Ok(est)
}

/// Exact expansion of a named form through trace `bound`.
pub fn construct_named(form: &NamedForm, bound: u64) -> Result<SiegelFourierSeries> {
    feasibility(form, bound)?;
    let n = form.genus;
    let series = match &form.kind {
        FormKind::FNull => theta_set_power(&CharacteristicSet::even(n), 1, bound)?,
        FormKind::F1 => f1_expansion(n, bound),
        FormKind::FT => ft_expansion(n, bound),
        FormKind::ThetaSetPower { set, power } => theta_set_power(set, *power, bound)?,
        FormKind::FH | FormKind::Pushforward { .. } => unreachable!("rejected by feasibility"),
    };
    debug_assert_eq!(series.weight(), &form.weight);
    Ok(series)
}

/// Balanced product tree; exact arithmetic makes the order irrelevant.
pub fn product_of(
    genus: usize,
    bound: u64,
    factors: Vec<SiegelFourierSeries>,
) -> SiegelFourierSeries {
    factors
        .into_par_iter()
        .reduce_with(|a, b| a.mul(&b).expect("same genus"))
        .unwrap_or_else(|| SiegelFourierSeries::one(genus, bound))
}

/// Graded-truncation product tree.
pub fn graded_product_of(
    genus: usize,
    bound: u64,
    factors: Vec<SiegelFourierSeries>,
) -> SiegelFourierSeries {
    factors
        .into_par_iter()
        .reduce_with(|a, b| a.mul_graded(&b).expect("same genus"))
        .unwrap_or_else(|| SiegelFourierSeries::one(genus, bound))
}

/// `θ[S]^power` through trace `bound`.
pub fn theta_set_power(
    set: &CharacteristicSet,
    power: u32,
    bound: u64,
) -> Result<SiegelFourierSeries> {
    if !set.all_even() {
        return Err(Error::OddCharacteristic);
    }
    let n = set.genus();
    let members = set.members();
    let base: Vec<SiegelFourierSeries> = members.par_iter().map(|m| theta_qexp(m, bound)).collect();
    let prod = product_of(n, bound, base);
    Ok(prod.pow(power))
}

/// Smallest exponent trace of `θ[m]`: the Hamming weight of `a`.
pub fn theta_valuation(m: &ThetaCharacteristic) -> u64 {
    m.a_bits().count_ones() as u64
}

/// `θ[S]^power` on the window of keys with trace at most
/// `valuation + window`, computed with graded truncation so the high
/// valuation does not force a huge absolute bound.
pub fn theta_set_power_window(
    set: &CharacteristicSet,
    power: u32,
    window: u64,
) -> Result<SiegelFourierSeries> {
    if !set.all_even() {
        return Err(Error::OddCharacteristic);
    }
    let n = set.genus();
    let factors: Vec<SiegelFourierSeries> = set
        .members()
        .par_iter()
        .map(|m| theta_qexp(m, theta_valuation(m) + window))
        .map(|t| t.pow_graded(power))
        .collect();
    Ok(graded_product_of(n, window, factors))
}

fn eighth_powers(n: usize, bound: u64) -> Vec<SiegelFourierSeries> {
    let evens = crate::chartheta::even_characteristics(n);
    evens
        .par_iter()
        .map(|m| theta_qexp(m, bound).pow(8))
        .collect()
}

/// `Σ_m ∏_{m′ ≠ m} θ[m′]⁸` from prefix and suffix products, without series
/// division.
fn f1_expansion(n: usize, bound: u64) -> SiegelFourierSeries {
    let f = eighth_powers(n, bound);
    let k = f.len();
    let one = SiegelFourierSeries::one(n, bound);
    let mut prefix = Vec::with_capacity(k + 1);
    prefix.push(one.clone());
    for fi in &f {
        let next = prefix
            .last()
            .expect("nonempty")
            .mul(fi)
            .expect("same genus");
        prefix.push(next);
    }
    let mut suffix = vec![one; k + 1];
    for i in (0..k).rev() {
        suffix[i] = f[i].mul(&suffix[i + 1]).expect("same genus");
    }
    let terms: Vec<SiegelFourierSeries> = (0..k)
        .into_par_iter()
        .map(|i| prefix[i].mul(&suffix[i + 1]).expect("same genus"))
        .collect();
    let weight = terms[0].weight().clone();
    terms
        .into_iter()
        .fold(SiegelFourierSeries::zero(n, weight, bound), |acc, t| {
            acc.add(&t).expect("same weight")
        })
}

/// `2ⁿ Σ θ[m]¹⁶ − (Σ θ[m]⁸)²`.
fn ft_expansion(n: usize, bound: u64) -> SiegelFourierSeries {
    let f8 = eighth_powers(n, bound);
    let weight4 = rational(4, 1);
    let zero4 = SiegelFourierSeries::zero(n, weight4, bound);
    let s8 = f8
        .iter()
        .fold(zero4, |acc, t| acc.add(t).expect("same weight"));
    let squares: Vec<SiegelFourierSeries> = f8.par_iter().map(|t| t.square()).collect();
    let zero8 = SiegelFourierSeries::zero(n, rational(8, 1), bound);
    let s16 = squares
        .iter()
        .fold(zero8, |acc, t| acc.add(t).expect("same weight"));
    let scaled = s16.scale(&GaussianRational::from_integer(1i64 << n));
    scaled.sub(&s8.square()).expect("same weight")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ExponentMatrix;
    use crate::qseries::is_cusp_qexp;

    #[test]
    fn closed_form_weights() {
        assert_eq!(NamedForm::f_null(3).weight, rational(18, 1));
        assert_eq!(NamedForm::f1(3).weight, rational(140, 1));
        assert_eq!(NamedForm::f_t(4).weight, rational(8, 1));
        assert_eq!(NamedForm::f_h(4).weight, rational(504, 1));
        for n in 1..=4 {
            let s = CharacteristicSet::even(n);
            assert_eq!(
                NamedForm::theta_set_power(s, 1).weight,
                NamedForm::f_null(n).weight
            );
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!(
            NamedForm::parse("F_{1,2}", 3).unwrap().weight,
            rational(120, 1)
        );
        assert_eq!(
            NamedForm::parse("F111", 3).unwrap().weight,
            rational(108, 1)
        );
        let weights: Vec<i64> = ["F13", "F13*", "F112", "F1111", "F22"]
            .iter()
            .map(|s| {
                let w = NamedForm::parse(s, 4).unwrap().weight;
                w.to_integer().try_into().unwrap()
            })
            .collect();
        assert_eq!(weights, vec![432, 420, 360, 324, 400]);
        assert!(NamedForm::parse("F12", 4).is_err());
        assert!(NamedForm::parse("G", 2).is_err());
    }

    #[test]
    fn infeasible_and_external() {
        assert!(matches!(
            construct_named(&NamedForm::f_null(4), 4),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            construct_named(&NamedForm::f_h(4), 4),
            Err(Error::RequiresExternalData(_))
        ));
        assert!(matches!(
            construct_named(&NamedForm::parse("F12", 3).unwrap(), 4),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            construct_named(&NamedForm::f_t(2), 10_000),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn f_null_genus_two_is_cuspidal_and_weight_five() {
        let f = construct_named(&NamedForm::f_null(2), 16).unwrap();
        assert_eq!(f.weight(), &rational(5, 1));
        assert!(is_cusp_qexp(&f).unwrap());
    }

    #[test]
    fn f1_matches_direct_sum() {
        let n = 1;
        let b = 24;
        let fast = construct_named(&NamedForm::f1(n), b).unwrap();
        let evens = crate::chartheta::even_characteristics(n);
        let mut direct = SiegelFourierSeries::zero(n, rational(8, 1), b);
        for skip in &evens {
            let rest =
                CharacteristicSet::from_members(n, evens.iter().copied().filter(|m| m != skip))
                    .unwrap();
            direct = direct.add(&theta_set_power(&rest, 8, b).unwrap()).unwrap();
        }
        assert_eq!(fast, direct);
    }

    #[test]
    fn window_product_agrees_with_absolute_product() {
        let s = CharacteristicSet::even(2);
        let full = theta_set_power(&s, 2, 24).unwrap();
        let win = theta_set_power_window(&s, 2, 8).unwrap();
        assert_eq!(win.trunc(), 24);
        assert_eq!(win, full);
        assert_eq!(full.valuation(), 16);
        let key = ExponentMatrix::from_upper(2, &[8, 4, 8]);
        assert!(!full.coeff(&key).is_zero());
    }

    #[test]
    fn genus_one_ft_vanishes() {
        // the Schottky relation is trivial in genus 1 and 2
        for n in 1..=2 {
            assert!(construct_named(&NamedForm::f_t(n), 16).unwrap().is_zero());
        }
    }
}
