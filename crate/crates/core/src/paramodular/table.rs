//! Fourier tables on the paramodular index lattice and the coefficient
//! symmetries under `μ_N` and `Γ₀(N)*`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::group::{
    exact_divisors, is_exact_divisor, is_squarefree, make_atkin_lehner, prime_divisors,
    ScaledSymplectic,
};
use crate::arith::ExponentMatrix;
use crate::coeff::GaussianRational;
use crate::error::{Error, Result};
use crate::formal_fj::FourierTable;

/// Genus-2 coefficients `a(T)` keyed by `E = 8T`, supported on half-integral
/// psd `T` with `N | T₂`: `E₁₁ ∈ 8Z`, `E₁₂ ∈ 4Z`, `E₂₂ ∈ 8NZ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamodularTable {
    level: u64,
    pub weight: i64,
    pub trunc: u64,
    coeffs: BTreeMap<ExponentMatrix, GaussianRational>,
}

/// Lattice membership of a key for level `N`.
pub fn in_index_lattice(e: &ExponentMatrix, level: u64) -> bool {
    let n = level as i64;
    e.size() == 2 && e.get(0, 0) % 8 == 0 && e.get(0, 1) % 4 == 0 && e.get(1, 1) % (8 * n) == 0
}

impl ParamodularTable {
    pub fn new(level: u64, weight: i64, trunc: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        Ok(ParamodularTable {
            level,
            weight,
            trunc,
            coeffs: BTreeMap::new(),
        })
    }

    /// Keeps the lattice keys of a genus-2 table, rejecting any nonzero
    /// coefficient off the lattice.
    pub fn from_fourier(t: &FourierTable, level: u64) -> Result<Self> {
        let mut out = Self::new(level, t.weight, t.trunc)?;
        for (e, c) in t.iter() {
            out.set(e.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn set(&mut self, e: ExponentMatrix, c: GaussianRational) -> Result<()> {
        if !in_index_lattice(&e, self.level) {
            return Err(Error::LatticeViolation(e.to_string()));
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

    pub fn level(&self) -> u64 {
        self.level
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

    fn in_bound(&self, e: &ExponentMatrix) -> bool {
        e.trace() as u64 <= self.trunc
    }
}

/// `(T₁, T₁₂, T₂) ↦ (T₂/N, −T₁₂, N·T₁)`.
pub fn mu_index_action(e: &ExponentMatrix, level: u64) -> Result<ExponentMatrix> {
    if !in_index_lattice(e, level) {
        return Err(Error::LatticeViolation(e.to_string()));
    }
    let n = level as i64;
    Ok(ExponentMatrix::from_upper(
        2,
        &[e.get(1, 1) / n, -e.get(0, 1), n * e.get(0, 0)],
    ))
}

/// Re-indexing `T ↦ ᵗA·T·A/d` of Fourier keys under a block-diagonal
/// `V = diag(A, D)/√d`, which sends `τ` to `A·τ·ᵗA/d`. An index-map utility
/// only: the compatibility of tables transported this way is not checked.
pub fn block_index_map(v: &ScaledSymplectic, e: &ExponentMatrix) -> Result<ExponentMatrix> {
    let m = v.matrix();
    let off_block =
        (0..2).any(|i| (2..4).any(|j| !m.get(i, j).is_zero() || !m.get(j, i).is_zero()));
    if off_block || e.size() != 2 {
        return Err(Error::InvalidArgument(
            "block index map needs a block-diagonal genus-2 element".into(),
        ));
    }
    let d = BigRational::from_integer(BigInt::from(v.scale()));
    let mut out = [
        BigRational::zero(),
        BigRational::zero(),
        BigRational::zero(),
    ];
    for (slot, (i, j)) in [(0, 0), (0, 1), (1, 1)].into_iter().enumerate() {
        let mut acc = BigRational::zero();
        for k in 0..2 {
            for l in 0..2 {
                acc += m.get(k, i)
                    * BigRational::from_integer(BigInt::from(e.get(k, l)))
                    * m.get(l, j);
            }
        }
        out[slot] = acc / &d;
    }
    let ints: Option<Vec<i64>> = out
        .iter()
        .map(|x| {
            x.is_integer()
                .then(|| x.to_integer())
                .and_then(|x| i64::try_from(x).ok())
        })
        .collect();
    let ints = ints.ok_or_else(|| Error::LatticeViolation(e.to_string()))?;
    Ok(ExponentMatrix::from_upper(2, &ints))
}

/// A character of `K(N)*/K(N)`, given by its signs on the prime divisors of
/// a squarefree level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignCharacter {
    pub level: u64,
    pub prime_signs: BTreeMap<u64, i8>,
}

impl SignCharacter {
    pub fn trivial(level: u64) -> Result<Self> {
        Self::from_prime_signs(level, &[])
    }

    /// Signs `−1` on the listed primes and `+1` elsewhere.
    pub fn from_prime_signs(level: u64, negative_primes: &[u64]) -> Result<Self> {
        if !is_squarefree(level) {
            return Err(Error::NotSquarefree(level));
        }
        let primes = prime_divisors(level);
        if let Some(p) = negative_primes.iter().find(|p| !primes.contains(p)) {
            return Err(Error::InvalidArgument(format!(
                "{p} is not a prime divisor of {level}"
            )));
        }
        let prime_signs = primes
            .into_iter()
            .map(|p| (p, if negative_primes.contains(&p) { -1 } else { 1 }))
            .collect();
        Ok(SignCharacter { level, prime_signs })
    }

    /// From values on exact divisors; the map must be multiplicative and
    /// trivial at `d = 1`.
    pub fn from_divisor_values(level: u64, values: &BTreeMap<u64, i8>) -> Result<Self> {
        if !is_squarefree(level) {
            return Err(Error::NotSquarefree(level));
        }
        let negative: Vec<u64> = prime_divisors(level)
            .into_iter()
            .filter(|p| values.get(p) == Some(&-1))
            .collect();
        let chi = Self::from_prime_signs(level, &negative)?;
        for (&d, &v) in values {
            if !is_exact_divisor(d, level) {
                return Err(Error::NotExactDivisor(d, level));
            }
            if chi.eval(d)? != v {
                return Err(Error::InvalidArgument(format!(
                    "value {v} at {d} is not multiplicative"
                )));
            }
        }
        Ok(chi)
    }

    /// Every character of the level.
    pub fn all(level: u64) -> Result<Vec<Self>> {
        let primes = prime_divisors(level);
        (0..1usize << primes.len())
            .map(|mask| {
                let neg: Vec<u64> = primes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                Self::from_prime_signs(level, &neg)
            })
            .collect()
    }

    pub fn eval(&self, d: u64) -> Result<i8> {
        if !is_exact_divisor(d, self.level) {
            return Err(Error::NotExactDivisor(d, self.level));
        }
        Ok(self
            .prime_signs
            .iter()
            .filter(|(p, _)| d.is_multiple_of(**p))
            .map(|(_, s)| *s)
            .product())
    }
}

/// `u = U/√d` in `Γ₀(N)*`, or in its extension by `det = −1` elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaZeroStarElement {
    pub name: String,
    pub matrix: [[i64; 2]; 2],
    pub scale: u64,
}

impl GammaZeroStarElement {
    /// Checks `det U = ±d`, `d ‖ N`, `d | U₁₁`, `d | U₂₂` and `N | U₂₁`.
    pub fn new(name: &str, matrix: [[i64; 2]; 2], scale: u64, level: u64) -> Result<Self> {
        let [[a, b], [c, e]] = matrix;
        let d = scale as i64;
        let det = a * e - b * c;
        let ok = is_exact_divisor(scale, level)
            && det.abs() == d
            && a % d == 0
            && e % d == 0
            && c % level as i64 == 0;
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "{matrix:?} with scale {scale} is not in Γ₀({level})*"
            )));
        }
        Ok(GammaZeroStarElement {
            name: name.to_string(),
            matrix,
            scale,
        })
    }

    /// `det(u) = det(U)/d = ±1`.
    pub fn det_sign(&self) -> i64 {
        let [[a, b], [c, e]] = self.matrix;
        (a * e - b * c).signum()
    }

    /// `u·T·ᵗu` on exponent matrices, `None` when it leaves `Z`-entries.
    pub fn act(&self, e: &ExponentMatrix) -> Option<ExponentMatrix> {
        let u = self.matrix;
        let raw = e.transform_by(2, |i, j| u[j][i]);
        let d = self.scale as i64;
        let up = raw.upper();
        up.iter()
            .all(|x| x % d == 0)
            .then(|| ExponentMatrix::from_upper(2, &[up[0] / d, up[1] / d, up[2] / d]))
    }

    /// The inverse element, `adj(U)/√d` up to sign.
    pub fn inverse(&self) -> GammaZeroStarElement {
        let [[a, b], [c, e]] = self.matrix;
        GammaZeroStarElement {
            name: format!("{}^-1", self.name),
            matrix: [[e, -b], [-c, a]],
            scale: self.scale,
        }
    }
}

/// Translation, `diag(−1, 1)`, `[[1,0],[N,1]]`, the Fricke element and `W_d`
/// for every `d ‖ N` with `1 < d < N`.
pub fn default_strong_elements(level: u64) -> Result<Vec<GammaZeroStarElement>> {
    let n = level as i64;
    let mut out = vec![
        GammaZeroStarElement::new("translation", [[1, 1], [0, 1]], 1, level)?,
        GammaZeroStarElement::new("diag(-1,1)", [[-1, 0], [0, 1]], 1, level)?,
        GammaZeroStarElement::new("lower", [[1, 0], [n, 1]], 1, level)?,
    ];
    for d in exact_divisors(level)
        .into_iter()
        .rev()
        .filter(|&d| d > 1 || level == 1)
    {
        let al = make_atkin_lehner(level, d)?;
        let name = if d == level {
            "fricke".to_string()
        } else {
            format!("W_{d}")
        };
        out.push(GammaZeroStarElement::new(&name, al.w_matrix(), d, level)?);
    }
    Ok(out)
}

/// The minimal generating set `{translation, Fricke}`, valid for `N ≤ 3`.
pub fn generating_elements_small_level(level: u64) -> Result<Vec<GammaZeroStarElement>> {
    if !(1..=3).contains(&level) {
        return Err(Error::InvalidArgument(format!(
            "no known two-element generating set for level {level}"
        )));
    }
    let al = make_atkin_lehner(level, level)?;
    Ok(vec![
        GammaZeroStarElement::new("translation", [[1, 1], [0, 1]], 1, level)?,
        GammaZeroStarElement::new("fricke", al.w_matrix(), level, level)?,
    ])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KeyPair {
    pub key: ExponentMatrix,
    pub image: ExponentMatrix,
    pub a_key: String,
    pub a_image: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutionReport {
    pub level: u64,
    /// The sign `ε` consistent with every checked pair, when the pairs force
    /// one.
    pub epsilon: Option<i8>,
    pub pairs_checked: usize,
    /// Pairs with the image above the truncation.
    pub pairs_skipped: usize,
    /// A pair admitting neither sign.
    pub violation: Option<KeyPair>,
    /// Two pairs forcing opposite signs.
    pub conflict: Option<(KeyPair, KeyPair)>,
    pub passed: bool,
}

fn pair(t: &ParamodularTable, key: &ExponentMatrix, image: &ExponentMatrix) -> KeyPair {
    KeyPair {
        key: key.clone(),
        image: image.clone(),
        a_key: t.coeff(key).to_string(),
        a_image: t.coeff(image).to_string(),
    }
}

/// Finds `ε ∈ {±1}` with `a(μT) = ε·a(T)` on every pair with both keys in
/// bound.
pub fn check_involution(t: &ParamodularTable) -> Result<InvolutionReport> {
    let mut pairs: Vec<(ExponentMatrix, ExponentMatrix)> = Vec::new();
    let mut skipped = 0;
    for (e, _) in t.iter() {
        let img = mu_index_action(e, t.level)?;
        if t.in_bound(&img) {
            pairs.push(if img < *e {
                (img, e.clone())
            } else {
                (e.clone(), img)
            });
        } else {
            skipped += 1;
        }
    }
    pairs.sort();
    pairs.dedup();
    let mut forced: Option<(i8, KeyPair)> = None;
    let mut violation = None;
    let mut conflict = None;
    for (e, img) in &pairs {
        let (a, b) = (t.coeff(e), t.coeff(img));
        let sign = if a == b {
            1
        } else if a == -&b {
            -1
        } else {
            violation.get_or_insert_with(|| pair(t, e, img));
            continue;
        };
        match &forced {
            None => forced = Some((sign, pair(t, e, img))),
            Some((s, first)) if *s != sign && conflict.is_none() => {
                conflict = Some((first.clone(), pair(t, e, img)));
            }
            _ => {}
        }
    }
    let passed = violation.is_none() && conflict.is_none();
    Ok(InvolutionReport {
        level: t.level,
        epsilon: if passed { forced.map(|f| f.0) } else { None },
        pairs_checked: pairs.len(),
        pairs_skipped: skipped,
        violation,
        conflict,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongViolation {
    pub element: String,
    pub key: ExponentMatrix,
    pub image: ExponentMatrix,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongSymmetryReport {
    pub level: u64,
    pub weight: i64,
    pub character: SignCharacter,
    pub elements: Vec<String>,
    pub pairs_checked: usize,
    pub pairs_skipped: usize,
    pub violations: Vec<StrongViolation>,
    pub passed: bool,
}

/// `a(u·T·ᵗu) = χ(d)·det(u)^k·a(T)` for every element `u = U/√d` and every
/// pair with both keys in bound.
pub fn check_strong_symmetry(
    t: &ParamodularTable,
    k: i64,
    chi: &SignCharacter,
    elements: &[GammaZeroStarElement],
) -> Result<StrongSymmetryReport> {
    if chi.level != t.level {
        return Err(Error::InvalidArgument(format!(
            "character of level {} for a table of level {}",
            chi.level, t.level
        )));
    }
    let mut checked = 0;
    let mut skipped = 0;
    let mut violations = Vec::new();
    for el in elements {
        GammaZeroStarElement::new(&el.name, el.matrix, el.scale, t.level)?;
        let sign = i64::from(chi.eval(el.scale)?)
            * if k.rem_euclid(2) == 1 {
                el.det_sign()
            } else {
                1
            };
        let factor = GaussianRational::from_integer(sign);
        let inv = el.inverse();
        let image_of = |e: &ExponentMatrix, g: &GammaZeroStarElement| -> Result<ExponentMatrix> {
            g.act(e)
                .filter(|x| in_index_lattice(x, t.level))
                .ok_or_else(|| Error::LatticeViolation(e.to_string()))
        };
        let mut pairs = Vec::new();
        for (e, _) in t.iter() {
            let img = image_of(e, el)?;
            if t.in_bound(&img) {
                pairs.push((e.clone(), img));
            } else {
                skipped += 1;
            }
            let pre = image_of(e, &inv)?;
            if t.in_bound(&pre) && t.coeffs.get(&pre).is_none() {
                pairs.push((pre, e.clone()));
            }
        }
        pairs.sort();
        pairs.dedup();
        checked += pairs.len();
        let bad: Vec<StrongViolation> = pairs
            .par_iter()
            .filter_map(|(e, img)| {
                let expected = &factor * &t.coeff(e);
                let found = t.coeff(img);
                (expected != found).then(|| StrongViolation {
                    element: el.name.clone(),
                    key: e.clone(),
                    image: img.clone(),
                    expected: expected.to_string(),
                    found: found.to_string(),
                })
            })
            .collect();
        violations.extend(bad);
    }
    Ok(StrongSymmetryReport {
        level: t.level,
        weight: k,
        character: chi.clone(),
        elements: elements.iter().map(|e| e.name.clone()).collect(),
        pairs_checked: checked,
        pairs_skipped: skipped,
        passed: violations.is_empty(),
        violations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ImplicationReport {
    pub involution: InvolutionReport,
    /// Characters for which strong symmetry holds on the available keys.
    pub strong_characters: Vec<SignCharacter>,
    /// `false` only when the involution condition holds but no character
    /// makes the table strongly symmetric on the checked keys.
    pub implication_holds: bool,
}

/// Tests whether the involution condition implies strong symmetry on the
/// keys of one table. Reports the outcome and asserts nothing in general.
pub fn involution_implies_strong(
    t: &ParamodularTable,
    k: i64,
    elements: &[GammaZeroStarElement],
) -> Result<ImplicationReport> {
    let involution = check_involution(t)?;
    let mut strong_characters = Vec::new();
    for chi in SignCharacter::all(t.level)? {
        if check_strong_symmetry(t, k, &chi, elements)?.passed {
            strong_characters.push(chi);
        }
    }
    let implication_holds = !involution.passed || !strong_characters.is_empty();
    Ok(ImplicationReport {
        involution,
        strong_characters,
        implication_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: i64, b: i64, c: i64) -> ExponentMatrix {
        ExponentMatrix::from_upper(2, &[a, b, c])
    }

    fn g(k: i64) -> GaussianRational {
        GaussianRational::from_integer(k)
    }

    #[test]
    fn mu_action_examples() {
        for n in [1u64, 2, 5, 6] {
            let ni = n as i64;
            assert_eq!(
                mu_index_action(&e(8, 4, 8 * ni), n).unwrap(),
                e(8, -4, 8 * ni)
            );
            assert_eq!(
                mu_index_action(&e(16, 0, 8 * ni), n).unwrap(),
                e(8, 0, 16 * ni)
            );
            let k = e(24, 4, 16 * ni);
            assert_eq!(
                mu_index_action(&mu_index_action(&k, n).unwrap(), n).unwrap(),
                k
            );
        }
        assert!(mu_index_action(&e(8, 4, 8), 2).is_err());
    }

    #[test]
    fn block_map_of_mu_is_the_index_action() {
        for n in [1u64, 2, 3, 6, 10] {
            let ni = n as i64;
            let v = super::super::mu(n);
            for k in [e(8, 4, 8 * ni), e(24, -4, 16 * ni), e(16, 0, 8 * ni)] {
                assert_eq!(
                    block_index_map(&v, &k).unwrap(),
                    mu_index_action(&k, n).unwrap()
                );
            }
        }
    }

    #[test]
    fn involution_signs() {
        let mut t = ParamodularTable::new(2, 10, 200).unwrap();
        t.set(e(8, 4, 16), g(3)).unwrap();
        t.set(e(8, -4, 16), g(3)).unwrap();
        t.set(e(16, 0, 16), g(5)).unwrap();
        t.set(e(8, 0, 32), g(5)).unwrap();
        let r = check_involution(&t).unwrap();
        assert_eq!((r.epsilon, r.passed), (Some(1), true));

        let mut anti = ParamodularTable::new(2, 10, 200).unwrap();
        anti.set(e(8, 4, 16), g(3)).unwrap();
        anti.set(e(8, -4, 16), g(-3)).unwrap();
        assert_eq!(check_involution(&anti).unwrap().epsilon, Some(-1));

        let mut bad = ParamodularTable::new(2, 10, 200).unwrap();
        bad.set(e(16, 0, 16), g(1)).unwrap();
        bad.set(e(8, 0, 32), g(2)).unwrap();
        let r = check_involution(&bad).unwrap();
        assert!(!r.passed);
        assert!(r.violation.is_some());

        let mut mixed = t.clone();
        mixed.set(e(8, 0, 32), g(-5)).unwrap();
        mixed.set(e(8, 4, 16), g(3)).unwrap();
        let r = check_involution(&mixed).unwrap();
        assert!(r.conflict.is_some() && !r.passed);
    }

    #[test]
    fn characters() {
        let chi = SignCharacter::from_prime_signs(30, &[2, 5]).unwrap();
        assert_eq!(chi.eval(1).unwrap(), 1);
        assert_eq!(chi.eval(10).unwrap(), 1);
        assert_eq!(chi.eval(6).unwrap(), -1);
        assert_eq!(SignCharacter::all(30).unwrap().len(), 8);
        assert!(SignCharacter::trivial(12).is_err());
        let vals: BTreeMap<u64, i8> = [(2, -1), (3, -1), (6, -1)].into_iter().collect();
        assert!(SignCharacter::from_divisor_values(6, &vals).is_err());
    }

    #[test]
    fn element_validation() {
        assert!(GammaZeroStarElement::new("x", [[1, 0], [1, 1]], 1, 2).is_err());
        assert!(GammaZeroStarElement::new("x", [[2, 1], [6, 4]], 2, 6).is_ok());
        let els = default_strong_elements(6).unwrap();
        let names: Vec<&str> = els.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(
            names,
            ["translation", "diag(-1,1)", "lower", "fricke", "W_3", "W_2"]
        );
        for el in &els {
            assert_eq!(el.det_sign().abs(), 1);
            // elements preserve the lattice
            let k = e(8, 4, 48);
            assert!(in_index_lattice(&el.act(&k).unwrap(), 6));
        }
    }

    #[test]
    fn odd_weight_negation_forces_zero_on_diagonal() {
        let mut t = ParamodularTable::new(1, 11, 64).unwrap();
        t.set(e(8, 0, 8), g(1)).unwrap();
        let els = default_strong_elements(1).unwrap();
        let r = check_strong_symmetry(&t, 11, &SignCharacter::trivial(1).unwrap(), &els).unwrap();
        assert!(!r.passed);
    }
}
