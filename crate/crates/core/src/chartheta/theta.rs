//! Theta constants `θ[m](τ) = Σ_x e^{πi·ᵗ(x+a/2)τ(x+a/2) + πi·ᵗ(x+a/2)b}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;

use super::characteristic::{all_characteristics, ThetaCharacteristic};
use crate::arith::{ExponentMatrix, PointInHn};
use crate::coeff::GaussianRational;
use crate::error::{Error, Result};
use crate::qseries::SiegelFourierSeries;

/// All `w ∈ Zⁿ` with `w ≡ a (mod 2)` componentwise and `|w|² ≤ bound`.
pub fn shifted_lattice_vectors(n: usize, a_bits: u16, bound: u64) -> Vec<Vec<i64>> {
    fn rec(
        i: usize,
        n: usize,
        a_bits: u16,
        left: i64,
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        let odd = (a_bits >> i) & 1 == 1;
        let r = (left as f64).sqrt().floor() as i64 + 1;
        let mut w = -r;
        while w <= r {
            if (w.rem_euclid(2) == 1) == odd && w * w <= left {
                cur.push(w);
                rec(i + 1, n, a_bits, left - w * w, cur, out);
                cur.pop();
            }
            w += 1;
        }
    }
    let mut out = Vec::new();
    rec(
        0,
        n,
        a_bits,
        bound as i64,
        &mut Vec::with_capacity(n),
        &mut out,
    );
    out
}

/// Exact expansion of `θ[m]` through exponent trace `bound`, weight 1/2.
///
/// With `w = 2x + a` the term has key `E = w·ᵗw` and coefficient
/// `i^{ᵗw·b}`.
pub fn theta_qexp(m: &ThetaCharacteristic, bound: u64) -> SiegelFourierSeries {
    let n = m.genus();
    let weight = BigRational::new(1.into(), 2.into());
    let mut series = SiegelFourierSeries::zero(n, weight, bound);
    if !m.is_even() {
        return series;
    }
    let b_bits = m.b_bits();
    for w in shifted_lattice_vectors(n, m.a_bits(), bound) {
        let wb: i64 = (0..n)
            .filter(|&i| (b_bits >> i) & 1 == 1)
            .map(|i| w[i])
            .sum();
        series.add_term_unchecked(ExponentMatrix::outer(&w), &GaussianRational::i_pow(wb));
    }
    series
}

/// Theta constants of every characteristic at one point, each with absolute
/// error at most `tol`.
#[derive(Clone, Debug)]
pub struct ThetaValues {
    n: usize,
    values: Vec<Complex64>,
    majorants: Vec<f64>,
    tol: f64,
    terms: usize,
}

impl ThetaValues {
    pub fn genus(&self) -> usize {
        self.n
    }

    pub fn value(&self, m: &ThetaCharacteristic) -> Complex64 {
        self.values[m.index()]
    }

    /// `Σ |term|` over the evaluated terms plus the tail bound; bounds
    /// `|θ[m](τ)|` and measures the size of the cancellation in the sum.
    pub fn majorant(&self, m: &ThetaCharacteristic) -> f64 {
        self.majorants[m.index()]
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn terms_evaluated(&self) -> usize {
        self.terms
    }
}

/// Squared ellipsoid radius `ρ²` such that the terms with `ᵗv·y·v > ρ²`
/// sum to less than `tol` in absolute value.
///
/// For such `v`, `e^{−π q(v)} ≤ e^{−πρ²/2}·e^{−π q(v)/2}`, and
/// `Σ_v e^{−π q(v)/2} ≤ ∏_i Σ_{t ∈ Z + cᵢ} e^{−πλt²/2} ≤ (2 + √(2/λ))ⁿ`.
fn ellipsoid_radius_sq(n: usize, lambda: f64, tol: f64) -> f64 {
    let per_coord = 2.0 + (2.0 / lambda).sqrt();
    let log_total = n as f64 * per_coord.ln() - tol.ln();
    (2.0 / std::f64::consts::PI * log_total).max(0.0)
}

/// Enumerates `v ∈ Zⁿ + a/2` with `ᵗv·y·v ≤ r2` using the Jacobi form
/// `q(v) = Σ dᵢ (vᵢ + Σ_{j>i} w_ij v_j)²`.
fn ellipsoid_points(
    d: &[f64],
    w: &DMatrix<f64>,
    a_bits: u16,
    r2: f64,
    mut visit: impl FnMut(&[f64]),
) {
    let n = d.len();
    let mut v = vec![0.0; n];
    fn rec(
        i: usize,
        d: &[f64],
        w: &DMatrix<f64>,
        a_bits: u16,
        left: f64,
        v: &mut Vec<f64>,
        visit: &mut dyn FnMut(&[f64]),
    ) {
        let n = d.len();
        let shift: f64 = (i + 1..n).map(|j| w[(i, j)] * v[j]).sum();
        let half = if (a_bits >> i) & 1 == 1 { 0.5 } else { 0.0 };
        let radius = (left.max(0.0) / d[i]).sqrt();
        // vᵢ = k + half ranges over [−shift − radius, −shift + radius]
        let lo = (-shift - radius - half).ceil() as i64 - 1;
        let hi = (-shift + radius - half).floor() as i64 + 1;
        for k in lo..=hi {
            let vi = k as f64 + half;
            let t = vi + shift;
            let rest = left - d[i] * t * t;
            if rest < 0.0 {
                continue;
            }
            v[i] = vi;
            if i == 0 {
                visit(v);
            } else {
                rec(i - 1, d, w, a_bits, rest, v, visit);
            }
        }
        v[i] = 0.0;
    }
    if n == 0 {
        visit(&v);
        return;
    }
    rec(n - 1, d, w, a_bits, r2, &mut v, &mut visit);
}

/// Evaluates all `4ⁿ` theta constants at `τ`.
pub fn theta_values(tau: &PointInHn, tol: f64) -> Result<ThetaValues> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = tau.genus();
    if n == 0 || n > super::MAX_GENUS {
        return Err(Error::InvalidArgument(format!("genus {n} unsupported")));
    }
    let jac = tau.jacobi();
    let lambda = jac.min_eigenvalue_lower_bound();
    // leave room for rounding in the summation itself
    let r2 = ellipsoid_radius_sq(n, lambda, tol / 2.0) * (1.0 + 1e-9) + 1e-9;
    let x = tau.real_part();
    let y = tau.imag_part();
    let count = 1usize << (2 * n);
    let mut values = vec![Complex64::new(0.0, 0.0); count];
    let mut majorants = vec![0.0; count];
    let mut terms = 0usize;
    let pi = std::f64::consts::PI;
    for a_bits in 0..(1u16 << n) {
        let mut sums = vec![Complex64::new(0.0, 0.0); 1 << n];
        let mut abs_sum = 0.0;
        ellipsoid_points(&jac.d, &jac.w, a_bits, r2, |v| {
            let mut re_form = 0.0;
            let mut im_form = 0.0;
            for i in 0..n {
                for j in 0..n {
                    re_form += v[i] * x[(i, j)] * v[j];
                    im_form += v[i] * y[(i, j)] * v[j];
                }
            }
            let modulus = (-pi * im_form).exp();
            let base = Complex64::from_polar(modulus, pi * re_form);
            abs_sum += modulus;
            terms += 1;
            // e^{πi·ᵗv·b} = i^{ᵗw·b} with w = 2v
            let w: Vec<i64> = v.iter().map(|vi| (2.0 * vi).round() as i64).collect();
            for (b_bits, sum) in sums.iter_mut().enumerate() {
                let wb: i64 = (0..n)
                    .filter(|&i| (b_bits >> i) & 1 == 1)
                    .map(|i| w[i])
                    .sum();
                *sum += match wb.rem_euclid(4) {
                    0 => base,
                    1 => base * Complex64::i(),
                    2 => -base,
                    _ => -base * Complex64::i(),
                };
            }
        });
        for (b_bits, sum) in sums.into_iter().enumerate() {
            let m = ThetaCharacteristic::from_bits(n, a_bits, b_bits as u16);
            let idx = m.index();
            if m.is_even() {
                values[idx] = sum;
            }
            majorants[idx] = abs_sum + tol / 2.0;
        }
    }
    Ok(ThetaValues {
        n,
        values,
        majorants,
        tol,
        terms,
    })
}

/// `θ[m](τ)` with absolute error at most `tol`; odd characteristics return
/// exactly zero.
pub fn theta_numeric(m: &ThetaCharacteristic, tau: &PointInHn, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if m.genus() != tau.genus() {
        return Err(Error::DimensionMismatch {
            expected: m.genus(),
            got: tau.genus(),
        });
    }
    if !m.is_even() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(theta_values(tau, tol)?.value(m))
}

/// Evaluates a truncated series at `τ`: `Σ a(E)·e^{2πi·tr(Eτ)/8}`.
pub fn evaluate_series(f: &SiegelFourierSeries, tau: &PointInHn) -> Complex64 {
    let z = tau.to_complex();
    let n = f.genus();
    f.iter()
        .map(|(e, c)| {
            let mut tr = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    tr += z[(j, i)] * e.get(i, j) as f64;
                }
            }
            c.to_complex64() * (Complex64::new(0.0, 2.0 * std::f64::consts::PI / 8.0) * tr).exp()
        })
        .sum()
}

/// Even characteristics in index order, paired with their values.
pub fn even_values(vals: &ThetaValues) -> Vec<(ThetaCharacteristic, Complex64)> {
    all_characteristics(vals.n)
        .filter(|m| m.is_even())
        .map(|m| (m, vals.value(&m)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartheta::{even_characteristics, integer_generators, IntegerSymplectic};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ch(n: usize, a: &[u8], b: &[u8]) -> ThetaCharacteristic {
        ThetaCharacteristic::new(n, a, b).unwrap()
    }

    fn c(e: i64) -> ExponentMatrix {
        ExponentMatrix::diagonal(&[e])
    }

    #[test]
    fn genus_one_examples() {
        let t = theta_qexp(&ch(1, &[0], &[0]), 8);
        assert_eq!(t.coeff(&c(0)), GaussianRational::one());
        assert_eq!(t.coeff(&c(4)), GaussianRational::from_integer(2));
        for odd in [1, 3, 5, 7] {
            assert!(t.coeff(&c(odd)).is_zero());
        }
        let t = theta_qexp(&ch(1, &[0], &[1]), 8);
        assert_eq!(t.coeff(&c(4)), GaussianRational::from_integer(-2));
        assert!(theta_qexp(&ch(1, &[1], &[1]), 16).is_zero());
        assert_eq!(t.weight(), &BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn genus_one_matches_direct_loop() {
        // independent oracle: sum over |x| ≤ 10 with exact complex phases
        for m in even_characteristics(1) {
            let t = theta_qexp(&m, 60);
            let (a, b) = (m.a()[0] as i64, m.b()[0] as i64);
            let mut direct = std::collections::BTreeMap::<i64, (i64, i64)>::new();
            for x in -10i64..=10 {
                let w = 2 * x + a;
                if w * w > 60 {
                    continue;
                }
                // e^{πi·(x + a/2)·b} = i^{w·b}
                let phase = match (w * b).rem_euclid(4) {
                    0 => (1, 0),
                    1 => (0, 1),
                    2 => (-1, 0),
                    _ => (0, -1),
                };
                let entry = direct.entry(w * w).or_insert((0, 0));
                entry.0 += phase.0;
                entry.1 += phase.1;
            }
            for (e, (re, im)) in direct {
                let expect = GaussianRational::new(
                    crate::coeff::rational(re, 1),
                    crate::coeff::rational(im, 1),
                );
                assert_eq!(t.coeff(&c(e)), expect, "char {m} key {e}");
            }
        }
    }

    #[test]
    fn numeric_matches_series() {
        let tau = PointInHn::imaginary_diagonal(&[1.0]).unwrap();
        let m = ch(1, &[0], &[0]);
        let v = theta_numeric(&m, &tau, 1e-12).unwrap();
        assert!(v.im.abs() < 1e-12);
        let partial = evaluate_series(&theta_qexp(&m, 400), &tau);
        assert!((v - partial).norm() < 2e-12);
        // θ₃(i) = π^{1/4} / Γ(3/4)
        assert!((v.re - 1.086_434_811_213_308).abs() < 1e-12);
    }

    #[test]
    fn odd_is_exactly_zero_and_tol_checked() {
        let tau = PointInHn::from_rows(&[vec![0.1]], &[vec![0.9]]).unwrap();
        assert_eq!(
            theta_numeric(&ch(1, &[1], &[1]), &tau, 1e-10).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert!(theta_numeric(&ch(1, &[0], &[0]), &tau, 0.0).is_err());
    }

    #[test]
    fn purely_imaginary_points_give_real_values() {
        let tau = PointInHn::from_rows(
            &[vec![0.0, 0.0], vec![0.0, 0.0]],
            &[vec![1.2, 0.3], vec![0.3, 0.8]],
        )
        .unwrap();
        let vals = theta_values(&tau, 1e-12).unwrap();
        for (m, v) in even_values(&vals) {
            if m.a_bits() == 0 || m.b_bits() == 0 {
                assert!(v.im.abs() < 1e-12, "{m}: {v}");
            }
        }
    }

    #[test]
    fn genus_two_numeric_matches_series() {
        let tau = PointInHn::from_rows(
            &[vec![0.1, -0.2], vec![-0.2, 0.3]],
            &[vec![1.1, 0.2], vec![0.2, 0.9]],
        )
        .unwrap();
        let vals = theta_values(&tau, 1e-12).unwrap();
        for m in even_characteristics(2) {
            let s = evaluate_series(&theta_qexp(&m, 160), &tau);
            assert!((s - vals.value(&m)).norm() < 1e-10, "{m}");
        }
    }

    fn act_on_point(g: &IntegerSymplectic, tau: &PointInHn) -> (PointInHn, Complex64) {
        let (a, b, c, d) = g.blocks();
        let z = tau.to_complex();
        let cx = |m: &DMatrix<i64>| m.map(|v| Complex64::new(v as f64, 0.0));
        let num = cx(&a) * &z + cx(&b);
        let den = cx(&c) * &z + cx(&d);
        let det = den.determinant();
        let image = num * den.try_inverse().unwrap();
        (PointInHn::from_complex(&image).unwrap(), det)
    }

    #[test]
    fn eighth_powers_transform_with_the_mod_two_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=2usize {
            let gens = integer_generators(n);
            for _ in 0..12 {
                // a short random word keeps γτ well inside the half space
                let mut g = IntegerSymplectic::identity(n);
                for _ in 0..rng.gen_range(1..4) {
                    g = gens[rng.gen_range(0..gens.len())].mul(&g);
                }
                let mut y = DMatrix::<f64>::from_fn(n, n, |i, j| {
                    if i == j {
                        rng.gen_range(0.9..1.4)
                    } else {
                        0.0
                    }
                });
                for i in 0..n {
                    for j in 0..i {
                        let v = rng.gen_range(-0.2..0.2);
                        y[(i, j)] = v;
                        y[(j, i)] = v;
                    }
                }
                let mut x = DMatrix::<f64>::zeros(n, n);
                for i in 0..n {
                    for j in 0..=i {
                        let v = rng.gen_range(-0.5..0.5);
                        x[(i, j)] = v;
                        x[(j, i)] = v;
                    }
                }
                let tau = PointInHn::new(x, y).unwrap();
                let (image, det) = act_on_point(&g, &tau);
                let before = theta_values(&tau, 1e-14).unwrap();
                let after = theta_values(&image, 1e-14).unwrap();
                let gm = g.mod2();
                for m in even_characteristics(n) {
                    let lhs = after.value(&gm.act(&m)).powu(8);
                    let rhs = det.powu(4) * before.value(&m).powu(8);
                    let scale = 1.0 + before.majorant(&m).powi(8) * det.norm().powi(4);
                    assert!(
                        (lhs - rhs).norm() <= 1e-9 * scale,
                        "n={n} m={m} lhs={lhs} rhs={rhs}"
                    );
                }
            }
        }
    }
}
