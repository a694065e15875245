//! Numerical evaluation of named forms with propagated error bounds.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::named::{FormKind, NamedForm};
use crate::arith::{ExtComplex, PointInHn};
use crate::chartheta::{
    even_characteristics, set_orbit, theta_values, CharacteristicSet, ThetaValues,
};
use crate::error::{Error, Result};

/// A form value together with an absolute error bound and a reference
/// magnitude for relative comparisons.
#[derive(Clone, Copy, Debug)]
pub struct NumericValue {
    pub value: ExtComplex,
    /// Bound on `|computed − true|`.
    pub error_bound: ExtComplex,
    /// Product of per-factor majorants over the defining product (the
    /// largest defining product for sums of products).
    pub scale: ExtComplex,
    /// `Σ |coefficient|·∏ majorants` over every product in the form: an upper
    /// bound for `|value|`.
    pub majorant: ExtComplex,
}

impl NumericValue {
    /// `log₁₀(|value| / scale)`.
    pub fn log10_relative(&self) -> f64 {
        (self.value.log2_abs() - self.scale.log2_abs()) * std::f64::consts::LOG10_2
    }

    /// `|value| / scale`, saturating at zero.
    pub fn relative(&self) -> f64 {
        2f64.powf(self.value.log2_abs() - self.scale.log2_abs())
    }

    pub fn relative_error(&self) -> f64 {
        2f64.powf(self.error_bound.log2_abs() - self.scale.log2_abs())
    }
}

#[derive(Clone, Debug)]
enum Plan {
    Product {
        indices: Vec<usize>,
        power: u32,
    },
    F1 {
        indices: Vec<usize>,
    },
    FT {
        indices: Vec<usize>,
    },
    Pushforward {
        defining: Vec<usize>,
        orbit: Vec<Vec<u16>>,
        stabilizer: u128,
    },
}

/// A named form prepared for repeated evaluation (orbits computed once).
#[derive(Clone, Debug)]
pub struct NumericForm {
    form: NamedForm,
    plan: Plan,
}

fn indices(set: &CharacteristicSet) -> Vec<usize> {
    set.indices().collect()
}

/// Per-characteristic data at one point: `θ^p`, its majorant and the
/// logarithmic error factor `p·ln(1 + δ/M)`.
struct PowerTable {
    value: Vec<ExtComplex>,
    majorant: Vec<ExtComplex>,
    log_err: Vec<f64>,
}

fn power_table(vals: &ThetaValues, power: u32, delta: &[f64]) -> PowerTable {
    let count = 1usize << (2 * vals.genus());
    let mut value = Vec::with_capacity(count);
    let mut majorant = Vec::with_capacity(count);
    let mut log_err = Vec::with_capacity(count);
    for idx in 0..count {
        let m = crate::chartheta::ThetaCharacteristic::from_index(vals.genus(), idx);
        let maj = vals.majorant(&m);
        value.push(ExtComplex::new(vals.value(&m)).powu(power));
        majorant.push(ExtComplex::from_real(maj).powu(power));
        log_err.push(power as f64 * (delta[idx] / maj).ln_1p());
    }
    PowerTable {
        value,
        majorant,
        log_err,
    }
}

/// `(∏ value, ∏ majorant, ∏(M+δ)^p − ∏M^p)` over the given indices, with
/// mantissas multiplied directly (each below 2, so no overflow for up to a
/// thousand factors).
fn product_over(
    table: &PowerTable,
    idx: impl Iterator<Item = usize>,
) -> (ExtComplex, ExtComplex, ExtComplex) {
    let mut vm = Complex64::new(1.0, 0.0);
    let mut ve = 0i64;
    let mut mm = 1.0f64;
    let mut me = 0i64;
    let mut le = 0.0f64;
    let mut count = 0;
    for i in idx {
        let (m, e) = table.value[i].parts();
        vm *= m;
        ve += e;
        let (m, e) = table.majorant[i].parts();
        mm *= m.re;
        me += e;
        le += table.log_err[i];
        count += 1;
        if count % 512 == 0 {
            let v = ExtComplex::from_parts(vm, ve).parts();
            vm = v.0;
            ve = v.1;
            let m = ExtComplex::from_parts(Complex64::new(mm, 0.0), me).parts();
            mm = m.0.re;
            me = m.1;
        }
    }
    let value = ExtComplex::from_parts(vm, ve);
    let maj = ExtComplex::from_parts(Complex64::new(mm, 0.0), me);
    let err = maj.scale(le.exp_m1());
    (value, maj, err)
}

fn ext_max(a: ExtComplex, b: ExtComplex) -> ExtComplex {
    if a.log2_abs() >= b.log2_abs() {
        a
    } else {
        b
    }
}

/// Fixed-size chunks summed sequentially, so the result does not depend on
/// the worker count.
const SUM_CHUNK: usize = 4096;

impl NumericForm {
    /// Prepares `form`; pushforwards compute their set orbit within `budget`.
    pub fn compile(form: &NamedForm, budget: usize) -> Result<Self> {
        let n = form.genus;
        let evens = CharacteristicSet::even(n);
        let plan = match &form.kind {
            FormKind::FNull => Plan::Product {
                indices: indices(&evens),
                power: 1,
            },
            FormKind::ThetaSetPower { set, power } => {
                if !set.all_even() {
                    return Err(Error::OddCharacteristic);
                }
                Plan::Product {
                    indices: indices(set),
                    power: *power,
                }
            }
            FormKind::F1 => Plan::F1 {
                indices: indices(&evens),
            },
            FormKind::FT => Plan::FT {
                indices: indices(&evens),
            },
            FormKind::FH => {
                return Err(Error::RequiresExternalData(
                    "F_H characteristic sets are not bundled".into(),
                ));
            }
            FormKind::Pushforward { set } => {
                let orbit = set_orbit(set, budget)?;
                let members = orbit
                    .members
                    .iter()
                    .map(|s| s.indices().map(|i| i as u16).collect())
                    .collect();
                Plan::Pushforward {
                    defining: indices(set),
                    orbit: members,
                    stabilizer: orbit.stabilizer_order,
                }
            }
        };
        Ok(NumericForm {
            form: form.clone(),
            plan,
        })
    }

    pub fn form(&self) -> &NamedForm {
        &self.form
    }

    pub fn orbit_size(&self) -> Option<usize> {
        match &self.plan {
            Plan::Pushforward { orbit, .. } => Some(orbit.len()),
            _ => None,
        }
    }

    pub fn stabilizer_order(&self) -> Option<u128> {
        match &self.plan {
            Plan::Pushforward { stabilizer, .. } => Some(*stabilizer),
            _ => None,
        }
    }

    /// Evaluates from precomputed theta values.
    pub fn evaluate_values(&self, vals: &ThetaValues) -> Result<NumericValue> {
        if vals.genus() != self.form.genus {
            return Err(Error::DimensionMismatch {
                expected: self.form.genus,
                got: vals.genus(),
            });
        }
        let count = 1usize << (2 * vals.genus());
        // theta error: evaluation tolerance plus a rounding allowance
        let delta: Vec<f64> = (0..count)
            .map(|i| {
                let m = crate::chartheta::ThetaCharacteristic::from_index(vals.genus(), i);
                vals.tol() + 1e-14 * vals.majorant(&m)
            })
            .collect();
        Ok(match &self.plan {
            Plan::Product { indices, power } => {
                let t = power_table(vals, *power, &delta);
                let (v, m, e) = product_over(&t, indices.iter().copied());
                NumericValue {
                    value: v,
                    error_bound: e,
                    scale: m,
                    majorant: m,
                }
            }
            Plan::F1 { indices } => {
                let t = power_table(vals, 8, &delta);
                let mut value = ExtComplex::ZERO;
                let mut err = ExtComplex::ZERO;
                let mut scale = ExtComplex::ZERO;
                let mut maj = ExtComplex::ZERO;
                for &skip in indices {
                    let (v, m, e) =
                        product_over(&t, indices.iter().copied().filter(|&i| i != skip));
                    value = value + v;
                    err = err + e;
                    maj = maj + m;
                    scale = ext_max(scale, m);
                }
                NumericValue {
                    value,
                    error_bound: err,
                    scale,
                    majorant: maj,
                }
            }
            Plan::FT { indices } => {
                let n = vals.genus();
                let t8 = power_table(vals, 8, &delta);
                let t16 = power_table(vals, 16, &delta);
                let mut s8 = ExtComplex::ZERO;
                let mut s8_maj = ExtComplex::ZERO;
                let mut s8_err = ExtComplex::ZERO;
                let mut s16 = ExtComplex::ZERO;
                let mut s16_maj = ExtComplex::ZERO;
                let mut s16_err = ExtComplex::ZERO;
                for &i in indices {
                    let (v, m, e) = product_over(&t8, std::iter::once(i));
                    s8 = s8 + v;
                    s8_maj = s8_maj + m;
                    s8_err = s8_err + e;
                    let (v, m, e) = product_over(&t16, std::iter::once(i));
                    s16 = s16 + v;
                    s16_maj = s16_maj + m;
                    s16_err = s16_err + e;
                }
                let two_n = ExtComplex::from_real((1u64 << n) as f64);
                let first = two_n * s16;
                let second = s8 * s8;
                // |(A+ε)² − A²| ≤ (M_A + ε)² − M_A²
                let sq_err = (s8_maj + s8_err) * (s8_maj + s8_err) - s8_maj * s8_maj;
                let first_maj = two_n * s16_maj;
                let second_maj = s8_maj * s8_maj;
                NumericValue {
                    value: first - second,
                    error_bound: two_n * s16_err + sq_err,
                    scale: ext_max(first_maj, second_maj),
                    majorant: first_maj + second_maj,
                }
            }
            Plan::Pushforward {
                defining,
                orbit,
                stabilizer,
            } => {
                let t = power_table(vals, 8, &delta);
                let partial: Vec<(ExtComplex, ExtComplex, ExtComplex)> = orbit
                    .par_chunks(SUM_CHUNK)
                    .map(|chunk| {
                        let mut acc = (ExtComplex::ZERO, ExtComplex::ZERO, ExtComplex::ZERO);
                        for set in chunk {
                            let (v, m, e) = product_over(&t, set.iter().map(|&i| i as usize));
                            acc = (acc.0 + v, acc.1 + m, acc.2 + e);
                        }
                        acc
                    })
                    .collect();
                let (mut v, mut m, mut e) = (ExtComplex::ZERO, ExtComplex::ZERO, ExtComplex::ZERO);
                for p in partial {
                    v = v + p.0;
                    m = m + p.1;
                    e = e + p.2;
                }
                let c = ExtComplex::from_real(*stabilizer as f64);
                let (_, def_maj, _) = product_over(&t, defining.iter().copied());
                NumericValue {
                    value: c * v,
                    error_bound: c * e,
                    scale: c * def_maj,
                    majorant: c * m,
                }
            }
        })
    }

    /// Evaluates at `τ` with absolute error at most `tol` when reachable in
    /// double precision; otherwise the returned bound reports what was
    /// achieved.
    pub fn evaluate(&self, tau: &PointInHn, tol: f64) -> Result<NumericValue> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let mut theta_tol = 1e-15;
        let mut best = self.evaluate_values(&theta_values(tau, theta_tol)?)?;
        for _ in 0..3 {
            if best.error_bound.log2_abs() <= tol.log2() {
                break;
            }
            theta_tol *= 1e-3;
            if theta_tol < 1e-300 {
                break;
            }
            best = self.evaluate_values(&theta_values(tau, theta_tol)?)?;
        }
        Ok(best)
    }
}

/// Evaluates a named form at `τ` with error at most `tol`.
pub fn eval_named_numeric(
    form: &NamedForm,
    tau: &PointInHn,
    tol: f64,
    budget: usize,
) -> Result<NumericValue> {
    if form.genus != tau.genus() {
        return Err(Error::DimensionMismatch {
            expected: form.genus,
            got: tau.genus(),
        });
    }
    NumericForm::compile(form, budget)?.evaluate(tau, tol)
}

/// The even characteristics used by the constructions, in index order.
pub fn defining_evens(n: usize) -> Vec<usize> {
    even_characteristics(n).iter().map(|m| m.index()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FormRecord {
    pub form: String,
    pub log10_abs: f64,
    pub log10_relative: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub forms: Vec<FormRecord>,
    /// `max_F |F| / scale_F`.
    pub max_relative: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub tol: f64,
    pub points: Vec<PointRecord>,
    pub flagged: Vec<usize>,
}

/// Evaluates every form at every point and flags points where all forms
/// are below `tol` relative to their scale. A sampling check only.
pub fn scan_common_zeros(
    points: &[PointInHn],
    forms: &[NumericForm],
    tol: f64,
) -> Result<ScanReport> {
    for (p, f) in points
        .iter()
        .flat_map(|p| forms.iter().map(move |f| (p, f)))
    {
        if p.genus() != f.form.genus {
            return Err(Error::DimensionMismatch {
                expected: f.form.genus,
                got: p.genus(),
            });
        }
    }
    let records: Vec<PointRecord> = points
        .iter()
        .enumerate()
        .map(|(index, tau)| {
            let vals = theta_values(tau, 1e-15)?;
            let mut out = Vec::with_capacity(forms.len());
            let mut max_relative: f64 = 0.0;
            for f in forms {
                let v = f.evaluate_values(&vals)?;
                max_relative = max_relative.max(v.relative());
                out.push(FormRecord {
                    form: f.form.label.clone(),
                    log10_abs: v.value.log2_abs() * std::f64::consts::LOG10_2,
                    log10_relative: v.log10_relative(),
                    relative_error: v.relative_error(),
                });
            }
            Ok(PointRecord {
                index,
                forms: out,
                max_relative,
                flagged: !forms.is_empty() && max_relative < tol,
            })
        })
        .collect::<Result<_>>()?;
    let flagged = records
        .iter()
        .filter(|r| r.flagged)
        .map(|r| r.index)
        .collect();
    Ok(ScanReport {
        tol,
        points: records,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartheta::{evaluate_series, theta_numeric};
    use crate::constructions::construct_named;

    fn reducible_point() -> PointInHn {
        let t1 = PointInHn::from_rows(&[vec![0.1]], &[vec![3.3]]).unwrap();
        let t2 = PointInHn::from_rows(
            &[vec![0.2, -0.1], vec![-0.1, 0.05]],
            &[vec![3.4, 1.5], vec![1.5, 3.2]],
        )
        .unwrap();
        t1.block_diag(&t2)
    }

    #[test]
    fn f_null_matches_theta_product() {
        let tau = PointInHn::from_rows(
            &[vec![0.1, 0.2], vec![0.2, -0.3]],
            &[vec![1.0, 0.3], vec![0.3, 1.1]],
        )
        .unwrap();
        let v = eval_named_numeric(&NamedForm::f_null(2), &tau, 1e-12, 10).unwrap();
        let direct: Complex64 = even_characteristics(2)
            .iter()
            .map(|m| theta_numeric(m, &tau, 1e-15).unwrap())
            .product();
        assert!((v.value.to_complex() - direct).norm() < 1e-12);
        assert!(v.error_bound.abs() < 1e-12);
    }

    #[test]
    fn series_and_numeric_agree() {
        let tau = PointInHn::from_rows(
            &[vec![0.3, 0.1], vec![0.1, -0.2]],
            &[vec![1.5, 0.4], vec![0.4, 1.3]],
        )
        .unwrap();
        for form in [NamedForm::f_null(2), NamedForm::f1(2)] {
            let s = construct_named(&form, 96).unwrap();
            let partial = evaluate_series(&s, &tau);
            let v = eval_named_numeric(&form, &tau, 1e-12, 10).unwrap();
            let diff = (partial - v.value.to_complex()).norm();
            assert!(
                diff < 1e-9 * v.majorant.abs().max(1.0),
                "{}: {diff}",
                form.label
            );
        }
    }

    #[test]
    fn f_null_and_f1_vanish_on_reducible_points() {
        let tau = reducible_point();
        for form in [NamedForm::f_null(3), NamedForm::f1(3)] {
            let v = eval_named_numeric(&form, &tau, 1e-30, 10).unwrap();
            assert!(v.relative() < 1e-10, "{}: {}", form.label, v.relative());
        }
        let f12 = NamedForm::parse("F12", 3).unwrap();
        let v = eval_named_numeric(&f12, &tau, 1e-30, 100_000).unwrap();
        assert!(v.relative() > 1e-3, "{}", v.relative());
    }

    #[test]
    fn f12_at_diagonal_point_is_nonzero() {
        let i1 = PointInHn::imaginary_diagonal(&[1.0]).unwrap();
        // a non-diagonal block: χ₁₀ vanishes on the diagonal of H₂
        let i2 = PointInHn::from_rows(
            &[vec![0.0, 0.0], vec![0.0, 0.0]],
            &[vec![1.0, 0.5], vec![0.5, 1.0]],
        )
        .unwrap();
        let tau = i1.block_diag(&i2);
        let form = NumericForm::compile(&NamedForm::parse("F_{1,2}", 3).unwrap(), 100_000).unwrap();
        let v = form.evaluate(&tau, 1e-300).unwrap();
        assert!(!v.value.is_zero() && v.relative_error() < 1e-6);
        // equals C·θ[E₁](τ₁)⁸⁰·θ[E₂](τ₂)²⁴ with C the stabilizer order
        let t1 = theta_values(&i1, 1e-15).unwrap();
        let t2 = theta_values(&i2, 1e-15).unwrap();
        let p1: ExtComplex = even_characteristics(1)
            .iter()
            .map(|m| ExtComplex::new(t1.value(m)).powu(80))
            .product();
        let p2: ExtComplex = even_characteristics(2)
            .iter()
            .map(|m| ExtComplex::new(t2.value(m)).powu(24))
            .product();
        let expect = ExtComplex::from_real(form.stabilizer_order().unwrap() as f64) * p1 * p2;
        let rel = (v.value - expect).log2_abs() - expect.log2_abs();
        assert!(rel < -30.0, "{rel}");
    }

    #[test]
    fn chi10_flagged_on_the_diagonal() {
        let tau = PointInHn::imaginary_diagonal(&[1.0, 1.0]).unwrap();
        let form = NumericForm::compile(
            &NamedForm::theta_set_power(CharacteristicSet::even(2), 2),
            1,
        )
        .unwrap();
        let rep = scan_common_zeros(&[tau], std::slice::from_ref(&form), 1e-6).unwrap();
        assert_eq!(rep.flagged, vec![0]);
        assert!(scan_common_zeros(&[], &[form], 1e-6)
            .unwrap()
            .points
            .is_empty());
    }
}
