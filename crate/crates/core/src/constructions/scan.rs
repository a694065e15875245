//! Seeded sampling of block-diagonal points and the common-zero scans for
//! the genus-3 and genus-4 cusp-form families.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::named::NamedForm;
use super::numeric::{NumericForm, NumericValue};
use crate::arith::{siegel_domain_contains, PointInHn};
use crate::chartheta::theta_values;
use crate::error::{Error, Result};

/// The compact box each diagonal block is drawn from.
///
/// Real parts lie in `[−½, ½]`; diagonal imaginary parts in `[y_lo, y_hi]`;
/// each off-diagonal imaginary entry is `ρ·min(y_ii, y_jj)/(2(n − 1))` with
/// `ρ ∈ [rho_lo, rho_hi]`, which keeps the block Minkowski-reduced and away
/// from the diagonal locus.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SampleBox {
    pub y_lo: f64,
    pub y_hi: f64,
    pub rho_lo: f64,
    pub rho_hi: f64,
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox {
            y_lo: 3.0,
            y_hi: 4.0,
            rho_lo: 0.8,
            rho_hi: 0.95,
        }
    }
}

/// Siegel-domain parameter every sampled block satisfies.
pub const SAMPLE_DOMAIN_PARAMETER: f64 = 2.0;

impl SampleBox {
    pub fn sample_block(&self, n: usize, rng: &mut ChaCha8Rng) -> PointInHn {
        let mut x = DMatrix::<f64>::zeros(n, n);
        let mut y = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            y[(i, i)] = rng.gen_range(self.y_lo..=self.y_hi);
        }
        for i in 0..n {
            for j in 0..=i {
                let v = rng.gen_range(-0.5..=0.5);
                x[(i, j)] = v;
                x[(j, i)] = v;
                if i != j {
                    let rho = rng.gen_range(self.rho_lo..=self.rho_hi);
                    let v = rho * y[(i, i)].min(y[(j, j)]) / (2.0 * (n - 1) as f64);
                    y[(i, j)] = v;
                    y[(j, i)] = v;
                }
            }
        }
        PointInHn::new(x, y).expect("box lies in the half space")
    }
}

/// `count` seeded points `diag(τ₁, …, τ_k)` with block sizes `blocks`.
pub fn reducible_sample_points(
    blocks: &[usize],
    count: usize,
    seed: u64,
    sample_box: &SampleBox,
) -> Vec<PointInHn> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut point: Option<PointInHn> = None;
            for &b in blocks {
                let block = sample_box.sample_block(b, &mut rng);
                debug_assert!(siegel_domain_contains(&block, SAMPLE_DOMAIN_PARAMETER));
                point = Some(match point {
                    None => block,
                    Some(p) => p.block_diag(&block),
                });
            }
            point.expect("at least one block")
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyPoint {
    pub index: usize,
    pub split: Vec<usize>,
    /// `log₁₀(|F| / scale_F)` for every form of the family, in order.
    pub log10_relative: Vec<f64>,
    /// `log₁₀` of the certified relative error bound for each form.
    pub log10_relative_error: Vec<f64>,
    pub vanishing_ok: bool,
    pub nonvanishing_ok: bool,
    /// Every form is below the vanishing threshold.
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyScanReport {
    pub genus: usize,
    pub forms: Vec<String>,
    pub orbit_sizes: Vec<Option<usize>>,
    pub stabilizer_orders: Vec<Option<String>>,
    pub sample_box: SampleBox,
    pub seed: u64,
    pub vanish_tol: f64,
    pub nonvanish_tol: f64,
    pub points: Vec<FamilyPoint>,
    pub flagged: Vec<usize>,
    pub passed: bool,
}

fn relative_log10(v: &NumericValue) -> f64 {
    let r = v.log10_relative();
    if r.is_finite() {
        r
    } else {
        -400.0
    }
}

struct FamilyCheck<'a> {
    forms: &'a [NumericForm],
    /// Forms that must vanish at every sampled point.
    must_vanish: Vec<usize>,
    /// At least one of these must be clearly nonzero.
    must_not_all_vanish: Vec<usize>,
}

fn run_family(
    genus: usize,
    check: FamilyCheck<'_>,
    splits: &[Vec<usize>],
    count: usize,
    seed: u64,
    sample_box: SampleBox,
    vanish_tol: f64,
    nonvanish_tol: f64,
) -> Result<FamilyScanReport> {
    let mut points = Vec::with_capacity(count * splits.len());
    for (k, split) in splits.iter().enumerate() {
        let taus = reducible_sample_points(split, count, seed.wrapping_add(k as u64), &sample_box);
        for tau in taus {
            let vals = theta_values(&tau, 1e-15)?;
            let values: Vec<NumericValue> = check
                .forms
                .iter()
                .map(|f| f.evaluate_values(&vals))
                .collect::<Result<_>>()?;
            let rel: Vec<f64> = values.iter().map(relative_log10).collect();
            let err: Vec<f64> = values.iter().map(|v| v.relative_error().log10()).collect();
            let lv = vanish_tol.log10();
            let ln = nonvanish_tol.log10();
            let vanishing_ok = check.must_vanish.iter().all(|&i| rel[i] < lv);
            // a nonvanishing claim needs the value to exceed its error bound too
            let nonvanishing_ok = check.must_not_all_vanish.is_empty()
                || check
                    .must_not_all_vanish
                    .iter()
                    .any(|&i| rel[i] > ln && err[i] < rel[i]);
            let flagged = rel.iter().all(|&r| r < lv);
            points.push(FamilyPoint {
                index: points.len(),
                split: split.clone(),
                log10_relative: rel,
                log10_relative_error: err,
                vanishing_ok,
                nonvanishing_ok,
                flagged,
            });
        }
    }
    let flagged: Vec<usize> = points
        .iter()
        .filter(|p| p.flagged)
        .map(|p| p.index)
        .collect();
    let passed = flagged.is_empty() && points.iter().all(|p| p.vanishing_ok && p.nonvanishing_ok);
    Ok(FamilyScanReport {
        genus,
        forms: check.forms.iter().map(|f| f.form().label.clone()).collect(),
        orbit_sizes: check.forms.iter().map(|f| f.orbit_size()).collect(),
        stabilizer_orders: check
            .forms
            .iter()
            .map(|f| f.stabilizer_order().map(|s| s.to_string()))
            .collect(),
        sample_box,
        seed,
        vanish_tol,
        nonvanish_tol,
        points,
        flagged,
        passed,
    })
}

/// The genus-3 family `F_null, F_1, F_{1,2}, F_{1,1,1}` on points of
/// `H₁ × H₂`: the first two must vanish, and the last two must not both.
pub fn acn3_scan(
    count: usize,
    seed: u64,
    budget: usize,
    sample_box: SampleBox,
) -> Result<FamilyScanReport> {
    let forms = vec![
        NumericForm::compile(&NamedForm::f_null(3), budget)?,
        NumericForm::compile(&NamedForm::f1(3), budget)?,
        NumericForm::compile(&NamedForm::parse("F12", 3)?, budget)?,
        NumericForm::compile(&NamedForm::parse("F111", 3)?, budget)?,
    ];
    let check = FamilyCheck {
        forms: &forms,
        must_vanish: vec![0, 1],
        must_not_all_vanish: vec![2, 3],
    };
    run_family(3, check, &[vec![1, 2]], count, seed, sample_box, 1e-6, 1e-3)
}

/// The genus-4 family `F_{1,3}, F_{1,3}*, F_{1,1,2}, F_{1,1,1,1}, F_{2,2}` on
/// points of `H₁ × H₃` and `H₂ × H₂`; a point is flagged when all five are
/// below `vanish_tol` relative to their scales.
pub fn acn4_scan(
    count: usize,
    seed: u64,
    budget: usize,
    sample_box: SampleBox,
) -> Result<FamilyScanReport> {
    let names = ["F13", "F13*", "F112", "F1111", "F22"];
    let forms: Vec<NumericForm> = names
        .iter()
        .map(|n| NumericForm::compile(&NamedForm::parse(n, 4)?, budget))
        .collect::<Result<_>>()?;
    let check = FamilyCheck {
        forms: &forms,
        must_vanish: vec![],
        must_not_all_vanish: (0..5).collect(),
    };
    run_family(
        4,
        check,
        &[vec![1, 3], vec![2, 2]],
        count,
        seed,
        sample_box,
        1e-6,
        1e-3,
    )
}

/// Validates a user-supplied split of the genus.
pub fn check_split(genus: usize, split: &[usize]) -> Result<()> {
    if split.iter().sum::<usize>() != genus || split.contains(&0) || split.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "{split:?} is not a proper split of genus {genus}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_reproducible_and_reduced() {
        let a = reducible_sample_points(&[1, 2], 5, 9, &SampleBox::default());
        let b = reducible_sample_points(&[1, 2], 5, 9, &SampleBox::default());
        assert_eq!(a, b);
        for block in [1usize, 2, 3] {
            let mut rng = ChaCha8Rng::seed_from_u64(block as u64);
            for _ in 0..50 {
                let p = SampleBox::default().sample_block(block, &mut rng);
                assert!(siegel_domain_contains(&p, SAMPLE_DOMAIN_PARAMETER));
            }
        }
    }

    #[test]
    fn small_acn3_scan_passes() {
        let r = acn3_scan(4, 1, 1_000_000, SampleBox::default()).unwrap();
        assert!(r.passed, "{:?}", r.points);
    }

    #[test]
    fn split_validation() {
        assert!(check_split(4, &[1, 3]).is_ok());
        assert!(check_split(4, &[4]).is_err());
        assert!(check_split(4, &[1, 2]).is_err());
    }
}
