//! The eleven acceptance criteria, one line of output each. Runs without the
//! test harness so the lines are always printed; exits nonzero on failure.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siegel_core::arith::{
    jacobi_decompose, minkowski_min, ExponentMatrix, PointInHn, RationalSymmetricMatrix,
    UnimodularMatrix,
};
use siegel_core::chartheta::{
    all_characteristics, characteristic_counts, even_characteristics, integer_generators, orbits,
    theta_qexp, theta_values, CharacteristicSet, IntegerSymplectic,
};
use siegel_core::constructions::{
    acn3_scan, construct_named, delta_compare, theta_set_power, verify_f12_restriction, NamedForm,
    SampleBox,
};
use siegel_core::formal_fj::{
    assemble_formal_fourier, check_symmetric, fj_decompose, FourierTable,
};
use siegel_core::paramodular::{
    check_involution, check_strong_symmetry, default_strong_elements, exact_divisors,
    is_squarefree, make_atkin_lehner, mu, mu_index_action, ParamodularTable, Rational4,
    SignCharacter,
};
use siegel_core::qseries::{
    cuspidality_combinatorial, default_gl2_generators, is_cusp_qexp, SiegelFourierSeries,
};
use siegel_core::GaussianRational;

const THETA_TOL: f64 = 1e-14;
const TRANSFORMATION_REL_TOL: f64 = 1e-9;
const ORBIT_BUDGET: usize = 1_000_000;
const SEED: u64 = 2024;

struct Outcome {
    passed: bool,
    detail: String,
}

fn run(id: u32, name: &str, limit_s: u64, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= Duration::from_secs(limit_s);
    let ok = out.passed && in_time;
    println!(
        "criterion {id:>2} {}: {name} ({:.2} s of {limit_s} s{}) {}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        if in_time { "" } else { ", over time" },
        out.detail
    );
    ok
}

fn characteristic_combinatorics() -> Outcome {
    let expected = [(3, 1), (10, 6), (36, 28), (136, 120)];
    let mut ok = true;
    for (n, &(e, o)) in (1..=4).zip(expected.iter()) {
        let formula = (
            2u64.pow(n as u32 - 1) * (2u64.pow(n as u32) + 1),
            2u64.pow(n as u32 - 1) * (2u64.pow(n as u32) - 1),
        );
        ok &= characteristic_counts(n) == (e, o) && formula == (e, o);
    }
    for n in 1..=3 {
        let (e, o) = characteristic_counts(n);
        let blocks = orbits(n).unwrap();
        let mut sizes: Vec<u64> = blocks.iter().map(|b| b.len() as u64).collect();
        sizes.sort_unstable();
        ok &= sizes == vec![o, e];
        ok &= blocks
            .iter()
            .all(|b| b.iter().all(|m| m.is_even() == b[0].is_even()));
    }
    Outcome {
        passed: ok,
        detail: format!("counts {expected:?}"),
    }
}

fn odd_theta_vanishing() -> Outcome {
    let mut ok = true;
    let mut odd = 0;
    for n in 1..=2 {
        for m in all_characteristics(n) {
            let f = theta_qexp(&m, 16);
            if m.is_even() {
                ok &= !f.is_zero();
            } else {
                ok &= f.is_zero();
                odd += 1;
            }
        }
    }
    Outcome {
        passed: ok,
        detail: format!("{odd} odd characteristics vanish through trunc 16"),
    }
}

fn random_symplectic(n: usize, rng: &mut ChaCha8Rng) -> IntegerSymplectic {
    let gens = integer_generators(n);
    let mut g = IntegerSymplectic::identity(n);
    for _ in 0..rng.gen_range(1..=4) {
        let h = &gens[rng.gen_range(0..gens.len())];
        let h = if rng.gen_bool(0.5) {
            h.clone()
        } else {
            h.inverse()
        };
        g = g.mul(&h);
    }
    g
}

fn random_point(n: usize, rng: &mut ChaCha8Rng) -> PointInHn {
    let mut x = DMatrix::<f64>::zeros(n, n);
    let mut y = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        y[(i, i)] = rng.gen_range(0.9..1.4);
        for j in 0..=i {
            let v = rng.gen_range(-0.5..0.5);
            x[(i, j)] = v;
            x[(j, i)] = v;
        }
    }
    if n == 2 {
        let off = rng.gen_range(-0.3..0.3);
        y[(0, 1)] = off;
        y[(1, 0)] = off;
    }
    PointInHn::new(x, y).unwrap()
}

fn transformation_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut triples = 0;
    // triples where the unpermuted characteristic would give the wrong value
    let mut sensitive = 0;
    while triples < 20 {
        let n = 1 + triples % 2;
        let g = random_symplectic(n, &mut rng);
        let evens = even_characteristics(n);
        let m = evens[rng.gen_range(0..evens.len())];
        let tau = random_point(n, &mut rng);
        let (det, image) = g.act_on_point(&tau).unwrap();
        let before = theta_values(&tau, THETA_TOL).unwrap().value(&m).powu(8);
        let at_image = theta_values(&image, THETA_TOL).unwrap();
        let after = at_image.value(&g.mod2().act(&m)).powu(8);
        let expected = det.powu(4) * before;
        worst = worst.max((after - expected).norm() / expected.norm());
        let control = at_image.value(&m).powu(8);
        if (control - expected).norm() / expected.norm() > 1e-3 {
            sensitive += 1;
        }
        triples += 1;
    }
    Outcome {
        passed: worst <= TRANSFORMATION_REL_TOL && sensitive > 0,
        detail: format!("20 triples, worst relative error {worst:.2e}, {sensitive} sensitive to the characteristic action"),
    }
}

fn delta_identity() -> Outcome {
    let r = delta_compare(64).unwrap();
    let coefficients = r.trunc / 8 + 1;
    Outcome {
        passed: r.passed && coefficients >= 8 && r.mismatches.is_empty(),
        detail: format!(
            "F_null^8 = {} Δ on {coefficients} q-coefficients",
            r.constant.as_deref().unwrap_or("?")
        ),
    }
}

fn cuspidality() -> Outcome {
    let chi = theta_set_power(&CharacteristicSet::even(2), 2, 16).unwrap();
    let phi_zero = is_cusp_qexp(&chi).unwrap() && !chi.is_zero();
    let verdicts: Vec<Option<bool>> = (2..=3)
        .map(|n| {
            cuspidality_combinatorial(&CharacteristicSet::even(n), ORBIT_BUDGET)
                .unwrap()
                .is_cusp()
        })
        .collect();
    Outcome {
        passed: phi_zero && verdicts.iter().all(|v| *v == Some(true)),
        detail: format!("Φ(θ[E2]^2) = 0: {phi_zero}, combinatorial E2, E3: {verdicts:?}"),
    }
}

fn f12_restriction() -> Outcome {
    let r = verify_f12_restriction(16, 16).unwrap();
    Outcome {
        passed: r.passed,
        detail: format!(
            "literal through 16 ({} keys), window 16 above valuation {} ({} keys), constant {}",
            r.literal_nonzero_keys,
            r.valuation,
            r.window_nonzero_keys,
            r.product_constant.as_deref().unwrap_or("none")
        ),
    }
}

fn acn3_sampling() -> Outcome {
    let r = acn3_scan(100, SEED, ORBIT_BUDGET, SampleBox::default()).unwrap();
    Outcome {
        passed: r.passed && r.flagged.is_empty() && r.points.len() >= 100,
        detail: format!("{} points, {} flagged", r.points.len(), r.flagged.len()),
    }
}

fn schottky_form() -> Outcome {
    let form = NamedForm::f_t(4);
    let f = construct_named(&form, 8).unwrap();
    let weight_ok =
        form.weight == BigRational::from_integer(8.into()) && f.weight() == &form.weight;
    let cusp = is_cusp_qexp(&f).unwrap();
    Outcome {
        passed: weight_ok && cusp,
        detail: format!("weight {}, Φ(F_T) = 0 through trunc 8: {cusp}", form.weight),
    }
}

fn chi10_table(trunc: u64) -> ParamodularTable {
    let chi = theta_set_power(&CharacteristicSet::even(2), 2, trunc).unwrap();
    ParamodularTable::from_fourier(&FourierTable::from_series(&chi).unwrap(), 1).unwrap()
}

fn paramodular_suite() -> Outcome {
    let mut elements_ok = true;
    let mut count = 0;
    for n in (1..=30).filter(|&n| is_squarefree(n)) {
        for d in exact_divisors(n) {
            let v = make_atkin_lehner(n, d).unwrap();
            let m = v.element.matrix();
            let j = Rational4::standard_j();
            elements_ok &=
                m.mul(&j).mul(&m.transpose()) == j.scale(&BigRational::from_integer(d.into()));
            elements_ok &= v.element.mul(&v.element).projectively_in(n);
            count += 1;
        }
        for a in 0..4i64 {
            for c in 0..4i64 {
                for b in -3..=3i64 {
                    let e = ExponentMatrix::from_upper(2, &[8 * a, 4 * b, 8 * n as i64 * c]);
                    elements_ok &=
                        mu_index_action(&mu_index_action(&e, n).unwrap(), n).unwrap() == e;
                }
            }
        }
        elements_ok &= make_atkin_lehner(n, n).unwrap().element == mu(n);
    }
    let t = chi10_table(64);
    let chi = SignCharacter::trivial(1).unwrap();
    let elements = default_strong_elements(1).unwrap();
    let inv = check_involution(&t).unwrap();
    let strong = check_strong_symmetry(&t, 10, &chi, &elements).unwrap();
    let genuine_ok = inv.passed && inv.epsilon == Some(1) && strong.passed;
    let mut perturbations_caught = 0;
    let targets: Vec<ExponentMatrix> = [[8, 4, 16], [8, 0, 16], [16, 4, 24]]
        .iter()
        .map(|u| ExponentMatrix::from_upper(2, u))
        .collect();
    for e in &targets {
        let mut bad = t.clone();
        bad.set(e.clone(), &t.coeff(e) + &GaussianRational::one())
            .unwrap();
        let inv = check_involution(&bad).unwrap();
        let strong = check_strong_symmetry(&bad, 10, &chi, &elements).unwrap();
        let inv_caught = !inv.passed && (inv.violation.is_some() || inv.conflict.is_some());
        if inv_caught && !strong.passed && !strong.violations.is_empty() {
            perturbations_caught += 1;
        }
    }
    Outcome {
        passed: elements_ok && genuine_ok && perturbations_caught == targets.len(),
        detail: format!(
            "{count} pairs (N, d), χ10 table ε = {:?}, {perturbations_caught}/{} perturbations caught",
            inv.epsilon,
            targets.len()
        ),
    }
}

fn formal_fj_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let evens = even_characteristics(2);
    let mut round_trips = 0;
    for _ in 0..10 {
        let mut f = SiegelFourierSeries::one(2, 40);
        for _ in 0..2 * rng.gen_range(1..=3) {
            f = f
                .mul(&theta_qexp(&evens[rng.gen_range(0..evens.len())], 40))
                .unwrap();
        }
        let back = assemble_formal_fourier(&fj_decompose(&f).unwrap())
            .unwrap()
            .to_series()
            .unwrap();
        round_trips += usize::from(back == f);
    }
    let gens = default_gl2_generators();
    let chi10 = theta_set_power(&CharacteristicSet::even(2), 2, 48).unwrap();
    let mut eisenstein = SiegelFourierSeries::zero(2, BigRational::from_integer(4.into()), 48);
    for m in &evens {
        eisenstein = eisenstein.add(&theta_qexp(m, 48).pow(8)).unwrap();
    }
    let genuine = [
        (chi10.clone(), 10),
        (eisenstein.clone(), 4),
        (eisenstein.mul(&chi10).unwrap(), 14),
    ];
    let genuine_ok = genuine.iter().all(|(f, k)| {
        let t = assemble_formal_fourier(&fj_decompose(f).unwrap()).unwrap();
        check_symmetric(&t, *k, &gens).unwrap().passed()
    });
    let table = FourierTable::from_series(&chi10).unwrap();
    let injectable: Vec<ExponentMatrix> = table
        .iter()
        .map(|(e, _)| e.clone())
        .filter(|e| {
            gens.iter().any(|u| {
                let img = e.transform(u);
                img != *e && img.trace() as u64 <= table.trunc
            })
        })
        .collect();
    let detected = injectable
        .iter()
        .filter(|e| {
            let mut bad = table.clone();
            bad.set(
                (*e).clone(),
                &table.coeff(e) + &GaussianRational::from_integer(2),
            )
            .unwrap();
            !check_symmetric(&bad, 10, &gens).unwrap().passed()
        })
        .count();
    Outcome {
        passed: round_trips == 10
            && genuine_ok
            && detected == injectable.len()
            && !injectable.is_empty(),
        detail: format!(
            "{round_trips}/10 round trips, {detected}/{} injected violations detected",
            injectable.len()
        ),
    }
}

fn reduction_utilities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut invariant = 0;
    let mut exact = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=3);
        let b: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-3..=3)).collect();
        let q = rng.gen_range(1..=6);
        let rows: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let s: i64 = (0..n).map(|k| b[k * n + i] * b[k * n + j]).sum::<i64>()
                            + i64::from(i == j);
                        BigRational::new(s.into(), q.into())
                    })
                    .collect()
            })
            .collect();
        let v = RationalSymmetricMatrix::from_rows(rows).unwrap();
        let mut u = UnimodularMatrix::identity(n);
        for _ in 0..rng.gen_range(1..6) {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|r| {
                    (0..n)
                        .map(|c| {
                            if r == c {
                                if i == j && r == i {
                                    -1
                                } else {
                                    1
                                }
                            } else if r == i && c == j {
                                rng.gen_range(-2..=2)
                            } else {
                                0
                            }
                        })
                        .collect()
                })
                .collect();
            u = u.mul(&UnimodularMatrix::from_rows(&rows).unwrap());
        }
        invariant += usize::from(
            minkowski_min(&v.transform(&u).unwrap()).unwrap() == minkowski_min(&v).unwrap(),
        );
        exact += usize::from(jacobi_decompose(&v).unwrap().reconstruct() == v);
    }
    Outcome {
        passed: invariant == 1000 && exact == 1000,
        detail: format!("{invariant}/1000 invariant minima, {exact}/1000 exact reconstructions"),
    }
}

fn main() {
    let results = [
        run(
            1,
            "characteristic combinatorics",
            10,
            characteristic_combinatorics,
        ),
        run(2, "odd-theta vanishing", 5, odd_theta_vanishing),
        run(3, "transformation law numerics", 30, transformation_law),
        run(4, "Δ identity", 5, delta_identity),
        run(5, "cuspidality", 60, cuspidality),
        run(6, "block restriction of θ[E1×E2]^8", 600, f12_restriction),
        run(7, "genus-3 reducible-locus sampling", 1800, acn3_sampling),
        run(8, "Schottky form", 1800, schottky_form),
        run(9, "paramodular suite", 60, paramodular_suite),
        run(
            10,
            "formal Fourier-Jacobi round trips",
            60,
            formal_fj_round_trips,
        ),
        run(11, "reduction utilities", 10, reduction_utilities),
    ];
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i + 1)
        .collect();
    println!(
        "acceptance: {}/{} criteria pass",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
