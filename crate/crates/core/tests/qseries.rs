use num_rational::BigRational;
use siegel_core::arith::ExponentMatrix;
use siegel_core::chartheta::{
    all_characteristics, theta_qexp, CharacteristicSet, ThetaCharacteristic,
};
use siegel_core::constructions::theta_set_power;
use siegel_core::qseries::{check_gl2_symmetry_full, is_cusp_qexp, SiegelFourierSeries};
use siegel_core::GaussianRational;

fn int(k: i64) -> GaussianRational {
    GaussianRational::from_integer(k)
}

#[test]
fn genus_one_theta_squared_counts_sums_of_two_squares() {
    // θ[(0;0)](τ)² = Σ r₂(k) q^k with q = e^{πiτ}: keys are E = 4k
    let m: ThetaCharacteristic = "0;0".parse().unwrap();
    let f = theta_qexp(&m, 48).pow(2);
    let r2 = [1, 4, 4, 0, 4, 8, 0, 0, 4, 4, 8, 0, 0];
    for (k, &c) in r2.iter().enumerate() {
        assert_eq!(
            f.coeff(&ExponentMatrix::diagonal(&[4 * k as i64])),
            int(c),
            "k = {k}"
        );
    }
}

#[test]
fn phi_of_a_genus_two_theta_constant() {
    // Φθ[(a1 a2; b1 b2)] = θ[(a1; b1)] when a2 = 0
    for m in all_characteristics(2).filter(|m| m.is_even()) {
        let f = theta_qexp(&m, 32);
        let phi = f.phi().unwrap();
        if m.a()[1] == 1 {
            assert!(phi.is_zero(), "{m}");
        } else {
            let low = ThetaCharacteristic::new(1, &m.a()[..1], &m.b()[..1]).unwrap();
            assert_eq!(phi, theta_qexp(&low, 32), "{m}");
        }
    }
}

#[test]
fn restriction_of_a_product_characteristic_is_a_tensor() {
    for m1 in all_characteristics(1).filter(|m| m.is_even()) {
        for m2 in all_characteristics(2).filter(|m| m.is_even()) {
            let m = m1.concat(&m2);
            let r = theta_qexp(&m, 24).restrict_block(1).unwrap();
            let t = theta_qexp(&m1, 24)
                .tensor(&theta_qexp(&m2, 24))
                .truncate(24);
            assert!(r.series().agrees_up_to(t.series(), 24), "{m}");
        }
    }
}

#[test]
fn restriction_is_multiplicative() {
    let a = theta_qexp(&"10;00".parse().unwrap(), 24);
    let b = theta_qexp(&"01;00".parse().unwrap(), 24);
    let lhs = a.mul(&b).unwrap().restrict_block(1).unwrap();
    let rhs = a
        .restrict_block(1)
        .unwrap()
        .mul(&b.restrict_block(1).unwrap())
        .unwrap();
    assert_eq!(lhs.series(), rhs.series());
}

#[test]
fn phi_is_multiplicative() {
    let a = theta_qexp(&"00;10".parse().unwrap(), 32);
    let b = theta_qexp(&"00;11".parse().unwrap(), 32);
    let lhs = a.mul(&b).unwrap().phi().unwrap();
    let rhs = a.phi().unwrap().mul(&b.phi().unwrap()).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn igusa_chi10_is_a_symmetric_cusp_form() {
    let chi = theta_set_power(&CharacteristicSet::even(2), 2, 40).unwrap();
    assert_eq!(chi.weight(), &BigRational::from_integer(10.into()));
    assert!(is_cusp_qexp(&chi).unwrap());
    assert!(check_gl2_symmetry_full(&chi, 10).unwrap().passed());
    // a(diag(1, 1)) = −2·a([[1, 1/2], [1/2, 1]]) for the Igusa cusp form
    let lead = chi.coeff(&ExponentMatrix::from_upper(2, &[8, 4, 8]));
    assert!(!lead.is_zero());
    let ratio = chi
        .coeff(&ExponentMatrix::from_upper(2, &[8, 0, 8]))
        .checked_div(&lead)
        .unwrap();
    assert_eq!(ratio, int(-2));
}

#[test]
fn graded_product_matches_the_absolute_one_on_common_range() {
    let m: ThetaCharacteristic = "10;00".parse().unwrap();
    let f = theta_qexp(&m, 40);
    let abs = f.pow(4);
    let graded = f.pow_graded(4);
    let top = abs.trunc().min(graded.trunc());
    assert!(abs.agrees_up_to(&graded, top));
}

#[test]
fn truncation_is_respected() {
    let mut s = SiegelFourierSeries::zero(1, BigRational::from_integer(0.into()), 16);
    assert!(s
        .add_term(ExponentMatrix::diagonal(&[24]), &int(1))
        .is_err());
    s.add_term(ExponentMatrix::diagonal(&[8]), &int(1)).unwrap();
    assert_eq!(s.square().len(), 1);
}
