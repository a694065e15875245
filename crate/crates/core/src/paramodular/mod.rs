//! The paramodular group `K(N)` of genus 2, its Atkin–Lehner extension and
//! the coefficient conditions of paramodular Fourier tables.

mod group;
mod table;

pub use group::{
    atkin_lehner_with, class_product_consistent, exact_divisors, is_exact_divisor, is_paramodular,
    is_squarefree, make_atkin_lehner, mu, prime_divisors, AtkinLehner, BezoutParameters, Rational4,
    ScaledSymplectic,
};
pub use table::{
    block_index_map, check_involution, check_strong_symmetry, default_strong_elements,
    generating_elements_small_level, in_index_lattice, involution_implies_strong, mu_index_action,
    GammaZeroStarElement, ImplicationReport, InvolutionReport, KeyPair, ParamodularTable,
    SignCharacter, StrongSymmetryReport, StrongViolation,
};
