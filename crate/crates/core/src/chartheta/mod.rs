//! Theta characteristics, the symplectic action on them, and theta constants.

mod characteristic;
mod orbit;
mod symplectic;
mod theta;

pub use characteristic::{
    all_characteristics, characteristic_counts, even_characteristics, CharacteristicSet, Parity,
    ThetaCharacteristic, MAX_GENUS,
};
pub use orbit::{explore_set_orbit, set_orbit, OrbitSearch, SetOrbit};
pub use symplectic::{
    generator_permutations, generators_mod2, integer_generators, orbits, sp2n_f2_order, sp_act,
    standard_j, IntegerSymplectic, SymplecticMod2,
};
pub use theta::{
    evaluate_series, even_values, shifted_lattice_vectors, theta_numeric, theta_qexp, theta_values,
    ThetaValues,
};
