//! Exact linear algebra, quadratic-form reduction and exponent enumeration.

mod enumerate;
mod ext;
mod matrix;
mod point;
mod reduction;

pub use enumerate::enumerate_psd_exponents;
pub use ext::ExtComplex;
pub use matrix::{bareiss_det, ExponentMatrix, RationalSymmetricMatrix, UnimodularMatrix};
pub use point::{float_jacobi, siegel_domain_contains, FloatJacobi, PointInHn};
pub use reduction::{
    is_positive_definite, jacobi_decompose, minkowski_min, reduce_gl2, short_vectors,
    JacobiDecomposition,
};
