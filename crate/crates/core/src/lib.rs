//! Exact Fourier expansions and numerical evaluation of Siegel modular forms
//! built from theta constants, together with verifiers for formal
//! Fourier–Jacobi series and paramodular symmetry conditions.

pub mod arith;
pub mod chartheta;
pub mod coeff;
pub mod constructions;
pub mod error;
pub mod formal_fj;
pub mod paramodular;
pub mod qseries;

pub use coeff::GaussianRational;
pub use error::{Error, Result};
