//! Cogenus-one formal Fourier–Jacobi series of genus 2: per-index Jacobi
//! coefficient tables, conversion to and from Fourier tables, and the
//! coefficient checks a formal Siegel modular form has to satisfy.

mod expansion;
mod jacobi;

pub use expansion::{
    assemble_formal_fourier, check_symmetric, fj_decompose, FormalFJSeries, FourierTable,
};
pub use jacobi::{validate_jacobi, EllipticViolation, JacobiKey, JacobiReport, JacobiTable};
