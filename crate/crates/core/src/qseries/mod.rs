//! Exact algebra of trace-truncated Siegel Fourier expansions.

mod cusp;
mod series;
mod symmetry;

pub use cusp::{cuspidality_combinatorial, is_cusp_qexp, CuspVerdict};
pub use series::{BlockRestriction, SiegelFourierSeries};
pub use symmetry::{
    check_gl2_symmetry_full, check_gl_symmetry, default_gl2_generators, default_gl_generators,
    odd_stabilizer_gl2, SymmetryReport, SymmetryViolation,
};
