//! Symmetric matrices, Jacobi eigendecomposition and elementary symmetric
//! functions computed along two independent routes.

mod eigen;
mod matrix;
mod symfun;

pub use eigen::{eigen_spectrum, jacobi_eigen, EigenDecomposition, Spectrum};
pub use matrix::{Square, SymMatrix, MIN_DIM};
pub use symfun::{
    binomial, norms, shift_profile, symfun_from_power_sums, symfun_from_spectrum,
    trace_free_project, Norms, SymFunProfile,
};
