//! Numerical verification of the sharp quartic inequality for trace-free
//! symmetric matrices, its Newton-inequality derivation, the hypersurface
//! Weyl-tensor identity, and rotational curvature energies evaluated on
//! constructed hypersurfaces.

pub mod catalog;
pub mod cli;
pub mod curvature;
pub mod energy;
pub mod error;
pub mod inequalities;
pub mod random;
pub mod spectral;
pub mod sum;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
