//! Numerical tolerances shared by every module.
//!
//! All defaults live in [`Tolerances::default`] and the full table is echoed
//! into every report so runs can be reproduced.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative gap below which sorted eigenvalues are merged into one cluster.
    pub cluster_tol: f64,
    /// Jacobi stops once the off-diagonal norm drops below this fraction of the initial norm.
    pub jacobi_tol: f64,
    /// Rotation budget is `jacobi_budget_factor * n^2`.
    pub jacobi_budget_factor: usize,
    /// `|tr A| <= trace_tol * n * |A|` counts as trace-free.
    pub trace_tol: f64,
    /// Relative tolerance for "inequality holds" in randomized campaigns.
    pub inequality_tol: f64,
    /// Relative tolerance for pointwise equality detection on hypersurface samples.
    pub equality_tol: f64,
    /// `|Å| <= umbilic_tol` (relative to `max(1, |A|)`) marks an umbilic point.
    pub umbilic_tol: f64,
    /// Residual allowance for exact algebraic identities.
    pub identity_tol: f64,
    /// Residual allowance for identities evaluated by rank-4 contraction.
    pub tensor_tol: f64,
    /// Minimality allowance `|tr A| / (1 + |A|)` for claimed minimal fields.
    pub minimality_tol: f64,
    /// Allowed shape-operator change between steps h and h/2 in chart differentiation.
    pub fd_consistency_tol: f64,
    /// An energy counts as zero when below `energy_zero_tol * quadrature scale`.
    pub energy_zero_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cluster_tol: 1e-8,
            jacobi_tol: 1e-14,
            jacobi_budget_factor: 50,
            trace_tol: 1e-10,
            inequality_tol: 1e-12,
            equality_tol: 1e-10,
            umbilic_tol: 1e-10,
            identity_tol: 1e-10,
            tensor_tol: 1e-9,
            minimality_tol: 1e-8,
            fd_consistency_tol: 1e-5,
            energy_zero_tol: 1e-10,
        }
    }
}

/// Crate version embedded in reports.
pub const VERSION: &str = concat!("rigidity ", env!("CARGO_PKG_VERSION"));
