//! Sampled hypersurfaces: analytic rotation families, finite-difference
//! charts in flat space, and JSON field files.
//!
//! Every sample carries its shape operator in an orthonormal tangent frame
//! and a positive quadrature weight (cell measure times volume element).
//! Normals are oriented so that a round sphere of radius `r` has `A = I / r`.

mod chart;
mod io;
mod ode;
mod rotation;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{trace_free_project, SymMatrix};
use crate::tolerances::Tolerances;

pub use chart::{chart_shape_operator, default_fd_step, Chart};
pub use io::{field_from_json, field_to_json, ingest_field, write_field};
pub use ode::{rk4_integrate, rk4_step};
pub use rotation::{
    build_catenoid, build_catenoid_with_substeps, build_cylinder, build_rotation_hypersurface,
    build_sphere, default_catenoid_half_height, minimality_residual, sphere_volume, CatenoidProfile,
    PolynomialProfile, Profile, ProfileValue,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceKind {
    Sphere,
    Cylinder,
    RotationHypersurface,
    Catenoid,
    Chart,
    FieldFile,
}

/// Description of how a field was (or claims to have been) produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub n: usize,
    pub params: BTreeMap<String, f64>,
    pub grid: Vec<usize>,
    pub ambient_curvature: f64,
}

/// Minimum hypersurface dimension handled by the catalog.
pub const MIN_SURFACE_DIM: usize = 4;

/// Parameters that must be strictly positive whenever present.
const POSITIVE_PARAMS: &[&str] = &["r", "height", "half_height", "fd_step"];

impl SurfaceSpec {
    pub fn new(kind: SurfaceKind, n: usize, grid: Vec<usize>) -> Self {
        Self { kind, n, params: BTreeMap::new(), grid, ambient_curvature: 0.0 }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < MIN_SURFACE_DIM {
            return Err(Error::BadDimension(self.n, MIN_SURFACE_DIM));
        }
        if self.grid.is_empty() || self.grid.iter().any(|&g| g < 2) {
            return Err(Error::BadParams(format!("grid counts must be >= 2, got {:?}", self.grid)));
        }
        for (key, &value) in &self.params {
            if !value.is_finite() {
                return Err(Error::BadParams(format!("parameter {key} is not finite")));
            }
            let positive = POSITIVE_PARAMS.contains(&key.as_str()) || key.starts_with("axis");
            if positive && value <= 0.0 {
                return Err(Error::BadParams(format!("parameter {key} must be positive, got {value}")));
            }
        }
        if let (Some(lo), Some(hi)) = (self.param("t_min"), self.param("t_max")) {
            if lo >= hi {
                return Err(Error::BadParams(format!("domain bounds out of order: {lo} >= {hi}")));
            }
        }
        if self.kind != SurfaceKind::FieldFile && self.ambient_curvature != 0.0 {
            return Err(Error::BadParams(format!(
                "{:?} fields are built in flat space only (ambient_curvature = {})",
                self.kind, self.ambient_curvature
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub coords: Vec<f64>,
    pub shape_operator: SymMatrix,
    pub area_weight: f64,
    pub umbilic_flag: bool,
}

impl SamplePoint {
    pub fn new(coords: Vec<f64>, shape_operator: SymMatrix, area_weight: f64, tol: &Tolerances) -> Self {
        let umbilic_flag = is_umbilic(&shape_operator, tol.umbilic_tol);
        Self { coords, shape_operator, area_weight, umbilic_flag }
    }
}

/// `|Å| <= umbilic_tol * max(1, |A|)`.
pub fn is_umbilic(a: &SymMatrix, umbilic_tol: f64) -> bool {
    let tf = trace_free_project(a).frobenius_sq().sqrt();
    tf <= umbilic_tol * a.frobenius_sq().sqrt().max(1.0)
}

/// `|tr A| / (1 + |A|)`.
pub fn trace_ratio(a: &SymMatrix) -> f64 {
    a.trace().abs() / (1.0 + a.frobenius_sq().sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeField {
    pub spec: SurfaceSpec,
    pub samples: Vec<SamplePoint>,
    pub minimal_claimed: bool,
}

impl ShapeField {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn total_weight(&self) -> f64 {
        crate::sum::compensated_sum(self.samples.iter().map(|s| s.area_weight))
    }

    /// Checks every field invariant, naming the first offending sample.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::InvalidField("field has no samples".into()));
        }
        let n = self.spec.n;
        for (i, s) in self.samples.iter().enumerate() {
            let violation = |reason: String| Error::InvariantViolation { sample: i, reason };
            if s.shape_operator.n() != n {
                return Err(violation(format!(
                    "shape operator is {0}x{0}, field dimension is {n}",
                    s.shape_operator.n()
                )));
            }
            if !(s.area_weight > 0.0) || !s.area_weight.is_finite() {
                return Err(violation(format!("area weight {} is not positive", s.area_weight)));
            }
            if s.shape_operator.as_slice().iter().any(|v| !v.is_finite()) {
                return Err(violation("shape operator has non-finite entries".into()));
            }
            if s.coords.iter().any(|v| !v.is_finite()) {
                return Err(violation("coordinates are not finite".into()));
            }
            if self.minimal_claimed && trace_ratio(&s.shape_operator) > tol.minimality_tol {
                return Err(violation(format!(
                    "field claims minimality but |tr A|/(1+|A|) = {:e}",
                    trace_ratio(&s.shape_operator)
                )));
            }
        }
        Ok(())
    }
}

/// Midpoints of `count` equal cells on `[lo, hi]` and the cell width.
pub(crate) fn midpoints(lo: f64, hi: f64, count: usize) -> (Vec<f64>, f64) {
    let step = (hi - lo) / count as f64;
    ((0..count).map(|i| lo + (i as f64 + 0.5) * step).collect(), step)
}

/// Grid counts for `dims` directions; a single count is broadcast.
pub(crate) fn expand_grid(grid: &[usize], dims: usize) -> Result<Vec<usize>> {
    match grid.len() {
        1 => Ok(vec![grid[0]; dims]),
        len if len == dims => Ok(grid.to_vec()),
        len => Err(Error::BadParams(format!("expected 1 or {dims} grid counts, got {len}"))),
    }
}
