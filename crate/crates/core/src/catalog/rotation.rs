//! Rotation hypersurfaces `x(t, w) = (t, f(t) w)`, `w` on the unit sphere
//! `S^{n-1}`, in flat `R^{n+1}`.
//!
//! Principal curvatures are `1 / (f sqrt(1 + f'^2))` with multiplicity
//! `n - 1` (rotation directions first in the frame) and
//! `-f'' / (1 + f'^2)^{3/2}` along the profile (last). Samples live on a
//! `(t, phi)` grid where `phi` is the polar angle of `w`; the remaining
//! `S^{n-2}` factor is integrated in closed form into the weight.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{midpoints, trace_ratio, SamplePoint, ShapeField, SurfaceKind, SurfaceSpec};
use crate::catalog::ode::rk4_integrate;
use crate::error::{Error, Result};
use crate::spectral::SymMatrix;
use crate::tolerances::Tolerances;

/// Volume of the unit sphere `S^k`.
pub fn sphere_volume(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_volume(k - 2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValue {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

/// Profile curve `t -> f(t) > 0` with first and second derivatives.
pub trait Profile: Sync {
    fn eval(&self, t: f64) -> Result<ProfileValue>;

    /// Parameters recorded in the field's [`SurfaceSpec`].
    fn params(&self) -> Vec<(String, f64)> {
        Vec::new()
    }
}

/// `f(t) = sum c_i t^i` with exact derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialProfile {
    pub coeffs: Vec<f64>,
}

impl PolynomialProfile {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    fn horner(coeffs: impl DoubleEndedIterator<Item = f64>, t: f64) -> f64 {
        coeffs.rev().fold(0.0, |acc, c| acc * t + c)
    }
}

impl Profile for PolynomialProfile {
    fn eval(&self, t: f64) -> Result<ProfileValue> {
        let c = &self.coeffs;
        let f = Self::horner(c.iter().copied(), t);
        let df = Self::horner(c.iter().enumerate().skip(1).map(|(i, &ci)| i as f64 * ci), t);
        let d2f = Self::horner(
            c.iter().enumerate().skip(2).map(|(i, &ci)| (i * (i - 1)) as f64 * ci),
            t,
        );
        Ok(ProfileValue { f, df, d2f })
    }

    fn params(&self) -> Vec<(String, f64)> {
        self.coeffs.iter().enumerate().map(|(i, &c)| (format!("c{i}"), c)).collect()
    }
}

fn rotation_operator(n: usize, v: ProfileValue) -> Result<SymMatrix> {
    let w = 1.0 + v.df * v.df;
    let k_rot = 1.0 / (v.f * w.sqrt());
    let k_profile = -v.d2f / (w * w.sqrt());
    let mut diag = vec![k_rot; n];
    diag[n - 1] = k_profile;
    SymMatrix::from_diagonal(&diag)
}

/// Assembles samples on the `(t, phi)` grid, `t` outer.
fn assemble(
    n: usize,
    t_range: (f64, f64),
    grid: &[usize],
    tol: &Tolerances,
    per_t: impl Fn(f64) -> Result<(SymMatrix, f64)> + Sync,
) -> Result<Vec<SamplePoint>> {
    let (nt, nphi) = match grid {
        [nt, nphi] => (*nt, *nphi),
        [g] => (*g, *g),
        _ => return Err(Error::BadParams(format!("rotation fields need 1 or 2 grid counts, got {}", grid.len()))),
    };
    let (ts, dt) = midpoints(t_range.0, t_range.1, nt);
    let (phis, dphi) = midpoints(0.0, PI, nphi);
    // Angular weights are normalised so that they integrate the orbit
    // S^{n-1} exactly; every integrand here is constant along the orbit.
    let raw: Vec<f64> = phis.iter().map(|p| p.sin().powi(n as i32 - 2) * dphi).collect();
    let norm = sphere_volume(n - 1) / raw.iter().sum::<f64>();
    let rows: Vec<(SymMatrix, f64)> = ts.par_iter().map(|&t| per_t(t)).collect::<Result<_>>()?;
    let mut samples = Vec::with_capacity(nt * nphi);
    for (&t, (a, radial)) in ts.iter().zip(rows) {
        for (&phi, &ang) in phis.iter().zip(&raw) {
            let w = radial * dt * ang * norm;
            samples.push(SamplePoint::new(vec![t, phi], a.clone(), w, tol));
        }
    }
    Ok(samples)
}

/// Round sphere of radius `r`, sampled along its axis coordinate `z in (-r, r)`.
pub fn build_sphere(n: usize, r: f64, grid: &[usize], tol: &Tolerances) -> Result<ShapeField> {
    let spec = SurfaceSpec::new(SurfaceKind::Sphere, n, grid.to_vec()).with_param("r", r);
    spec.validate()?;
    let a = SymMatrix::identity(n)?.scaled(1.0 / r);
    let samples = assemble(n, (-r, r), grid, tol, |z| {
        Ok((a.clone(), r * (r * r - z * z).powf((n as f64 - 2.0) / 2.0)))
    })?;
    Ok(ShapeField { spec, samples, minimal_claimed: false })
}

/// `S^{n-1}(r) x [0, height]` with `A = diag(1/r, ..., 1/r, 0)`.
pub fn build_cylinder(n: usize, r: f64, height: f64, grid: &[usize], tol: &Tolerances) -> Result<ShapeField> {
    let spec = SurfaceSpec::new(SurfaceKind::Cylinder, n, grid.to_vec())
        .with_param("r", r)
        .with_param("height", height);
    spec.validate()?;
    let mut diag = vec![1.0 / r; n];
    diag[n - 1] = 0.0;
    let a = SymMatrix::from_diagonal(&diag)?;
    let radial = r.powi(n as i32 - 1);
    let samples = assemble(n, (0.0, height), grid, tol, |_| Ok((a.clone(), radial)))?;
    Ok(ShapeField { spec, samples, minimal_claimed: false })
}

/// Rotation hypersurface generated by `profile` over `t in [t_min, t_max]`.
pub fn build_rotation_hypersurface(
    n: usize,
    profile: &dyn Profile,
    t_min: f64,
    t_max: f64,
    grid: &[usize],
    tol: &Tolerances,
) -> Result<ShapeField> {
    let mut spec = SurfaceSpec::new(SurfaceKind::RotationHypersurface, n, grid.to_vec())
        .with_param("t_min", t_min)
        .with_param("t_max", t_max);
    for (k, v) in profile.params() {
        spec = spec.with_param(&k, v);
    }
    spec.validate()?;
    let samples = assemble(n, (t_min, t_max), grid, tol, |t| {
        let v = profile.eval(t)?;
        if !(v.f > 0.0) {
            return Err(Error::BadProfile(t));
        }
        let radial = v.f.powi(n as i32 - 1) * (1.0 + v.df * v.df).sqrt();
        Ok((rotation_operator(n, v)?, radial))
    })?;
    Ok(ShapeField { spec, samples, minimal_claimed: false })
}

/// Profile of the minimal rotation hypersurface through `f(0) = 1`,
/// `f'(0) = 0`, tabulated by RK4 on a uniform lattice `t = j h`.
///
/// `f''` is recovered from the integrated slope by a fourth-order central
/// difference, so the minimality of the resulting field measures the
/// integration error instead of restating the ODE.
#[derive(Debug, Clone)]
pub struct CatenoidProfile {
    n: usize,
    half_height: f64,
    substeps: usize,
    h: f64,
    values: Vec<[f64; 2]>,
}

impl CatenoidProfile {
    /// Lattice aligned with the midpoints of `cells` cells on
    /// `[-half_height, half_height]`, `substeps` ODE steps per half cell.
    pub fn new(n: usize, half_height: f64, cells: usize, substeps: usize) -> Result<Self> {
        if substeps == 0 || cells == 0 {
            return Err(Error::BadParams("catenoid needs at least one cell and one substep".into()));
        }
        let h = half_height / (cells * substeps) as f64;
        let steps = cells * substeps + 2;
        let m = n as f64 - 1.0;
        let values = rk4_integrate(|_, y: &[f64; 2]| [y[1], m * (1.0 + y[1] * y[1]) / y[0]], 0.0, [1.0, 0.0], h, steps);
        if values.iter().any(|y| !y[0].is_finite() || !y[1].is_finite() || y[0] <= 0.0) {
            return Err(Error::BadParams(format!(
                "catenoid profile blows up before half_height = {half_height}"
            )));
        }
        Ok(Self { n, half_height, substeps, h, values })
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    /// `(f, f')` at lattice index `j` (negative indices by symmetry).
    fn at(&self, j: i64) -> [f64; 2] {
        let y = self.values[j.unsigned_abs() as usize];
        if j < 0 {
            [y[0], -y[1]]
        } else {
            y
        }
    }

    /// Drift of the first integral `f^{n-1} / sqrt(1 + f'^2) = 1` over the lattice.
    pub fn first_integral_drift(&self) -> f64 {
        let m = self.n as i32 - 1;
        self.values
            .iter()
            .map(|y| (y[0].powi(m) / (1.0 + y[1] * y[1]).sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

impl Profile for CatenoidProfile {
    fn eval(&self, t: f64) -> Result<ProfileValue> {
        let pos = t / self.h;
        let j = pos.round();
        if (pos - j).abs() > 1e-6 || j.abs() as usize + 2 >= self.values.len() {
            return Err(Error::BadParams(format!("t = {t} is not on the catenoid lattice")));
        }
        let j = j as i64;
        let [f, df] = self.at(j);
        let d2f = (-self.at(j + 2)[1] + 8.0 * self.at(j + 1)[1] - 8.0 * self.at(j - 1)[1] + self.at(j - 2)[1])
            / (12.0 * self.h);
        Ok(ProfileValue { f, df, d2f })
    }

    fn params(&self) -> Vec<(String, f64)> {
        vec![
            ("half_height".into(), self.half_height),
            ("substeps".into(), self.substeps as f64),
        ]
    }
}

/// Largest `|tr A| / (1 + |A|)` over the field.
pub fn minimality_residual(field: &ShapeField) -> f64 {
    field.samples.iter().map(|s| trace_ratio(&s.shape_operator)).fold(0.0, f64::max)
}

/// Catenoid patch over `[-half_height, half_height]` with a fixed number of
/// ODE substeps per half grid cell. `minimal_claimed` is set when the
/// minimality residual is within `tol.minimality_tol`.
pub fn build_catenoid_with_substeps(
    n: usize,
    grid: &[usize],
    half_height: f64,
    substeps: usize,
    tol: &Tolerances,
) -> Result<ShapeField> {
    let cells = *grid.first().ok_or_else(|| Error::BadParams("empty grid".into()))?;
    let profile = CatenoidProfile::new(n, half_height, cells, substeps)?;
    let mut field = build_rotation_hypersurface(n, &profile, -half_height, half_height, grid, tol)?;
    field.spec.kind = SurfaceKind::Catenoid;
    field.spec.params.remove("t_min");
    field.spec.params.remove("t_max");
    field.minimal_claimed = minimality_residual(&field) <= tol.minimality_tol;
    Ok(field)
}

/// Default patch half-height `1/(n-1)`; the profile blows up near
/// `pi / (2(n-1))` for large `n` and later for small `n`.
pub fn default_catenoid_half_height(n: usize) -> f64 {
    1.0 / (n as f64 - 1.0)
}

/// Catenoid patch with step doubling until `|tr A| / (1 + |A|) <= profile_tol`
/// at every sample.
pub fn build_catenoid(n: usize, grid: &[usize], profile_tol: f64, tol: &Tolerances) -> Result<ShapeField> {
    const MAX_SUBSTEPS: usize = 1 << 12;
    let half_height = default_catenoid_half_height(n);
    let tol = Tolerances { minimality_tol: profile_tol, ..*tol };
    let mut best = f64::INFINITY;
    let mut substeps = 1;
    while substeps <= MAX_SUBSTEPS {
        let field = build_catenoid_with_substeps(n, grid, half_height, substeps, &tol)?;
        if field.minimal_claimed {
            return Ok(field);
        }
        best = best.min(minimality_residual(&field));
        substeps *= 2;
    }
    Err(Error::OdeStepFailure { tol: profile_tol, best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn polynomial_derivatives() {
        let p = PolynomialProfile::new(vec![1.0, 0.0, 1.0]);
        assert_eq!(p.eval(2.0).unwrap(), ProfileValue { f: 5.0, df: 4.0, d2f: 2.0 });
    }

    #[test]
    fn sphere_field() {
        let tol = Tolerances::default();
        let f = build_sphere(4, 1.0, &[32, 8], &tol).unwrap();
        assert!(f.samples.iter().all(|s| s.shape_operator == SymMatrix::identity(4).unwrap() && s.umbilic_flag));
        let vol = sphere_volume(4);
        assert!((f.total_weight() - vol).abs() / vol < 0.02);
        let half = build_sphere(4, 2.0, &[8, 4], &tol).unwrap();
        assert_eq!(half.samples[0].shape_operator.diagonal(), vec![0.5; 4]);
    }

    #[test]
    fn sphere_volume_converges_under_refinement() {
        let tol = Tolerances::default();
        for n in [4, 5] {
            let exact = sphere_volume(n);
            let err = |nt| (build_sphere(n, 1.0, &[nt, 8], &tol).unwrap().total_weight() - exact).abs();
            let (e1, e2) = (err(16), err(32));
            assert!(e2 <= 0.5 * e1, "n={n}: {e1:e} -> {e2:e}");
        }
    }

    #[test]
    fn cylinder_field() {
        let f = build_cylinder(4, 1.0, 2.0, &[4, 4], &Tolerances::default()).unwrap();
        assert_eq!(f.samples[0].shape_operator.diagonal(), vec![1.0, 1.0, 1.0, 0.0]);
        let exact = sphere_volume(3) * 2.0;
        assert!((f.total_weight() - exact).abs() / exact < 1e-3);
        assert!(matches!(build_cylinder(4, -1.0, 1.0, &[4, 4], &Tolerances::default()), Err(Error::BadParams(_))));
    }

    #[test]
    fn constant_profile_is_cylinder() {
        let tol = Tolerances::default();
        let rot = build_rotation_hypersurface(5, &PolynomialProfile::new(vec![2.0]), 0.0, 3.0, &[6, 5], &tol).unwrap();
        let cyl = build_cylinder(5, 2.0, 3.0, &[6, 5], &tol).unwrap();
        assert_eq!(rot.samples, cyl.samples);
    }

    #[test]
    fn bad_profile_rejected() {
        let p = PolynomialProfile::new(vec![-1.0, 0.0, 1.0]);
        let err = build_rotation_hypersurface(4, &p, -0.5, 0.5, &[4, 4], &Tolerances::default());
        assert!(matches!(err, Err(Error::BadProfile(_))));
    }

    #[test]
    fn catenoid_waist() {
        let tol = Tolerances::default();
        // odd cell count puts a sample at t = 0
        let field = build_catenoid(4, &[33, 4], 1e-8, &tol).unwrap();
        assert!(field.minimal_claimed);
        let waist = &field.samples[16 * 4];
        assert!(waist.coords[0].abs() < 1e-15);
        let d = waist.shape_operator.diagonal();
        assert!((d[0] - 1.0).abs() < 1e-12 && d[0] == d[1] && d[1] == d[2]);
        assert!((d[3] + 3.0).abs() < 1e-8);
    }

    #[test]
    fn catenoid_first_integral_and_blowup() {
        let p = CatenoidProfile::new(4, 1.0 / 3.0, 16, 8).unwrap();
        assert!(p.first_integral_drift() < 1e-9);
        assert!(CatenoidProfile::new(4, 0.9, 16, 8).is_err());
        assert!(p.eval(0.001).is_err());
    }

    #[test]
    fn step_control_failure() {
        let tol = Tolerances::default();
        assert!(matches!(build_catenoid(4, &[8, 4], 1e-30, &tol), Err(Error::OdeStepFailure { .. })));
    }
}
