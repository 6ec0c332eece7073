//! Shape operators of parametrized hypersurfaces in flat `R^{n+1}` by
//! central finite differences.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use super::{expand_grid, midpoints, SamplePoint, ShapeField, SurfaceKind, SurfaceSpec};
use crate::error::{Error, Result};
use crate::spectral::{Square, SymMatrix};
use crate::tolerances::Tolerances;

type ChartMap = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// An immersion of a parameter box in `R^n` into `R^{n+1}`.
pub struct Chart {
    n: usize,
    map: Box<ChartMap>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Multiplies the normal fixed by `det[J | nu] > 0`.
    orientation: f64,
    params: Vec<(String, f64)>,
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chart")
            .field("n", &self.n)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("orientation", &self.orientation)
            .finish_non_exhaustive()
    }
}

/// Unit vector of `S^k` in hyperspherical angles, `angles.len() == k`.
fn hyperspherical(angles: &[f64]) -> Vec<f64> {
    let k = angles.len();
    let mut out = Vec::with_capacity(k + 1);
    let mut prefix = 1.0;
    for &a in angles {
        out.push(prefix * a.cos());
        prefix *= a.sin();
    }
    out.push(prefix);
    out
}

/// Box for hyperspherical angles: polar angles in `[margin, pi - margin]`,
/// the last angle over a full turn.
fn angle_box(k: usize, margin: f64) -> (Vec<f64>, Vec<f64>) {
    let mut lower = vec![margin; k];
    let mut upper = vec![PI - margin; k];
    lower[k - 1] = 0.0;
    upper[k - 1] = TAU;
    (lower, upper)
}

impl Chart {
    pub fn new(
        n: usize,
        map: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        if lower.len() != n || upper.len() != n {
            return Err(Error::DimensionMismatch(n, lower.len().max(upper.len())));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::BadParams("chart domain bounds must be finite and ordered".into()));
        }
        Ok(Self { n, map: Box::new(map), lower, upper, orientation: 1.0, params: Vec::new() })
    }

    /// Ellipsoid `sum (x_i / a_i)^2 = 1` in `R^{n+1}`, `n = semi_axes.len() - 1`,
    /// over a hyperspherical patch whose polar angles avoid the poles by `margin`.
    pub fn ellipsoid(semi_axes: &[f64], margin: f64) -> Result<Self> {
        if semi_axes.len() < 2 || semi_axes.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::BadParams("semi-axes must be positive".into()));
        }
        let n = semi_axes.len() - 1;
        let axes = semi_axes.to_vec();
        let (lower, upper) = angle_box(n, margin);
        let mut chart = Chart::new(
            n,
            move |u| hyperspherical(u).iter().zip(&axes).map(|(x, a)| a * x).collect(),
            lower,
            upper,
        )?;
        chart.orientation = if n % 2 == 0 { -1.0 } else { 1.0 };
        chart.params = semi_axes.iter().enumerate().map(|(i, &a)| (format!("axis{i}"), a)).collect();
        chart.params.push(("margin".into(), margin));
        Ok(chart)
    }

    pub fn sphere(n: usize, r: f64, margin: f64) -> Result<Self> {
        let mut chart = Chart::ellipsoid(&vec![r; n + 1], margin)?;
        chart.params = vec![("r".into(), r), ("margin".into(), margin)];
        Ok(chart)
    }

    /// `S^{n-1}(r) x [0, height]`; coordinates are `n - 1` angles, then height.
    pub fn cylinder(n: usize, r: f64, height: f64, margin: f64) -> Result<Self> {
        if !(r > 0.0) || !(height > 0.0) {
            return Err(Error::BadParams("cylinder radius and height must be positive".into()));
        }
        let (mut lower, mut upper) = angle_box(n - 1, margin);
        lower.push(0.0);
        upper.push(height);
        let mut chart = Chart::new(
            n,
            move |u| {
                let mut x: Vec<f64> = hyperspherical(&u[..u.len() - 1]).iter().map(|v| r * v).collect();
                x.push(u[u.len() - 1]);
                x
            },
            lower,
            upper,
        )?;
        chart.orientation = if n % 2 == 0 { -1.0 } else { 1.0 };
        chart.params = vec![("r".into(), r), ("height".into(), height), ("margin".into(), margin)];
        Ok(chart)
    }

    /// Same chart composed with an ambient orthogonal map `x -> Q x`.
    pub fn rotated(self, q: Square) -> Result<Self> {
        if q.n() != self.n + 1 {
            return Err(Error::DimensionMismatch(self.n + 1, q.n()));
        }
        let inner = self.map;
        let det_sign = determinant(&q).signum();
        Ok(Chart {
            map: Box::new(move |u| {
                let x = inner(u);
                (0..x.len()).map(|i| (0..x.len()).map(|j| q.get(i, j) * x[j]).sum()).collect()
            }),
            orientation: self.orientation * det_sign,
            ..self
        })
    }

    /// Flips the normal, negating every shape operator.
    pub fn flipped(mut self) -> Self {
        self.orientation = -self.orientation;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn domain_scale(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).fold(0.0, f64::max)
    }

    /// Shape operator in an orthonormal tangent frame and `sqrt(det g)` at `u`.
    fn local_geometry(&self, u: &[f64], h: f64) -> Option<(SymMatrix, f64)> {
        let n = self.n;
        let eval = |offsets: &[(usize, f64)]| {
            let mut p = u.to_vec();
            for &(i, d) in offsets {
                p[i] += d;
            }
            (self.map)(&p)
        };
        let x0 = (self.map)(u);
        let plus: Vec<Vec<f64>> = (0..n).map(|i| eval(&[(i, h)])).collect();
        let minus: Vec<Vec<f64>> = (0..n).map(|i| eval(&[(i, -h)])).collect();
        let dim = x0.len();
        let jac: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..dim).map(|k| (plus[i][k] - minus[i][k]) / (2.0 * h)).collect())
            .collect();
        let mut second = vec![vec![vec![0.0; dim]; n]; n];
        for i in 0..n {
            second[i][i] = (0..dim).map(|k| (plus[i][k] - 2.0 * x0[k] + minus[i][k]) / (h * h)).collect();
            for j in (i + 1)..n {
                let pp = eval(&[(i, h), (j, h)]);
                let pm = eval(&[(i, h), (j, -h)]);
                let mp = eval(&[(i, -h), (j, h)]);
                let mm = eval(&[(i, -h), (j, -h)]);
                let d: Vec<f64> = (0..dim).map(|k| (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h)).collect();
                second[j][i] = d.clone();
                second[i][j] = d;
            }
        }

        // g = J^T J = R^T R
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = dot(&jac[i], &jac[j]);
            }
        }
        let r = cholesky_upper(&g, n)?;
        let sqrt_det = (0..n).map(|i| r[i * n + i]).product::<f64>();

        let mut normal = normal_complement(&jac)?;
        let mut frame = Square::from_row_major(dim, vec![0.0; dim * dim]);
        for (c, col) in jac.iter().chain(std::iter::once(&normal)).enumerate() {
            for (row, v) in col.iter().enumerate() {
                frame.set(row, c, *v);
            }
        }
        let sign = determinant(&frame).signum() * self.orientation;
        normal.iter_mut().for_each(|v| *v *= sign);

        let second_form: Vec<f64> = (0..n * n).map(|ij| dot(&second[ij / n][ij % n], &normal)).collect();
        // A = R^{-T} II R^{-1}
        let m = solve_upper_transpose(&r, &second_form, n);
        let mt: Vec<f64> = (0..n * n).map(|ij| m[(ij % n) * n + ij / n]).collect();
        let a_t = solve_upper_transpose(&r, &mt, n);
        let a = SymMatrix::from_upper_fn(n, |i, j| 0.5 * (a_t[i * n + j] + a_t[j * n + i])).ok()?;
        Some((a, sqrt_det))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Upper-triangular `R` with `R^T R = g`; `None` if `g` is not positive definite.
fn cholesky_upper(g: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut r = vec![0.0; n * n];
    let max_diag = (0..n).map(|i| g[i * n + i]).fold(0.0, f64::max);
    for j in 0..n {
        let mut d = g[j * n + j];
        for k in 0..j {
            d -= r[k * n + j] * r[k * n + j];
        }
        if !(d > 1e-12 * max_diag) {
            return None;
        }
        let rjj = d.sqrt();
        r[j * n + j] = rjj;
        for i in (j + 1)..n {
            let mut s = g[j * n + i];
            for k in 0..j {
                s -= r[k * n + j] * r[k * n + i];
            }
            r[j * n + i] = s / rjj;
        }
    }
    Some(r)
}

/// Solves `R^T X = B` column by column (forward substitution), `B` row-major `n x n`.
fn solve_upper_transpose(r: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n * n];
    for col in 0..n {
        for i in 0..n {
            let mut s = b[i * n + col];
            for k in 0..i {
                s -= r[k * n + i] * x[k * n + col];
            }
            x[i * n + col] = s / r[i * n + i];
        }
    }
    x
}

/// Unit vector orthogonal to the columns of the Jacobian (modified
/// Gram–Schmidt, then the standard basis vector with the largest residual).
fn normal_complement(jac: &[Vec<f64>]) -> Option<Vec<f64>> {
    let dim = jac[0].len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(jac.len());
    for col in jac {
        let mut v = col.clone();
        for b in &basis {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let norm = dot(&v, &v).sqrt();
        if !(norm > 0.0) {
            return None;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..dim {
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if best.as_ref().map_or(true, |(bn, _)| norm > *bn) {
            best = Some((norm, v));
        }
    }
    let (norm, mut v) = best?;
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

/// Determinant by partial-pivot elimination.
fn determinant(m: &Square) -> f64 {
    let n = m.n();
    let mut a: Vec<f64> = (0..n * n).map(|ij| m.get(ij / n, ij % n)).collect();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs())).unwrap();
        if a[p * n + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..n {
                a.swap(p * n + k, c * n + k);
            }
            det = -det;
        }
        det *= a[c * n + c];
        for i in (c + 1)..n {
            let f = a[i * n + c] / a[c * n + c];
            for k in c..n {
                a[i * n + k] -= f * a[c * n + k];
            }
        }
    }
    det
}

/// `eps^{1/4}` times the widest domain extent.
pub fn default_fd_step(chart: &Chart) -> f64 {
    f64::EPSILON.powf(0.25) * chart.domain_scale()
}

/// Samples the chart at the midpoints of a tensor-product grid (row-major,
/// last coordinate fastest). Each shape operator is recomputed with step
/// `fd_step / 2`; a change above `tol.fd_consistency_tol * (1 + |A|)` is
/// reported as [`Error::StepTooLarge`].
pub fn chart_shape_operator(
    chart: &Chart,
    grid: &[usize],
    fd_step: Option<f64>,
    tol: &Tolerances,
) -> Result<ShapeField> {
    let n = chart.n;
    let counts = expand_grid(grid, n)?;
    let h = fd_step.unwrap_or_else(|| default_fd_step(chart));
    let mut spec = SurfaceSpec::new(SurfaceKind::Chart, n, counts.clone()).with_param("fd_step", h);
    for (k, v) in &chart.params {
        spec = spec.with_param(k, *v);
    }
    spec.validate()?;

    let axes: Vec<(Vec<f64>, f64)> =
        (0..n).map(|i| midpoints(chart.lower[i], chart.upper[i], counts[i])).collect();
    let cell: f64 = axes.iter().map(|(_, d)| d).product();
    let total: usize = counts.iter().product();

    let samples = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut u = vec![0.0; n];
            for i in (0..n).rev() {
                u[i] = axes[i].0[rem % counts[i]];
                rem /= counts[i];
            }
            let (a, sqrt_det) = chart.local_geometry(&u, h).ok_or(Error::DegenerateChart(flat))?;
            let (a_half, _) = chart.local_geometry(&u, 0.5 * h).ok_or(Error::DegenerateChart(flat))?;
            let discrepancy = a.max_abs_diff(&a_half) / (1.0 + a.frobenius_sq().sqrt());
            if discrepancy > tol.fd_consistency_tol {
                return Err(Error::StepTooLarge { sample: flat, discrepancy });
            }
            Ok(SamplePoint::new(u, a, sqrt_det * cell, tol))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShapeField { spec, samples, minimal_claimed: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_cholesky() {
        let q = Square::from_row_major(3, vec![2.0, 0.0, 1.0, 1.0, 3.0, 0.0, 0.0, 1.0, 4.0]);
        assert!((determinant(&q) - 25.0).abs() < 1e-12);
        let g = vec![4.0, 2.0, 2.0, 3.0];
        let r = cholesky_upper(&g, 2).unwrap();
        assert_eq!(r, vec![2.0, 1.0, 0.0, 2.0_f64.sqrt()]);
        assert!(cholesky_upper(&[1.0, 1.0, 1.0, 1.0], 2).is_none());
    }

    #[test]
    fn sphere_chart_orientation() {
        let tol = Tolerances::default();
        for n in [4, 5] {
            let f = chart_shape_operator(&Chart::sphere(n, 2.0, 0.4).unwrap(), &[3], None, &tol).unwrap();
            for s in &f.samples {
                let target = SymMatrix::identity(n).unwrap().scaled(0.5);
                assert!(s.shape_operator.max_abs_diff(&target) < 1e-6, "n={n}: {:?}", s.shape_operator);
            }
        }
    }

    #[test]
    fn cylinder_chart_orientation() {
        let tol = Tolerances::default();
        for n in [4, 5] {
            let f = chart_shape_operator(&Chart::cylinder(n, 1.5, 1.0, 0.4).unwrap(), &[3], None, &tol).unwrap();
            let mut diag = vec![1.0 / 1.5; n];
            diag[n - 1] = 0.0;
            let target = SymMatrix::from_diagonal(&diag).unwrap();
            for s in &f.samples {
                assert!(s.shape_operator.max_abs_diff(&target) < 1e-6, "n={n}");
            }
        }
    }

    #[test]
    fn degenerate_chart() {
        let flat = Chart::new(4, |u| vec![u[0], u[0], u[2], u[3], 0.0], vec![0.0; 4], vec![1.0; 4]).unwrap();
        let err = chart_shape_operator(&flat, &[2], Some(1e-3), &Tolerances::default());
        assert!(matches!(err, Err(Error::DegenerateChart(0))));
    }

    #[test]
    fn oversized_step_detected() {
        let err = chart_shape_operator(&Chart::sphere(4, 1.0, 0.4).unwrap(), &[2], Some(0.5), &Tolerances::default());
        assert!(matches!(err, Err(Error::StepTooLarge { .. })));
    }
}
