//! Pointwise algebraic curvature tensors in an orthonormal frame (`g = I`):
//! Kulkarni–Nomizu products, the Fialkow tensor and the Weyl tensor of a
//! hypersurface assembled from its trace-free shape operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequalities::{check_min_dim, check_trace_free};
use crate::spectral::{norms, Square, SymMatrix};
use crate::tolerances::Tolerances;

/// Symmetric bilinear form at a point, in an orthonormal frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymBilinear(pub SymMatrix);

impl SymBilinear {
    pub fn metric(n: usize) -> Result<Self> {
        Ok(Self(SymMatrix::identity(n)?))
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.0
    }
}

impl From<SymMatrix> for SymBilinear {
    fn from(m: SymMatrix) -> Self {
        Self(m)
    }
}

/// Rank-4 tensor stored flat, index `((a n + b) n + c) n + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgCurvTensor {
    n: usize,
    data: Vec<f64>,
}

impl AlgCurvTensor {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n.pow(4)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.n + b) * self.n + c) * self.n + d
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[self.idx(a, b, c, d)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Full contraction `sum T_abcd²`, no combinatorial prefactor.
    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn inner(&self, other: &AlgCurvTensor) -> f64 {
        self.data.iter().zip(&other.data).map(|(x, y)| x * y).sum()
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &AlgCurvTensor, beta: f64) -> Result<AlgCurvTensor> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(AlgCurvTensor {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(x, y)| alpha * x + beta * y).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &AlgCurvTensor) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
    }

    /// Largest violation of `T_abcd = -T_bacd`, `T_abcd = -T_abdc` and `T_abcd = T_cdab`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let t = self.get(a, b, c, d);
                        worst = worst
                            .max((t + self.get(b, a, c, d)).abs())
                            .max((t + self.get(a, b, d, c)).abs())
                            .max((t - self.get(c, d, a, b)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest `|T_abcd + T_bcad + T_cabd|`.
    pub fn bianchi_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let s = self.get(a, b, c, d) + self.get(b, c, a, d) + self.get(c, a, b, d);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Contraction `sum_a T_abad` (first with third index).
    pub fn trace_13(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        (0..n)
            .map(|b| (0..n).map(|d| (0..n).map(|a| self.get(a, b, a, d)).sum()).collect())
            .collect()
    }

    /// `T'_abcd = Q_ai Q_bj Q_ck Q_dl T_ijkl`, one index at a time.
    pub fn rotated(&self, q: &Square) -> Result<AlgCurvTensor> {
        let n = self.n;
        if q.n() != n {
            return Err(Error::DimensionMismatch(n, q.n()));
        }
        let mut cur = self.data.clone();
        let strides = [n * n * n, n * n, n, 1];
        for &stride in &strides {
            let mut next = vec![0.0; cur.len()];
            for (flat, out) in next.iter_mut().enumerate() {
                let slot = (flat / stride) % n;
                let base = flat - slot * stride;
                *out = (0..n).map(|i| q.get(slot, i) * cur[base + i * stride]).sum();
            }
            cur = next;
        }
        Ok(AlgCurvTensor { n, data: cur })
    }
}

/// `(S ∧ T)_abcd = S_ac T_bd + S_bd T_ac - S_ad T_bc - S_bc T_ad`.
pub fn kulkarni_nomizu(s: &SymBilinear, t: &SymBilinear) -> Result<AlgCurvTensor> {
    let n = s.n();
    if t.n() != n {
        return Err(Error::DimensionMismatch(n, t.n()));
    }
    let mut out = AlgCurvTensor::zeros(n);
    let mut flat = 0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    out.data[flat] = s.get(a, c) * t.get(b, d) + s.get(b, d) * t.get(a, c)
                        - s.get(a, d) * t.get(b, c)
                        - s.get(b, c) * t.get(a, d);
                    flat += 1;
                }
            }
        }
    }
    Ok(out)
}

/// Fialkow tensor `F = (Å² - G I)/(n - 2)` and its trace `G = |Å|²/(2(n - 1))`.
pub fn fialkow_tensor(a: &SymMatrix, tol: &Tolerances) -> Result<(SymBilinear, f64)> {
    let n = a.n();
    check_min_dim(n, 4)?;
    check_trace_free(&norms(a), tol)?;
    let g = a.frobenius_sq() / (2.0 * (n as f64 - 1.0));
    let f = a.square().shifted(-g).scaled(1.0 / (n as f64 - 2.0));
    Ok((SymBilinear(f), g))
}

/// `W = ½ Å∧Å + F∧g`.
pub fn weyl_from_gauss_codazzi(a: &SymMatrix, tol: &Tolerances) -> Result<AlgCurvTensor> {
    let (f, _) = fialkow_tensor(a, tol)?;
    let a_form = SymBilinear(a.clone());
    let g = SymBilinear::metric(a.n())?;
    kulkarni_nomizu(&a_form, &a_form)?.combine(0.5, &kulkarni_nomizu(&f, &g)?, 1.0)
}

/// `|W|² = 2(n²-3n+3)/((n-1)(n-2)) |Å|⁴ - 2n/(n-2) |Å²|²`.
pub fn weyl_norm_closed_form(frob_sq: f64, square_frob_sq: f64, n: usize) -> Result<f64> {
    check_min_dim(n, 4)?;
    let nf = n as f64;
    let c4 = 2.0 * (nf * nf - 3.0 * nf + 3.0) / ((nf - 1.0) * (nf - 2.0));
    Ok(c4 * frob_sq * frob_sq - 2.0 * nf / (nf - 2.0) * square_frob_sq)
}

/// Residuals (direct contraction minus closed form) of
///
/// 1. `|Å∧Å|² = 8|Å|⁴ - 8|Å²|²`
/// 2. `<Å∧Å, F∧g> = -8<Å², F>`
/// 3. `|F∧g|² = 4<Å², F>`
/// 4. `<Å², F> = |Å²|²/(n-2) - |Å|⁴/(2(n-1)(n-2))`
pub fn kn_identity_suite(a: &SymMatrix, tol: &Tolerances) -> Result<[f64; 4]> {
    let n = a.n();
    let (f, _) = fialkow_tensor(a, tol)?;
    let nm = norms(a);
    let a_form = SymBilinear(a.clone());
    let aa = kulkarni_nomizu(&a_form, &a_form)?;
    let fg = kulkarni_nomizu(&f, &SymBilinear::metric(n)?)?;
    let a2_f = a.square().dot(f.matrix());
    let a4 = nm.frob_sq * nm.frob_sq;
    let nf = n as f64;
    Ok([
        aa.norm_sq() - (8.0 * a4 - 8.0 * nm.square_frob_sq),
        aa.inner(&fg) + 8.0 * a2_f,
        fg.norm_sq() - 4.0 * a2_f,
        a2_f - (nm.square_frob_sq / (nf - 2.0) - a4 / (2.0 * (nf - 1.0) * (nf - 2.0))),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> SymMatrix {
        SymMatrix::from_diagonal(d).unwrap()
    }

    /// Quadruple-loop reference with the metric written out explicitly.
    fn kn_reference(s: &SymMatrix, t: &SymMatrix, a: usize, b: usize, c: usize, d: usize) -> f64 {
        s.get(a, c) * t.get(b, d) + s.get(b, d) * t.get(a, c) - s.get(a, d) * t.get(b, c) - s.get(b, c) * t.get(a, d)
    }

    #[test]
    fn identity_wedge_identity() {
        let g = SymBilinear::metric(4).unwrap();
        let t = kulkarni_nomizu(&g, &g).unwrap();
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let expect = 2.0 * (delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c));
                        assert_eq!(t.get(a, b, c, d), expect);
                    }
                }
            }
        }
        assert_eq!(t.norm_sq(), 96.0);
        assert_eq!(t.symmetry_defect(), 0.0);
        assert_eq!(t.bianchi_defect(), 0.0);
    }

    #[test]
    fn signature_form_against_loop() {
        let s = diag(&[1.0, 1.0, -1.0, -1.0]);
        let t = SymMatrix::identity(4).unwrap();
        let kn = kulkarni_nomizu(&s.clone().into(), &t.clone().into()).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        assert_eq!(kn.get(a, b, c, d), kn_reference(&s, &t, a, b, c, d));
                    }
                }
            }
        }
        let swapped = kulkarni_nomizu(&t.into(), &s.into()).unwrap();
        assert_eq!(kn, swapped);
    }

    #[test]
    fn dimension_mismatch() {
        let a = SymBilinear::metric(4).unwrap();
        let b = SymBilinear::metric(5).unwrap();
        assert!(matches!(kulkarni_nomizu(&a, &b), Err(Error::DimensionMismatch(4, 5))));
    }

    #[test]
    fn fialkow_examples() {
        let tol = Tolerances::default();
        let (f, g) = fialkow_tensor(&diag(&[1.0, 1.0, -1.0, -1.0]), &tol).unwrap();
        assert!((g - 2.0 / 3.0).abs() < 1e-15);
        for i in 0..4 {
            assert!((f.get(i, i) - 1.0 / 6.0).abs() < 1e-15);
        }
        assert!((f.matrix().trace() - g).abs() < 1e-15);

        let (f, g) = fialkow_tensor(&diag(&[1.0, 1.0, 1.0, -3.0]), &tol).unwrap();
        assert_eq!(g, 2.0);
        assert_eq!(f.matrix().diagonal(), vec![-0.5, -0.5, -0.5, 3.5]);
        assert_eq!(f.matrix().trace(), g);

        let (f, g) = fialkow_tensor(&SymMatrix::zeros(4).unwrap(), &tol).unwrap();
        assert_eq!(g, 0.0);
        assert_eq!(f.matrix().max_abs(), 0.0);
        assert!(matches!(
            fialkow_tensor(&SymMatrix::identity(4).unwrap(), &tol),
            Err(Error::NotTraceFree { .. })
        ));
    }

    #[test]
    fn weyl_examples() {
        let tol = Tolerances::default();
        let w0 = weyl_from_gauss_codazzi(&SymMatrix::zeros(4).unwrap(), &tol).unwrap();
        assert_eq!(w0.max_abs(), 0.0);
        let w = weyl_from_gauss_codazzi(&diag(&[1.0, 1.0, -1.0, -1.0]), &tol).unwrap();
        assert!((w.norm_sq() - 64.0 / 3.0).abs() < 1e-12);
        assert!((weyl_norm_closed_form(4.0, 4.0, 4).unwrap() - 64.0 / 3.0).abs() < 1e-12);
        assert_eq!(weyl_norm_closed_form(12.0, 84.0, 4).unwrap(), 0.0);
        assert_eq!(weyl_norm_closed_form(0.0, 0.0, 6).unwrap(), 0.0);
        assert!(matches!(weyl_norm_closed_form(1.0, 1.0, 3), Err(Error::BadDimension(3, 4))));
        for row in w.trace_13() {
            assert!(row.iter().all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn kn_suite_hand_example() {
        let tol = Tolerances::default();
        let a = diag(&[1.0, 1.0, -1.0, -1.0]);
        let r = kn_identity_suite(&a, &tol).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-12), "{r:?}");
        let aa = kulkarni_nomizu(&a.clone().into(), &a.into()).unwrap();
        assert_eq!(aa.norm_sq(), 96.0);
        let z = kn_identity_suite(&SymMatrix::zeros(5).unwrap(), &tol).unwrap();
        assert_eq!(z, [0.0; 4]);
    }
}
