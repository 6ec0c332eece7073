use serde::{Deserialize, Serialize};

use super::matrix::{Square, SymMatrix};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Sorted eigenvalues together with their multiplicity structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Groups of indices into `eigenvalues`; consecutive, in ascending order.
    pub clusters: Vec<Vec<usize>>,
    pub cluster_tolerance: f64,
}

impl Spectrum {
    /// Sorts `eigenvalues` and clusters them by single linkage on consecutive gaps
    /// against `cluster_tol * max(1, spectral radius)`.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, cluster_tol: f64) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let clusters = cluster_sorted(&eigenvalues, cluster_tol);
        Self { eigenvalues, clusters, cluster_tolerance: cluster_tol }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Absolute distance under which two eigenvalues count as equal.
    pub fn absolute_threshold(&self) -> f64 {
        self.cluster_tolerance * self.spectral_radius().max(1.0)
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.clusters.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of eigenvalues within the cluster threshold of zero.
    pub fn kernel_dim(&self) -> usize {
        let thr = self.absolute_threshold();
        self.eigenvalues.iter().filter(|v| v.abs() <= thr).count()
    }

    /// Mean eigenvalue of each cluster, in cluster order.
    pub fn cluster_values(&self) -> Vec<f64> {
        self.clusters
            .iter()
            .map(|c| c.iter().map(|&i| self.eigenvalues[i]).sum::<f64>() / c.len() as f64)
            .collect()
    }

    /// Spectrum of `A + lambda I`, reclustered with the same relative tolerance.
    pub fn shifted(&self, lambda: f64) -> Spectrum {
        Spectrum::from_eigenvalues(
            self.eigenvalues.iter().map(|v| v + lambda).collect(),
            self.cluster_tolerance,
        )
    }
}

fn cluster_sorted(sorted: &[f64], cluster_tol: f64) -> Vec<Vec<usize>> {
    let radius = sorted.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let thr = cluster_tol * radius.max(1.0);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, v) in sorted.iter().enumerate() {
        match clusters.last_mut() {
            Some(last) if v - sorted[*last.last().unwrap()] <= thr => last.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    clusters
}

/// Eigenvalues plus an orthonormal eigenbasis; column `j` of `vectors`
/// belongs to `spectrum.eigenvalues[j]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub spectrum: Spectrum,
    pub vectors: Square,
}

impl EigenDecomposition {
    /// `Q diag(lambda) Q^T`.
    pub fn reconstruct(&self) -> SymMatrix {
        let q = &self.vectors;
        let lam = &self.spectrum.eigenvalues;
        let n = q.n();
        SymMatrix::from_upper_fn(n, |i, j| (0..n).map(|k| q.get(i, k) * lam[k] * q.get(j, k)).sum())
            .expect("dimension already validated")
    }
}

pub fn eigen_spectrum(a: &SymMatrix, cluster_tol: f64) -> Result<Spectrum> {
    let tol = Tolerances { cluster_tol, ..Tolerances::default() };
    Ok(jacobi_eigen(a, &tol)?.spectrum)
}

/// Cyclic Jacobi eigensolver.
///
/// Converges when the off-diagonal Frobenius norm falls to
/// `jacobi_tol * ||A||_F`; fails after `jacobi_budget_factor * n^2` rotations.
pub fn jacobi_eigen(a: &SymMatrix, tol: &Tolerances) -> Result<EigenDecomposition> {
    if !(tol.cluster_tol > 0.0) {
        return Err(Error::BadParams("cluster_tol must be positive".into()));
    }
    let n = a.n();
    let mut m: Vec<f64> = a.as_slice().to_vec();
    let mut v = Square::identity(n);
    let target = tol.jacobi_tol * a.frobenius_sq().sqrt();
    let budget = tol.jacobi_budget_factor * n * n;
    let mut rotations = 0usize;

    loop {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                if rotations >= budget {
                    return Err(Error::NonConvergence(budget));
                }
                rotations += 1;
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = m[r * n + p];
                    let arq = m[r * n + q];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    m[r * n + p] = new_rp;
                    m[p * n + r] = new_rp;
                    m[r * n + q] = new_rq;
                    m[q * n + r] = new_rq;
                }
                for r in 0..n {
                    let vrp = v.get(r, p);
                    let vrq = v.get(r, q);
                    v.set(r, p, c * vrp - s * vrq);
                    v.set(r, q, s * vrp + c * vrq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = Square::identity(n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, col, v.get(r, src));
        }
    }
    let clusters = cluster_sorted(&eigenvalues, tol.cluster_tol);
    Ok(EigenDecomposition {
        spectrum: Spectrum { eigenvalues, clusters, cluster_tolerance: tol.cluster_tol },
        vectors,
    })
}
