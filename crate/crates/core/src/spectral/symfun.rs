use serde::{Deserialize, Serialize};

use super::eigen::Spectrum;
use super::matrix::SymMatrix;

/// Elementary symmetric functions `sigma_k`, their normalizations
/// `p_k = sigma_k / C(n, k)` and power sums `s_j = tr A^j` of one matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymFunProfile {
    pub n: usize,
    /// `sigma_0 ..= sigma_n`.
    pub sigma: Vec<f64>,
    /// `p_0 ..= p_n`.
    pub p: Vec<f64>,
    /// `s_1 ..= s_n`.
    pub power_sums: Vec<f64>,
    /// Present when the profile was computed from eigenvalues; used for
    /// equality classification.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Spectrum>,
}

impl SymFunProfile {
    fn from_sigma(n: usize, sigma: Vec<f64>, power_sums: Vec<f64>, spectrum: Option<Spectrum>) -> Self {
        let p = sigma.iter().enumerate().map(|(k, s)| s / binomial(n, k)).collect();
        Self { n, sigma, p, power_sums, spectrum }
    }

    /// `s_j` with `s_0 = n`.
    pub fn power_sum(&self, j: usize) -> f64 {
        if j == 0 {
            self.n as f64
        } else {
            self.power_sums[j - 1]
        }
    }

    /// `|A|^2 = s_2` (clamped at zero against rounding).
    pub fn frobenius_sq(&self) -> f64 {
        self.power_sum(2).max(0.0)
    }
}

/// `C(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// `sigma_k` by multiplying out `prod (x + lambda_i)` one root at a time.
pub fn symfun_from_spectrum(spec: &Spectrum) -> SymFunProfile {
    let n = spec.n();
    let mut sigma = vec![0.0; n + 1];
    sigma[0] = 1.0;
    for (i, &lam) in spec.eigenvalues.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            sigma[k] += lam * sigma[k - 1];
        }
    }
    let power_sums = (1..=n)
        .map(|j| spec.eigenvalues.iter().map(|l| l.powi(j as i32)).sum())
        .collect();
    SymFunProfile::from_sigma(n, sigma, power_sums, Some(spec.clone()))
}

/// `sigma_k` from `s_j = tr A^j` through Newton's identities, without any
/// eigendecomposition.
pub fn symfun_from_power_sums(a: &SymMatrix) -> SymFunProfile {
    let n = a.n();
    let mut power_sums = Vec::with_capacity(n);
    let mut pow = a.clone();
    power_sums.push(pow.trace());
    for _ in 2..=n {
        pow = pow.mul_sym(a);
        power_sums.push(pow.trace());
    }
    let mut sigma = vec![0.0; n + 1];
    sigma[0] = 1.0;
    for k in 1..=n {
        let mut acc = 0.0;
        for j in 1..=k {
            let term = sigma[k - j] * power_sums[j - 1];
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        sigma[k] = acc / k as f64;
    }
    SymFunProfile::from_sigma(n, sigma, power_sums, None)
}

/// Profile of `A + lambda I` computed from the profile of `A` alone.
pub fn shift_profile(profile: &SymFunProfile, lambda: f64) -> SymFunProfile {
    let n = profile.n;
    let lam_pows: Vec<f64> = (0..=n).map(|j| lambda.powi(j as i32)).collect();
    let p: Vec<f64> = (0..=n)
        .map(|k| (0..=k).map(|j| binomial(k, j) * lam_pows[j] * profile.p[k - j]).sum())
        .collect();
    let sigma = p.iter().enumerate().map(|(k, pk)| pk * binomial(n, k)).collect();
    let power_sums = (1..=n)
        .map(|j| (0..=j).map(|m| binomial(j, m) * lam_pows[j - m] * profile.power_sum(m)).sum())
        .collect();
    SymFunProfile {
        n,
        sigma,
        p,
        power_sums,
        spectrum: profile.spectrum.as_ref().map(|s| s.shifted(lambda)),
    }
}

/// `A - (tr A / n) I`. A second centering pass brings the residual trace
/// down to rounding in `|Å|` rather than in `|A|`, which matters near umbilic
/// points.
pub fn trace_free_project(a: &SymMatrix) -> SymMatrix {
    let once = a.shifted(-a.trace() / a.n() as f64);
    once.shifted(-once.trace() / a.n() as f64)
}

/// Low-order invariants of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub n: usize,
    pub trace: f64,
    /// `|A|^2`
    pub frob_sq: f64,
    /// `|A^2|^2`
    pub square_frob_sq: f64,
    /// `tr A^3`
    pub trace_cube: f64,
}

impl Norms {
    pub fn as_tuple(&self) -> (f64, f64, f64) {
        (self.frob_sq, self.square_frob_sq, self.trace_cube)
    }
}

pub fn norms(a: &SymMatrix) -> Norms {
    let sq = a.square();
    Norms {
        n: a.n(),
        trace: a.trace(),
        frob_sq: a.frobenius_sq(),
        square_frob_sq: sq.frobenius_sq(),
        trace_cube: sq.dot(a),
    }
}
