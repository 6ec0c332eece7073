//! Newton's inequalities, the lambda-shifted consequences for trace-free
//! matrices, and the quartic `|Å²|² <= c_n |Å|⁴` bound with its equality case.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    binomial, jacobi_eigen, norms, symfun_from_spectrum, Norms, Spectrum, SymFunProfile, SymMatrix,
};
use crate::tolerances::Tolerances;

/// `(n² - 3n + 3) / (n (n - 1))`, the sharp constant of the quartic bound.
pub fn quartic_constant(n: usize) -> f64 {
    let n = n as f64;
    (n * n - 3.0 * n + 3.0) / (n * (n - 1.0))
}

/// `(n - 2)² / (n (n - 1))`, the sharp constant of the cubic bound.
pub fn cubic_constant(n: usize) -> f64 {
    let n = n as f64;
    (n - 2.0) * (n - 2.0) / (n * (n - 1.0))
}

/// Outcome of one `lhs <= rhs` comparison. `defect = rhs - lhs` so a
/// nonnegative defect means the inequality holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
    pub scale: f64,
    pub relative_defect: f64,
    pub holds: bool,
    pub equality: bool,
    pub tol: f64,
}

impl InequalityVerdict {
    pub fn new(lhs: f64, rhs: f64, scale: f64, tol: f64) -> Self {
        let defect = rhs - lhs;
        Self {
            lhs,
            rhs,
            defect,
            scale,
            relative_defect: defect / scale,
            holds: defect >= -tol * scale,
            equality: defect.abs() <= tol * scale,
            tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqualityKind {
    Zero,
    EigenspaceDimAtLeastNMinus1,
    EigenspaceDimExactlyNMinus1,
    ProportionalToIdentity,
    /// Kernel dimension (at least the Newton threshold `n - k + 1`).
    KernelDimAtLeast(usize),
    None,
}

impl EqualityKind {
    /// True for the kinds meaning "some eigenspace has dimension >= n - 1".
    pub fn is_rotational(self) -> bool {
        matches!(
            self,
            EqualityKind::Zero
                | EqualityKind::EigenspaceDimAtLeastNMinus1
                | EqualityKind::EigenspaceDimExactlyNMinus1
        )
    }
}

impl std::fmt::Display for EqualityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EqualityKind::KernelDimAtLeast(d) => write!(f, "KernelDimAtLeast({d})"),
            other => write!(f, "{other:?}"),
        }
    }
}

/// `mu` has multiplicity `n - 1`, `nu` is the remaining eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub mu: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityCase {
    pub kind: EqualityKind,
    pub multiplicities: Vec<usize>,
    pub detail: Option<EigenPair>,
}

impl EqualityCase {
    fn unclassified() -> Self {
        Self { kind: EqualityKind::None, multiplicities: Vec::new(), detail: None }
    }
}

/// Classifies a trace-free spectrum by its largest eigenspace.
///
/// `frob` is `|Å|`; it separates the umbilic case from a genuine
/// multiplicity-`(n-1)` eigenspace.
pub fn classify_trace_free(spectrum: &Spectrum, frob: f64, umbilic_tol: f64) -> EqualityCase {
    let n = spectrum.n();
    let multiplicities = spectrum.multiplicities();
    let max_mult = spectrum.max_multiplicity();
    let scale = frob.powi(4).max(1.0);
    let (kind, detail) = if frob <= umbilic_tol * scale {
        (EqualityKind::Zero, None)
    } else if max_mult == n - 1 {
        let values = spectrum.cluster_values();
        let big = multiplicities.iter().position(|&m| m == n - 1).unwrap();
        let pair = EigenPair { mu: values[big], nu: values[1 - big] };
        (EqualityKind::EigenspaceDimExactlyNMinus1, Some(pair))
    } else if max_mult >= n - 1 {
        (EqualityKind::EigenspaceDimAtLeastNMinus1, None)
    } else {
        (EqualityKind::None, None)
    };
    EqualityCase { kind, multiplicities, detail }
}

fn check_trace_free_profile(profile: &SymFunProfile, tol: &Tolerances) -> Result<()> {
    let trace = profile.sigma[1];
    let allowed = tol.trace_tol * profile.n as f64 * profile.frobenius_sq().sqrt();
    if trace.abs() > allowed {
        return Err(Error::NotTraceFree { trace, allowed });
    }
    Ok(())
}

pub(crate) fn check_trace_free(norms: &Norms, tol: &Tolerances) -> Result<()> {
    let allowed = tol.trace_tol * norms.n as f64 * norms.frob_sq.sqrt();
    if norms.trace.abs() > allowed {
        return Err(Error::NotTraceFree { trace: norms.trace, allowed });
    }
    Ok(())
}

pub(crate) fn check_min_dim(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::BadDimension(n, min))
    } else {
        Ok(())
    }
}

/// Equality is only reported when the defect vanishes *and* the spectrum
/// shows the matching structure (when a spectrum is available).
fn refine(mut verdict: InequalityVerdict, case: &EqualityCase, has_spectrum: bool) -> InequalityVerdict {
    if has_spectrum && case.kind == EqualityKind::None {
        verdict.equality = false;
    }
    verdict
}

/// Newton's inequality `p_k² >= p_{k-1} p_{k+1}`.
///
/// Equality is classified from the attached spectrum: proportional to the
/// identity, or kernel dimension at least `n - k + 1`.
pub fn newton_gap(
    profile: &SymFunProfile,
    k: usize,
    tol: &Tolerances,
) -> Result<(InequalityVerdict, EqualityCase)> {
    let n = profile.n;
    if k < 1 || k + 1 > n {
        return Err(Error::BadIndex { k, max: n - 1 });
    }
    let p = &profile.p;
    let lhs = p[k - 1] * p[k + 1];
    let rhs = p[k] * p[k];
    let scale = rhs.max(lhs.abs()).max(1.0);
    let verdict = InequalityVerdict::new(lhs, rhs, scale, tol.inequality_tol);
    let case = match &profile.spectrum {
        Some(s) => {
            let kernel = s.kernel_dim();
            let kind = if s.clusters.len() == 1 {
                EqualityKind::ProportionalToIdentity
            } else if kernel >= n - k + 1 {
                EqualityKind::KernelDimAtLeast(kernel)
            } else {
                EqualityKind::None
            };
            EqualityCase { kind, multiplicities: s.multiplicities(), detail: None }
        }
        None => EqualityCase::unclassified(),
    };
    Ok((refine(verdict, &case, profile.spectrum.is_some()), case))
}

/// `(tr Å³)² <= (n-2)²/(n(n-1)) |Å|⁶`.
pub fn cubic_bound(norms: &Norms, tol: &Tolerances) -> Result<InequalityVerdict> {
    check_trace_free(norms, tol)?;
    let a6 = norms.frob_sq.powi(3);
    let lhs = norms.trace_cube * norms.trace_cube;
    let rhs = cubic_constant(norms.n) * a6;
    Ok(InequalityVerdict::new(lhs, rhs, a6.max(1.0), tol.inequality_tol))
}

fn trace_free_case(profile: &SymFunProfile, tol: &Tolerances) -> EqualityCase {
    match &profile.spectrum {
        Some(s) => classify_trace_free(s, profile.frobenius_sq().sqrt(), tol.umbilic_tol),
        None => EqualityCase::unclassified(),
    }
}

/// `p_3² + 4 p_2³ <= 0` for trace-free matrices.
pub fn prop_p3(profile: &SymFunProfile, tol: &Tolerances) -> Result<(InequalityVerdict, EqualityCase)> {
    check_trace_free_profile(profile, tol)?;
    let (p2, p3) = (profile.p[2], profile.p[3]);
    let lhs = p3 * p3 + 4.0 * p2 * p2 * p2;
    let scale = p2.abs().powi(3).max(p3 * p3).max(1.0);
    let verdict = InequalityVerdict::new(lhs, 0.0, scale, tol.inequality_tol);
    let case = trace_free_case(profile, tol);
    Ok((refine(verdict, &case, profile.spectrum.is_some()), case))
}

/// `p_4 + 3 p_2² >= 0` for trace-free matrices, `n >= 4`.
pub fn prop_p4(profile: &SymFunProfile, tol: &Tolerances) -> Result<(InequalityVerdict, EqualityCase)> {
    check_min_dim(profile.n, 4)?;
    check_trace_free_profile(profile, tol)?;
    let (p2, p4) = (profile.p[2], profile.p[4]);
    let rhs = p4 + 3.0 * p2 * p2;
    let verdict = InequalityVerdict::new(0.0, rhs, (p2 * p2).max(1.0), tol.inequality_tol);
    let case = trace_free_case(profile, tol);
    Ok((refine(verdict, &case, profile.spectrum.is_some()), case))
}

/// Values of the shifted Newton quantity `q(lambda) = p_2² - lambda p_3 - lambda² p_2`
/// over a grid, plus the product `(3p_3² - 4p_2p_4)(p_3² + 4p_2³)`.
///
/// Each value carries its own scale: `q` is homogeneous of degree four in
/// `(Å, lambda)` and the product of degree twelve in `Å`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaScan {
    pub lambdas: Vec<f64>,
    pub q: Vec<f64>,
    pub q_scales: Vec<f64>,
    pub step2_product: f64,
    pub step2_scale: f64,
}

impl LambdaScan {
    /// The `q` values followed by the step-two product.
    pub fn as_list(&self) -> Vec<f64> {
        let mut out = self.q.clone();
        out.push(self.step2_product);
        out
    }

    /// Most negative `q / scale`.
    pub fn min_relative_q(&self) -> f64 {
        self.q
            .iter()
            .zip(&self.q_scales)
            .map(|(q, s)| q / s)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn relative_step2(&self) -> f64 {
        self.step2_product / self.step2_scale
    }
}

pub fn lambda_scan(profile: &SymFunProfile, lambdas: &[f64], tol: &Tolerances) -> Result<LambdaScan> {
    check_trace_free_profile(profile, tol)?;
    let p = &profile.p;
    let (p2, p3) = (p[2], p[3]);
    let p4 = p.get(4).copied().unwrap_or(0.0);
    let mut q = Vec::with_capacity(lambdas.len());
    let mut q_scales = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let terms = [p2 * p2, l * p3, l * l * p2];
        q.push(terms[0] - terms[1] - terms[2]);
        q_scales.push(terms.iter().fold(1.0_f64, |m, t| m.max(t.abs())));
    }
    let first = 3.0 * p3 * p3 - 4.0 * p2 * p4;
    let second = p3 * p3 + 4.0 * p2 * p2 * p2;
    let step2_scale = ((3.0 * p3 * p3).abs() + (4.0 * p2 * p4).abs()).max(1.0)
        * (p3 * p3 + (4.0 * p2 * p2 * p2).abs()).max(1.0);
    Ok(LambdaScan {
        lambdas: lambdas.to_vec(),
        q,
        q_scales,
        step2_product: first * second,
        step2_scale,
    })
}

/// Result of [`main_inequality`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainInequality {
    pub verdict: InequalityVerdict,
    pub case: EqualityCase,
    /// `C(n,4)(p_4 + 3p_2²) + ¼(|Å²|² - c_n |Å|⁴)`, zero in exact arithmetic.
    pub bridge_residual: f64,
}

/// `|Å²|² <= (n²-3n+3)/(n(n-1)) |Å|⁴` with equality iff `Å` has an
/// eigenspace of dimension at least `n - 1`.
pub fn main_inequality(a: &SymMatrix, tol: &Tolerances) -> Result<MainInequality> {
    let n = a.n();
    check_min_dim(n, 4)?;
    let nm = norms(a);
    check_trace_free(&nm, tol)?;
    let a4 = nm.frob_sq * nm.frob_sq;
    let lhs = nm.square_frob_sq;
    let rhs = quartic_constant(n) * a4;
    let scale = a4.max(1.0);
    let verdict = InequalityVerdict::new(lhs, rhs, scale, tol.inequality_tol);

    let spectrum = jacobi_eigen(a, tol)?.spectrum;
    let case = classify_trace_free(&spectrum, nm.frob_sq.sqrt(), tol.umbilic_tol);
    let profile = symfun_from_spectrum(&spectrum);
    let bridge = binomial(n, 4) * (profile.p[4] + 3.0 * profile.p[2] * profile.p[2])
        + 0.25 * (nm.square_frob_sq - quartic_constant(n) * a4);

    Ok(MainInequality {
        verdict: refine(verdict, &case, true),
        case,
        bridge_residual: bridge,
    })
}

/// Residuals of `sigma_2 = -½|Å|²` and `sigma_4 = ⅛|Å|⁴ - ¼|Å²|²`, with the
/// elementary symmetric functions taken from the eigenvalues.
pub fn sigma_norm_identities(a: &SymMatrix, tol: &Tolerances) -> Result<(f64, f64)> {
    let nm = norms(a);
    check_trace_free(&nm, tol)?;
    let profile = symfun_from_spectrum(&jacobi_eigen(a, tol)?.spectrum);
    let sigma4 = profile.sigma.get(4).copied().unwrap_or(0.0);
    let r2 = profile.sigma[2] + 0.5 * nm.frob_sq;
    let r4 = sigma4 - 0.125 * nm.frob_sq * nm.frob_sq + 0.25 * nm.square_frob_sq;
    Ok((r2, r4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{eigen_spectrum, symfun_from_power_sums};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn profile(diag: &[f64]) -> SymFunProfile {
        let a = SymMatrix::from_diagonal(diag).unwrap();
        symfun_from_spectrum(&eigen_spectrum(&a, 1e-8).unwrap())
    }

    #[test]
    fn newton_identity_and_rank_one() {
        let id = profile(&[1.0; 5]);
        for k in 1..5 {
            let (v, c) = newton_gap(&id, k, &tol()).unwrap();
            assert!(v.equality);
            assert_eq!(c.kind, EqualityKind::ProportionalToIdentity);
        }
        let (v, c) = newton_gap(&profile(&[1.0, 0.0, 0.0, 0.0]), 2, &tol()).unwrap();
        assert_eq!((v.lhs, v.rhs), (0.0, 0.0));
        assert!(v.equality);
        assert_eq!(c.kind, EqualityKind::KernelDimAtLeast(3));
        assert!(matches!(newton_gap(&id, 0, &tol()), Err(Error::BadIndex { .. })));
        assert!(matches!(newton_gap(&id, 5, &tol()), Err(Error::BadIndex { .. })));
    }

    #[test]
    fn newton_without_spectrum_uses_defect_only() {
        let a = SymMatrix::from_diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let (v, c) = newton_gap(&symfun_from_power_sums(&a), 2, &tol()).unwrap();
        assert!(v.equality);
        assert_eq!(c.kind, EqualityKind::None);
    }

    #[test]
    fn cubic_cases() {
        let eq = norms(&SymMatrix::from_diagonal(&[1.0, 1.0, 1.0, -3.0]).unwrap());
        let v = cubic_bound(&eq, &tol()).unwrap();
        assert_eq!((v.lhs, v.rhs), (576.0, 576.0));
        assert!(v.equality);
        let strict = norms(&SymMatrix::from_diagonal(&[1.0, 1.0, -1.0, -1.0]).unwrap());
        let v = cubic_bound(&strict, &tol()).unwrap();
        assert_eq!(v.lhs, 0.0);
        assert!((v.rhs - 64.0 / 3.0).abs() < 1e-12);
        assert!(v.holds && !v.equality);
        let v = cubic_bound(&norms(&SymMatrix::zeros(4).unwrap()), &tol()).unwrap();
        assert!(v.equality);
        let not_tf = norms(&SymMatrix::identity(4).unwrap());
        assert!(matches!(cubic_bound(&not_tf, &tol()), Err(Error::NotTraceFree { .. })));
    }

    #[test]
    fn prop_p3_cases() {
        let (v, c) = prop_p3(&profile(&[1.0, 1.0, 1.0, -3.0]), &tol()).unwrap();
        assert_eq!(v.lhs, 0.0);
        assert!(v.equality);
        assert_eq!(c.kind, EqualityKind::EigenspaceDimExactlyNMinus1);
        let (v, c) = prop_p3(&profile(&[0.0; 4]), &tol()).unwrap();
        assert!(v.equality);
        assert_eq!(c.kind, EqualityKind::Zero);
        let (v, c) = prop_p3(&profile(&[2.0, -1.0, -1.0, 1.0, -1.0]), &tol()).unwrap();
        assert!(v.lhs < 0.0 && v.holds && !v.equality);
        assert_eq!(c.multiplicities, vec![3, 1, 1]);
        assert!(matches!(prop_p3(&profile(&[1.0; 4]), &tol()), Err(Error::NotTraceFree { .. })));
    }

    #[test]
    fn prop_p4_cases() {
        let (v, _) = prop_p4(&profile(&[1.0, 1.0, 1.0, -3.0]), &tol()).unwrap();
        assert_eq!(v.rhs, 0.0);
        assert!(v.equality);
        let (v, _) = prop_p4(&profile(&[1.0, 1.0, -1.0, -1.0]), &tol()).unwrap();
        assert!((v.rhs - 4.0 / 3.0).abs() < 1e-15);
        assert!(v.holds && !v.equality);
        assert!(prop_p4(&profile(&[0.0; 4]), &tol()).unwrap().0.equality);
        assert!(matches!(prop_p4(&profile(&[1.0, 1.0, -2.0]), &tol()), Err(Error::BadDimension(3, 4))));
    }

    #[test]
    fn lambda_scan_double_root() {
        // q(lambda) = (1 + lambda)^2 for diag(1,1,1,-3)
        let scan = lambda_scan(&profile(&[1.0, 1.0, 1.0, -3.0]), &[-1.0, 0.0, 2.0], &tol()).unwrap();
        assert_eq!(scan.q, vec![0.0, 1.0, 9.0]);
        assert_eq!(scan.step2_product, 0.0);
        assert_eq!(scan.as_list().len(), 4);
        let zero = lambda_scan(&profile(&[0.0; 5]), &[-3.0, 0.5, 7.0], &tol()).unwrap();
        assert!(zero.q.iter().all(|&q| q == 0.0));
    }

    #[test]
    fn main_inequality_cases() {
        let eq = main_inequality(&SymMatrix::from_diagonal(&[1.0, 1.0, 1.0, -3.0]).unwrap(), &tol()).unwrap();
        assert_eq!(eq.verdict.lhs, 84.0);
        assert!((eq.verdict.rhs - 84.0).abs() < 1e-12);
        assert!(eq.verdict.equality);
        assert_eq!(eq.case.kind, EqualityKind::EigenspaceDimExactlyNMinus1);
        assert_eq!(eq.case.detail, Some(EigenPair { mu: 1.0, nu: -3.0 }));
        assert!(eq.bridge_residual.abs() < 1e-12);

        let strict = main_inequality(&SymMatrix::from_diagonal(&[1.0, 1.0, -1.0, -1.0]).unwrap(), &tol()).unwrap();
        assert_eq!(strict.verdict.lhs, 4.0);
        assert!((strict.verdict.rhs - 28.0 / 3.0).abs() < 1e-14);
        assert!(strict.verdict.holds && !strict.verdict.equality);
        assert_eq!(strict.case.kind, EqualityKind::None);

        let zero = main_inequality(&SymMatrix::zeros(5).unwrap(), &tol()).unwrap();
        assert!(zero.verdict.equality);
        assert_eq!(zero.case.kind, EqualityKind::Zero);

        assert!(matches!(
            main_inequality(&SymMatrix::zeros(3).unwrap(), &tol()),
            Err(Error::BadDimension(3, 4))
        ));
    }

    #[test]
    fn sigma_identities() {
        let a = SymMatrix::from_diagonal(&[1.0, 1.0, 1.0, -3.0]).unwrap();
        assert_eq!(sigma_norm_identities(&a, &tol()).unwrap(), (0.0, 0.0));
        assert_eq!(sigma_norm_identities(&SymMatrix::zeros(4).unwrap(), &tol()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn constants() {
        assert_eq!(quartic_constant(4), 7.0 / 12.0);
        assert_eq!(cubic_constant(4), 4.0 / 12.0);
    }
}
