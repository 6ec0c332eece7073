//! Command-line surface: randomized verification campaigns, catalog field
//! construction and field analysis.
//!
//! Exit codes: 0 pass, 1 check or assertion failure, 2 usage or schema error.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{
    build_catenoid, build_cylinder, build_rotation_hypersurface, build_sphere, chart_shape_operator,
    ingest_field, write_field, Chart, PolynomialProfile, ShapeField,
};
use crate::curvature::{kn_identity_suite, weyl_from_gauss_codazzi, weyl_norm_closed_form};
use crate::energy::rotational_energy;
use crate::error::Error;
use crate::inequalities::{
    cubic_bound, lambda_scan, main_inequality, newton_gap, prop_p3, prop_p4, sigma_norm_identities,
};
use crate::random::{campaign_rng, random_symmetric};
use crate::spectral::{jacobi_eigen, norms, symfun_from_spectrum, trace_free_project};
use crate::tolerances::{Tolerances, VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest matrix dimension accepted by `verify`.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "rigidity", version, about = "Trace-free matrix inequality and rotational energy checks")]
pub struct Cli {
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true, env = "RIGIDITY_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Randomized campaign over every inequality and identity.
    Verify(VerifyArgs),
    /// Build a catalog surface and write its field file.
    Catalog(CatalogArgs),
    /// Compute rotational energies of a field file.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Matrix dimensions, comma separated.
    #[arg(long = "n", value_delimiter = ',', default_value = "4,5,6")]
    pub dims: Vec<usize>,
    /// Random matrices per dimension.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    /// Random shifts per matrix for the lambda scan.
    #[arg(long, default_value_t = 16)]
    pub lambdas: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SurfaceName {
    Sphere,
    Cylinder,
    Catenoid,
    Rotation,
    Ellipsoid,
}

#[derive(Debug, Clone, Args)]
pub struct CatalogArgs {
    #[arg(long, value_enum)]
    pub surface: SurfaceName,
    #[arg(long = "n", default_value_t = 4)]
    pub n: usize,
    /// Grid counts such as `64x32`.
    #[arg(long, default_value = "32x8")]
    pub grid: String,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 1.0)]
    pub height: f64,
    /// Polynomial profile coefficients `c0,c1,...` for `rotation`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0,1")]
    pub coeffs: Vec<f64>,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t_max: f64,
    /// Ellipsoid semi-axes (n + 1 values).
    #[arg(long, value_delimiter = ',')]
    pub semi_axes: Option<Vec<f64>>,
    /// Polar-angle margin keeping ellipsoid charts away from the poles.
    #[arg(long, default_value_t = 0.3)]
    pub margin: f64,
    #[arg(long)]
    pub fd_step: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub profile_tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Field file to analyze.
    pub field: PathBuf,
    /// JSON report path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional per-sample CSV export.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Fail (exit 1) when E_rot_conf exceeds this fraction of its quadrature scale.
    #[arg(long)]
    pub assert_zero: Option<f64>,
}

/// Aggregate of one check family over the campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub evaluated: usize,
    pub violations: usize,
    /// Most negative relative defect (inequality families).
    pub worst_relative_defect: Option<f64>,
    /// Largest relative residual (identity families).
    pub worst_residual: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: String,
    pub tolerances: Tolerances,
    pub config: VerifyArgs,
    pub checks: Vec<CheckSummary>,
    /// Random matrices on which the main inequality reported equality.
    pub equality_flags: usize,
    pub passed: bool,
}

const FAMILIES: [&str; 8] = [
    "newton_gap",
    "prop_p3",
    "prop_p4",
    "cubic_bound",
    "main_inequality",
    "sigma_norm_identities",
    "lambda_scan",
    "kn_identity_suite",
];

/// Per-matrix outcome: `(relative defect or residual, violated)` per family.
#[derive(Default)]
struct Outcome {
    entries: [Option<(f64, bool)>; 8],
    equality_flag: bool,
}

fn relative_residual(r: f64, scale: f64) -> f64 {
    r.abs() / scale.max(1.0)
}

fn verify_one(n: usize, seed: u64, index: u64, lambdas: usize, tol: &Tolerances) -> crate::Result<Outcome> {
    let mut rng = campaign_rng(seed, index);
    let a = random_symmetric(n, &mut rng)?;
    let abar = trace_free_project(&a);
    let mut out = Outcome::default();
    let below = |defect: f64| (defect, !(defect >= -tol.inequality_tol));

    let profile = symfun_from_spectrum(&jacobi_eigen(&a, tol)?.spectrum);
    let mut worst = f64::INFINITY;
    for k in 1..n {
        worst = worst.min(newton_gap(&profile, k, tol)?.0.relative_defect);
    }
    out.entries[0] = Some(below(worst));

    let tf_profile = symfun_from_spectrum(&jacobi_eigen(&abar, tol)?.spectrum);
    out.entries[1] = Some(below(prop_p3(&tf_profile, tol)?.0.relative_defect));
    out.entries[3] = Some(below(cubic_bound(&norms(&abar), tol)?.relative_defect));

    let nm = norms(&abar);
    let a4_scale = (nm.frob_sq * nm.frob_sq).max(1.0);
    let (r2, r4) = sigma_norm_identities(&abar, tol)?;
    let sigma_res = relative_residual(r2, a4_scale).max(relative_residual(r4, a4_scale));
    out.entries[5] = Some((sigma_res, !(sigma_res <= tol.identity_tol)));

    let spread = 3.0 * tf_profile.p[2].abs().sqrt().max(f64::MIN_POSITIVE);
    let grid: Vec<f64> = (0..lambdas).map(|_| rng.gen_range(-spread..=spread)).collect();
    let scan = lambda_scan(&tf_profile, &grid, tol)?;
    let q_min = if grid.is_empty() { 0.0 } else { scan.min_relative_q() };
    let step2 = scan.relative_step2();
    out.entries[6] = Some((q_min, !(q_min >= -tol.inequality_tol) || !(step2 <= tol.inequality_tol)));

    if n >= 4 {
        out.entries[2] = Some(below(prop_p4(&tf_profile, tol)?.0.relative_defect));
        let main = main_inequality(&abar, tol)?;
        let bridge = relative_residual(main.bridge_residual, a4_scale);
        let rel = main.verdict.relative_defect;
        out.entries[4] = Some((rel, !(rel >= -tol.inequality_tol) || !(bridge <= tol.identity_tol)));
        out.equality_flag = main.verdict.equality;

        let mut kn = kn_identity_suite(&abar, tol)?
            .iter()
            .map(|r| relative_residual(*r, a4_scale))
            .fold(0.0, f64::max);
        let direct = weyl_from_gauss_codazzi(&abar, tol)?.norm_sq();
        let closed = weyl_norm_closed_form(nm.frob_sq, nm.square_frob_sq, n)?;
        kn = kn.max(relative_residual(direct - closed, a4_scale));
        out.entries[7] = Some((kn, !(kn <= tol.tensor_tol)));
    }
    Ok(out)
}

pub fn validate_verify(args: &VerifyArgs) -> Result<(), String> {
    if args.samples < 1 {
        return Err("samples must be ≥ 1".into());
    }
    if args.dims.is_empty() {
        return Err("at least one dimension is required".into());
    }
    if let Some(&bad) = args.dims.iter().find(|&&n| !(3..=MAX_DIM).contains(&n)) {
        return Err(format!("dimension {bad} outside 3..={MAX_DIM}"));
    }
    Ok(())
}

/// Runs the randomized campaign. Matrix `i` (over all dimensions, in order)
/// uses the generator seeded with `seed XOR i`; results are aggregated in
/// index order, so the report does not depend on the thread count.
pub fn run_verify(args: &VerifyArgs, tol: &Tolerances) -> crate::Result<VerifyReport> {
    let jobs: Vec<(usize, u64)> = args
        .dims
        .iter()
        .flat_map(|&n| std::iter::repeat(n).take(args.samples))
        .enumerate()
        .map(|(i, n)| (n, i as u64))
        .collect();
    let outcomes: Vec<Outcome> = jobs
        .par_iter()
        .map(|&(n, i)| verify_one(n, args.seed, i, args.lambdas, tol))
        .collect::<crate::Result<_>>()?;

    let identity_family = |f: usize| matches!(f, 5 | 7);
    let mut checks = Vec::with_capacity(FAMILIES.len());
    for (f, name) in FAMILIES.iter().enumerate() {
        let mut evaluated = 0;
        let mut violations = 0;
        let mut worst: Option<f64> = None;
        for o in &outcomes {
            if let Some((value, violated)) = o.entries[f] {
                evaluated += 1;
                violations += usize::from(violated);
                worst = Some(match worst {
                    None => value,
                    Some(w) if identity_family(f) => w.max(value),
                    Some(w) => w.min(value),
                });
            }
        }
        let (worst_relative_defect, worst_residual) =
            if identity_family(f) { (None, worst) } else { (worst, None) };
        checks.push(CheckSummary {
            name: name.to_string(),
            evaluated,
            violations,
            worst_relative_defect,
            worst_residual,
            passed: violations == 0,
        });
    }
    let equality_flags = outcomes.iter().filter(|o| o.equality_flag).count();
    let passed = checks.iter().all(|c| c.passed) && equality_flags == 0;
    Ok(VerifyReport {
        version: VERSION.to_string(),
        tolerances: *tol,
        config: args.clone(),
        checks,
        equality_flags,
        passed,
    })
}

pub fn parse_grid(text: &str) -> Result<Vec<usize>, String> {
    text.split(['x', 'X', ','])
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad grid `{text}`; expected e.g. 64x32")))
        .collect()
}

pub fn build_catalog_field(args: &CatalogArgs, tol: &Tolerances) -> crate::Result<ShapeField> {
    let grid = parse_grid(&args.grid).map_err(Error::BadParams)?;
    match args.surface {
        SurfaceName::Sphere => build_sphere(args.n, args.r, &grid, tol),
        SurfaceName::Cylinder => build_cylinder(args.n, args.r, args.height, &grid, tol),
        SurfaceName::Catenoid => build_catenoid(args.n, &grid, args.profile_tol, tol),
        SurfaceName::Rotation => build_rotation_hypersurface(
            args.n,
            &PolynomialProfile::new(args.coeffs.clone()),
            args.t_min,
            args.t_max,
            &grid,
            tol,
        ),
        SurfaceName::Ellipsoid => {
            let axes = match &args.semi_axes {
                Some(a) => a.clone(),
                None => (0..=args.n).map(|i| 1.0 + 0.2 * i as f64).collect(),
            };
            if axes.len() != args.n + 1 {
                return Err(Error::BadParams(format!(
                    "ellipsoid in {} dimensions needs {} semi-axes, got {}",
                    args.n + 1,
                    args.n + 1,
                    axes.len()
                )));
            }
            let mut field = chart_shape_operator(&Chart::ellipsoid(&axes, args.margin)?, &grid, args.fd_step, tol)?;
            field.spec.params.insert("ellipsoid".into(), 1.0);
            Ok(field)
        }
    }
}

fn usage_error(err: &Error) -> bool {
    matches!(
        err,
        Error::BadParams(_)
            | Error::BadDimension(..)
            | Error::BadProfile(_)
            | Error::DimensionMismatch(..)
            | Error::Parse(_)
            | Error::Schema(_)
            | Error::InvariantViolation { .. }
            | Error::InvalidField(_)
            | Error::NotSymmetric(..)
    )
}

fn fail(err: Error) -> i32 {
    eprintln!("error: {err}");
    if usage_error(&err) {
        EXIT_USAGE
    } else {
        EXIT_FAIL
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> crate::Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => println!("{}", text.trim_end()),
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> i32 {
    if let Err(msg) = validate_verify(args) {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    let tol = Tolerances::default();
    let report = match run_verify(args, &tol) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Err(e) = write_output(args.out.as_ref(), &text) {
        return fail(e);
    }
    for c in &report.checks {
        eprintln!("{:<24} {:>8} evaluated {:>4} violations  {}", c.name, c.evaluated, c.violations, if c.passed { "ok" } else { "FAIL" });
    }
    if report.passed {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn cmd_catalog(args: &CatalogArgs) -> i32 {
    let tol = Tolerances::default();
    match build_catalog_field(args, &tol).and_then(|f| write_field(&f, &args.out).map(|_| f)) {
        Ok(f) => {
            eprintln!("wrote {} samples to {}", f.samples.len(), args.out.display());
            EXIT_OK
        }
        Err(e) => fail(e),
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> i32 {
    let tol = Tolerances::default();
    if let Some(t) = args.assert_zero {
        if !(t > 0.0) {
            eprintln!("error: --assert-zero tolerance must be positive");
            return EXIT_USAGE;
        }
    }
    let field = match ingest_field(&args.field, &tol) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let report = match rotational_energy(&field, &tol) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Err(e) = write_output(args.out.as_ref(), &text) {
        return fail(e);
    }
    if let Some(path) = &args.csv {
        let written = fs::File::create(path).map_err(Error::from).and_then(|f| report.write_csv(f));
        if let Err(e) = written {
            return fail(e);
        }
    }
    eprintln!(
        "classification {:?}  E_rot {:e}  E_rot_conf {:e}  (scale {:e})",
        report.classification, report.e_rot, report.e_rot_conf, report.conf_scale
    );
    match args.assert_zero {
        Some(t) if report.e_rot_conf.abs() > t * report.conf_scale => {
            eprintln!("E_rot_conf exceeds {t:e} x scale");
            EXIT_FAIL
        }
        _ => EXIT_OK,
    }
}

/// Parses `argv` and runs the selected command; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return EXIT_USAGE;
        }
    };
    pool.install(|| match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Catalog(a) => cmd_catalog(a),
        Command::Analyze(a) => cmd_analyze(a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("64x32").unwrap(), vec![64, 32]);
        assert_eq!(parse_grid("8").unwrap(), vec![8]);
        assert!(parse_grid("8xq").is_err());
    }

    #[test]
    fn verify_validation() {
        let mut args = VerifyArgs { dims: vec![4], samples: 0, seed: 1, lambdas: 4, out: None };
        assert_eq!(validate_verify(&args).unwrap_err(), "samples must be ≥ 1");
        args.samples = 3;
        args.dims = vec![2];
        assert!(validate_verify(&args).is_err());
    }

    #[test]
    fn small_campaign_passes() {
        let args = VerifyArgs { dims: vec![3, 4, 7], samples: 20, seed: 5, lambdas: 8, out: None };
        let report = run_verify(&args, &Tolerances::default()).unwrap();
        assert!(report.passed, "{report:#?}");
        assert_eq!(report.checks.len(), 8);
        let p4 = report.checks.iter().find(|c| c.name == "prop_p4").unwrap();
        assert_eq!(p4.evaluated, 40);
    }
}
