//! Command-line driver: argument parsing, problem files, report writing and
//! exit codes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::certify::{
    check_saddle, check_slackness, check_weak_duality, ck_certificate, decompose_structure,
    CkCertificate, SaddleReport, SlacknessReport, StructureDecomposition, WeakDualityReport,
};
use crate::error::Error;
use crate::families::{gaussian_xbar_problem, lfp_report, GaussianXbarSpec, LfpReport};
use crate::model::{validate_problem, Alpha, Prior, ProblemSpec, RandomizedTest, TestingProblem};
use crate::npsolver::{scan_dual_ray, solve_maxmin, SolveReport};
use crate::oracle::{classic_np_for, grid_bruteforce, ClassicNpResult, GridResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;

pub const SADDLE_TRIALS: usize = 1000;
pub const SADDLE_TOL: f64 = 1e-8;
pub const CHAIN_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-8;
pub const DEFAULT_GAUSSIAN_ALPHA: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(name = "npdual", version, about = "Composite Neyman-Pearson tests via LP duality")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem file and certify the result.
    Solve(CommonArgs),
    /// Certify a candidate (or the solver's own output) with a seeded saddle check.
    Certify(CommonArgs),
    /// Solve a Gaussian sample-mean example and report the least favorable prior.
    ExampleGaussian(GaussianArgs),
    /// Compare the solver with the likelihood-ratio test and a grid search.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1e-7)]
    pub tol_gap: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub tol_slack: f64,
    #[arg(long)]
    pub emit_plot_data: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GaussianArgs {
    /// Problem file with a `gaussian` key; ignored when `--case` is given.
    #[arg(long, required_unless_present = "case")]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub case: Option<u8>,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    #[arg(long, default_value_t = 1e-7)]
    pub tol_gap: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub tol_slack: f64,
    #[arg(long)]
    pub emit_plot_data: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
}

/// Candidate solution supplied to `certify`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    pub phi: Vec<f64>,
    pub alt_weights: Vec<f64>,
    pub prior: Vec<f64>,
}

/// On-disk problem file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    #[serde(default)]
    pub atoms: Vec<String>,
    #[serde(rename = "R", default)]
    pub weights: Vec<f64>,
    #[serde(default)]
    pub null: Vec<Vec<f64>>,
    #[serde(default)]
    pub alt: Vec<Vec<f64>>,
    pub alpha: Option<Alpha>,
    pub gaussian: Option<GaussianXbarSpec>,
    pub candidate: Option<Candidate>,
}

impl InputFile {
    pub fn problem(&self) -> Result<TestingProblem, Error> {
        let alpha = self
            .alpha
            .clone()
            .ok_or_else(|| Error::InvalidSpec("missing field `alpha`".into()))?;
        validate_problem(&ProblemSpec {
            atoms: self.atoms.clone(),
            weights: self.weights.clone(),
            null: self.null.clone(),
            alt: self.alt.clone(),
            alpha,
        })
    }
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Validation(String),
    Certification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Certification(_) => EXIT_CERTIFICATION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Certification(m) => write!(f, "certification failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalBreakdown(_)
            | Error::Internal(_)
            | Error::CertificateInconsistency { .. }
            | Error::NotCertified(_)
            | Error::NotSolved(_) => CliError::Certification(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

/// Fixed summary fields shared by `report.json` and `certificate.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSummary {
    pub gap: f64,
    pub upper_violation: f64,
    pub lower_violation: f64,
    pub binding_violation: f64,
    /// Absent when the triple fails slackness and no identity can be formed.
    pub z_hat: Option<f64>,
    pub identity_residual: Option<f64>,
    pub chain_violation: f64,
    pub saddle_passed: Option<bool>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProblemSummary {
    pub atoms: Vec<String>,
    pub null_members: usize,
    pub alt_members: usize,
    pub alpha: Vec<f64>,
}

impl ProblemSummary {
    fn of(problem: &TestingProblem) -> Self {
        Self {
            atoms: problem.reference().atoms().to_vec(),
            null_members: problem.null().len(),
            alt_members: problem.alt().len(),
            alpha: problem.levels().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub gap: f64,
    pub slack: f64,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct SolveOutput {
    pub problem: ProblemSummary,
    pub tolerances: Tolerances,
    pub solve: SolveReport,
    pub weak_duality: WeakDualityReport,
    pub slackness: SlacknessReport,
    pub structure: Option<StructureDecomposition>,
    pub ck: Option<CkCertificate>,
    pub saddle: Option<SaddleReport>,
    pub certificate: CertificateSummary,
}

/// Contents of `certificate.json`.
#[derive(Debug, Clone, Serialize)]
pub struct CertifyOutput {
    pub problem: ProblemSummary,
    pub tolerances: Tolerances,
    pub source: String,
    pub test: RandomizedTest,
    pub alt_weights: Vec<f64>,
    pub prior: Prior,
    pub weak_duality: WeakDualityReport,
    pub slackness: SlacknessReport,
    pub structure: Option<StructureDecomposition>,
    pub ck: Option<CkCertificate>,
    pub saddle: Option<SaddleReport>,
    pub certificate: CertificateSummary,
}

/// Contents of `lfp_report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct GaussianOutput {
    pub spec: GaussianXbarSpec,
    pub alpha: f64,
    pub lfp: LfpReport,
    pub lower_value: f64,
    pub middle_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridCheck {
    pub result: Option<GridResult>,
    pub skipped: Option<String>,
    /// `grid value - lower value`; never positive beyond rounding.
    pub excess: Option<f64>,
}

/// Contents of `oracle_report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct OracleOutput {
    pub problem: ProblemSummary,
    pub lower_value: f64,
    pub classic: Option<ClassicNpResult>,
    pub classic_difference: Option<f64>,
    pub grid: GridCheck,
    pub passed: bool,
}

fn check_tolerance(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{name} must be positive, got {v}")))
    }
}

pub fn read_input(path: &Path) -> Result<InputFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("serializing {name}: {e}")))?;
    text.push('\n');
    write_file(dir, name, &text)
}

fn write_csv(dir: &Path, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(format!("{name}: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Io(format!("{name}: {e}")))?;
    write_file(dir, name, &String::from_utf8_lossy(&bytes))
}

/// Everything the certificates say about `(phi, q, prior)`.
pub struct Certificates {
    pub weak_duality: WeakDualityReport,
    pub slackness: SlacknessReport,
    pub structure: Option<StructureDecomposition>,
    pub ck: Option<CkCertificate>,
    pub saddle: Option<SaddleReport>,
    pub saddle_required: bool,
}

pub fn certify_all(
    problem: &TestingProblem,
    phi: &RandomizedTest,
    q: &[f64],
    prior: &Prior,
    seed: Option<u64>,
    tol_slack: f64,
) -> Result<Certificates, Error> {
    let saddle = match seed {
        Some(s) => optional(check_saddle(problem, phi, q, SADDLE_TRIALS, Some(s), SADDLE_TOL))?,
        None => None,
    };
    Ok(Certificates {
        weak_duality: check_weak_duality(problem, phi, q, prior)?,
        slackness: check_slackness(problem, phi, q, prior, tol_slack)?,
        structure: optional(decompose_structure(problem, phi, q, prior, tol_slack))?,
        ck: optional(ck_certificate(problem, phi, q, prior, tol_slack))?,
        saddle_required: seed.is_some(),
        saddle,
    })
}

/// Certificates that only exist for optimal triples come back as `None`.
fn optional<T>(r: Result<T, Error>) -> Result<Option<T>, Error> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NotCertified(msg)) => {
            log::info!("{msg}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn summarize(c: &Certificates, gap: f64, chain_violation: f64, tol_gap: f64, tol_slack: f64) -> CertificateSummary {
    let saddle_passed = match &c.saddle {
        Some(s) => Some(s.passed),
        None if c.saddle_required => Some(false),
        None => None,
    };
    let passed = gap <= tol_gap
        && chain_violation <= CHAIN_TOL
        && c.slackness.certified
        && c.ck.as_ref().is_some_and(|ck| ck.identity_residual <= tol_slack)
        && saddle_passed.unwrap_or(true);
    CertificateSummary {
        gap,
        upper_violation: c.slackness.upper_violation,
        lower_violation: c.slackness.lower_violation,
        binding_violation: c.slackness.binding_violation,
        z_hat: c.ck.as_ref().map(|ck| ck.z_hat),
        identity_residual: c.ck.as_ref().map(|ck| ck.identity_residual),
        chain_violation,
        saddle_passed,
        passed,
    }
}

/// How far the reported values are from `lower <= middle <= dual`.
pub fn chain_violation(report: &SolveReport) -> f64 {
    (report.lower_value - report.middle_value)
        .max(report.middle_value - report.dual_value)
        .max(0.0)
}

/// Solves and certifies; the building block of `solve`.
pub fn solve_and_certify(
    problem: &TestingProblem,
    seed: Option<u64>,
    tol_gap: f64,
    tol_slack: f64,
) -> Result<SolveOutput, Error> {
    let solve = solve_maxmin(problem)?;
    let c = certify_all(
        problem,
        &solve.primal.test,
        &solve.dual.alt_weights,
        &solve.dual.prior,
        seed,
        tol_slack,
    )?;
    let certificate = summarize(&c, solve.gap, chain_violation(&solve), tol_gap, tol_slack);
    Ok(SolveOutput {
        problem: ProblemSummary::of(problem),
        tolerances: Tolerances {
            gap: tol_gap,
            slack: tol_slack,
        },
        solve,
        weak_duality: c.weak_duality,
        slackness: c.slackness,
        structure: c.structure,
        ck: c.ck,
        saddle: c.saddle,
        certificate,
    })
}

/// Shortest decimal text that round-trips.
fn fmt(v: f64) -> String {
    v.to_string()
}

fn write_test_csv(dir: &Path, problem: &TestingProblem, phi: &RandomizedTest) -> Result<PathBuf, CliError> {
    let mut header = vec!["atom".to_string(), "R".to_string()];
    header.extend((0..problem.null().len()).map(|i| format!("null_{i}")));
    header.extend((0..problem.alt().len()).map(|j| format!("alt_{j}")));
    header.push("phi".into());
    let r = problem.reference();
    let rows: Vec<Vec<String>> = (0..problem.atom_count())
        .map(|w| {
            let mut row = vec![r.atoms()[w].clone(), fmt(r.weights()[w])];
            row.extend(problem.null().members().iter().map(|z| fmt(z.values()[w])));
            row.extend(problem.alt().members().iter().map(|z| fmt(z.values()[w])));
            row.push(fmt(phi.values()[w]));
            row
        })
        .collect();
    write_csv(dir, "test.csv", &header, &rows)
}

fn write_dual_ray_csv(dir: &Path, problem: &TestingProblem, report: &SolveReport) -> Result<PathBuf, CliError> {
    let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).collect();
    let scan = scan_dual_ray(
        problem,
        &report.dual.alt_weights,
        report.dual.prior.weights(),
        &grid,
    )?;
    let rows: Vec<Vec<String>> = scan
        .scales
        .iter()
        .zip(&scan.values)
        .map(|(s, v)| vec![fmt(*s), fmt(*v)])
        .collect();
    write_csv(dir, "dual_ray.csv", &["scale".into(), "dual_value".into()], &rows)
}

pub fn run_solve(args: &CommonArgs) -> Result<String, CliError> {
    check_tolerance("--tol-gap", args.tol_gap)?;
    check_tolerance("--tol-slack", args.tol_slack)?;
    let input = read_input(&args.input)?;
    let problem = input.problem()?;
    let out = solve_and_certify(&problem, args.seed, args.tol_gap, args.tol_slack)?;
    let path = write_json(&args.output_dir, "report.json", &out)?;
    if args.emit_plot_data {
        write_dual_ray_csv(&args.output_dir, &problem, &out.solve)?;
        write_test_csv(&args.output_dir, &problem, &out.solve.primal.test)?;
    }
    let mut msg = String::new();
    let _ = writeln!(
        msg,
        "lower {:.12} middle {:.12} dual {:.12} gap {:.3e}",
        out.solve.lower_value, out.solve.middle_value, out.solve.dual_value, out.solve.gap
    );
    let _ = write!(msg, "wrote {}", path.display());
    if out.certificate.passed {
        Ok(msg)
    } else {
        eprintln!("{msg}");
        Err(CliError::Certification(format!(
            "see {} (gap {:.3e}, slackness certified {})",
            path.display(),
            out.certificate.gap,
            out.slackness.certified
        )))
    }
}

pub fn run_certify(args: &CommonArgs) -> Result<String, CliError> {
    check_tolerance("--tol-gap", args.tol_gap)?;
    check_tolerance("--tol-slack", args.tol_slack)?;
    let seed = args.seed.ok_or(Error::SeedRequired {
        trials: SADDLE_TRIALS,
    })?;
    let input = read_input(&args.input)?;
    let problem = input.problem()?;
    let (source, phi, q, prior, gap, chain) = match &input.candidate {
        Some(c) => {
            let phi = RandomizedTest::new(c.phi.clone())?;
            let prior = Prior::new(c.prior.clone())?;
            let wd = check_weak_duality(&problem, &phi, &c.alt_weights, &prior)?;
            let gap = wd.dual_value - wd.power;
            ("candidate", phi, c.alt_weights.clone(), prior, gap, 0.0)
        }
        None => {
            let s = solve_maxmin(&problem)?;
            let chain = chain_violation(&s);
            ("solver", s.primal.test, s.dual.alt_weights, s.dual.prior, s.gap, chain)
        }
    };
    let c = certify_all(&problem, &phi, &q, &prior, Some(seed), args.tol_slack)?;
    let certificate = summarize(&c, gap, chain, args.tol_gap, args.tol_slack);
    let passed = certificate.passed && c.weak_duality.size_feasible;
    let out = CertifyOutput {
        problem: ProblemSummary::of(&problem),
        tolerances: Tolerances {
            gap: args.tol_gap,
            slack: args.tol_slack,
        },
        source: source.into(),
        test: phi,
        alt_weights: q,
        prior,
        weak_duality: c.weak_duality,
        slackness: c.slackness,
        structure: c.structure,
        ck: c.ck,
        saddle: c.saddle,
        certificate: CertificateSummary { passed, ..certificate },
    };
    let path = write_json(&args.output_dir, "certificate.json", &out)?;
    if passed {
        Ok(format!("certified {source}; wrote {}", path.display()))
    } else {
        Err(CliError::Certification(format!("see {}", path.display())))
    }
}

pub fn run_example_gaussian(args: &GaussianArgs) -> Result<String, CliError> {
    check_tolerance("--tol-gap", args.tol_gap)?;
    check_tolerance("--tol-slack", args.tol_slack)?;
    let (spec, alpha) = match (args.case, &args.input) {
        (Some(case), _) => (
            GaussianXbarSpec::preset(case).expect("clap restricts the case"),
            DEFAULT_GAUSSIAN_ALPHA,
        ),
        (None, Some(path)) => {
            let input = read_input(path)?;
            let spec = input
                .gaussian
                .ok_or_else(|| CliError::Validation("missing field `gaussian`".into()))?;
            let alpha = match input.alpha {
                None => DEFAULT_GAUSSIAN_ALPHA,
                Some(a) => a.scalar().ok_or(Error::ScalarAlphaRequired)?,
            };
            (spec, alpha)
        }
        (None, None) => return Err(CliError::Validation("either --case or --input is required".into())),
    };
    let problem = gaussian_xbar_problem(&spec, alpha)?;
    let solve = solve_maxmin(&problem)?;
    let lfp = lfp_report(&problem, &spec, &solve)?;
    let passed = lfp.check_passed && solve.gap <= args.tol_gap;
    let out = GaussianOutput {
        spec: spec.clone(),
        alpha,
        lower_value: solve.lower_value,
        middle_value: solve.middle_value,
        dual_value: solve.dual_value,
        gap: solve.gap,
        passed,
        lfp,
    };
    let path = write_json(&args.output_dir, "lfp_report.json", &out)?;
    let rows: Vec<Vec<String>> = spec
        .null_members()
        .iter()
        .zip(solve.dual.prior.weights())
        .map(|(&(xi, s2), w)| vec![fmt(xi), fmt(s2), fmt(*w)])
        .collect();
    write_csv(
        &args.output_dir,
        "prior.csv",
        &["xi".into(), "sigma_sq".into(), "weight".into()],
        &rows,
    )?;
    if args.emit_plot_data {
        write_dual_ray_csv(&args.output_dir, &problem, &solve)?;
        write_test_csv(&args.output_dir, &problem, &solve.primal.test)?;
    }
    let msg = format!("{}; wrote {}", out.lfp.note, path.display());
    if passed {
        Ok(msg)
    } else {
        Err(CliError::Certification(msg))
    }
}

pub fn run_oracle_check(args: &OracleArgs) -> Result<String, CliError> {
    let input = read_input(&args.input)?;
    let problem = input.problem()?;
    let solve = solve_maxmin(&problem)?;
    let lower = solve.lower_value;
    let singleton = problem.null().len() == 1 && problem.alt().len() == 1;
    let classic = if singleton {
        Some(classic_np_for(&problem)?)
    } else {
        None
    };
    let classic_difference = classic.as_ref().map(|c| (c.power - lower).abs());
    let grid = match grid_bruteforce(&problem, args.steps) {
        Ok(g) => GridCheck {
            excess: Some(g.value - lower),
            result: Some(g),
            skipped: None,
        },
        Err(Error::TooLarge { points, limit }) => GridCheck {
            result: None,
            skipped: Some(format!("{points:e} grid points exceed the limit {limit:e}")),
            excess: None,
        },
        Err(e) => return Err(e.into()),
    };
    let passed = classic_difference.map_or(true, |d| d <= ORACLE_TOL)
        && grid.excess.map_or(true, |e| e <= ORACLE_TOL);
    let out = OracleOutput {
        problem: ProblemSummary::of(&problem),
        lower_value: lower,
        classic,
        classic_difference,
        grid,
        passed,
    };
    let path = write_json(&args.output_dir, "oracle_report.json", &out)?;
    if passed {
        Ok(format!("oracles agree; wrote {}", path.display()))
    } else {
        Err(CliError::Certification(format!("see {}", path.display())))
    }
}

/// Runs one command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Certify(a) => run_certify(a),
        Command::ExampleGaussian(a) => run_example_gaussian(a),
        Command::OracleCheck(a) => run_oracle_check(a),
    };
    match result {
        Ok(msg) => {
            println!("{msg}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("npdual: {e}");
            e.exit_code()
        }
    }
}
