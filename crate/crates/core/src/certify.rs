//! Optimality certificates for a candidate triple `(phi, q, lambda)`.
//!
//! None of these checks look at how the triple was produced; they evaluate
//! the weak-duality margin, the complementary-slackness conditions, the
//! saddle-point inequalities and the enlarged-null identity directly from
//! the problem data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{evaluate_size, mixture_density, Alpha, Prior, RandomizedTest, TestingProblem};
use crate::npsolver::{best_response, check_alt_weights, dual_objective};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const WEAK_DUALITY_FLOOR: f64 = 1e-8;
/// Relative floor below which a prior weight counts as outside the support.
pub const SUPPORT_FLOOR: f64 = 1e-9;
/// Largest atom count for which every indicator test is enumerated.
pub const EXHAUSTIVE_MEMBERSHIP_ATOMS: usize = 16;

/// `Z_Q(q) - sum_i lambda_i Z_Pi` together with the mixture itself.
struct Contrast {
    zq: Vec<f64>,
    mix: Vec<f64>,
}

impl Contrast {
    fn new(problem: &TestingProblem, q: &[f64], prior: &Prior) -> Result<Self> {
        check_alt_weights(problem, q)?;
        let zq = problem.alt().combine(q)?;
        let mix = mixture_density(problem.null(), prior)?.values;
        Ok(Self { zq, mix })
    }

    fn upsilon(&self, w: usize) -> f64 {
        self.zq[w] - self.mix[w]
    }

    fn classify(&self, w: usize, tol: f64) -> Region {
        let u = self.upsilon(w);
        let band = tol * (1.0 + self.mix[w]);
        if u > band {
            Region::Upper
        } else if u < -band {
            Region::Lower
        } else {
            Region::Boundary
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Upper,
    Lower,
    Boundary,
}

fn check_phi(problem: &TestingProblem, phi: &RandomizedTest) -> Result<()> {
    if phi.len() != problem.atom_count() {
        return Err(Error::DimensionMismatch {
            field: "phi".into(),
            expected: problem.atom_count(),
            found: phi.len(),
        });
    }
    Ok(())
}

fn check_prior(problem: &TestingProblem, prior: &Prior) -> Result<()> {
    if prior.len() != problem.null().len() {
        return Err(Error::DimensionMismatch {
            field: "prior".into(),
            expected: problem.null().len(),
            found: prior.len(),
        });
    }
    Ok(())
}

/// Largest amount by which `phi` exceeds a null level.
fn size_excess(problem: &TestingProblem, phi: &RandomizedTest) -> Result<(Vec<f64>, f64)> {
    let sizes = evaluate_size(problem, phi)?.per_member;
    let excess = sizes
        .iter()
        .zip(problem.levels())
        .map(|(s, a)| s - a)
        .fold(0.0, f64::max);
    Ok((sizes, excess))
}

/// The dual objective minus the power of `phi` against `q`, split into its
/// three nonnegative parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakDualityReport {
    pub margin: f64,
    /// `E^R[(1 - phi) Upsilon^+]`
    pub unrejected_excess: f64,
    /// `E^R[phi Upsilon^-]`
    pub rejected_deficit: f64,
    /// `sum_i lambda_i (alpha_i - E^R[phi Z_Pi])`
    pub level_slack: f64,
    pub dual_value: f64,
    pub power: f64,
    pub size_feasible: bool,
    pub size_excess: f64,
}

fn weak_duality_parts(
    problem: &TestingProblem,
    phi: &RandomizedTest,
    q: &[f64],
    prior: &Prior,
) -> Result<WeakDualityReport> {
    check_phi(problem, phi)?;
    check_prior(problem, prior)?;
    let c = Contrast::new(problem, q, prior)?;
    let r = problem.reference();
    let n = problem.atom_count();
    let (mut unrejected, mut rejected) = (0.0, 0.0);
    for w in 0..n {
        let u = c.upsilon(w);
        let f = phi.values()[w];
        unrejected += r.weights()[w] * (1.0 - f) * u.max(0.0);
        rejected += r.weights()[w] * f * (-u).max(0.0);
    }
    let (sizes, excess) = size_excess(problem, phi)?;
    let level_slack: f64 = prior
        .weights()
        .iter()
        .zip(problem.levels().iter().zip(&sizes))
        .map(|(l, (a, s))| l * (a - s))
        .sum();
    let dual_value = dual_objective(problem, q, prior)?;
    let power = r.expect_product(phi.values(), &c.zq);
    Ok(WeakDualityReport {
        margin: dual_value - power,
        unrejected_excess: unrejected,
        rejected_deficit: rejected,
        level_slack,
        dual_value,
        power,
        size_feasible: excess <= WEAK_DUALITY_FLOOR,
        size_excess: excess,
    })
}

/// Fails with [`Error::CertificateInconsistency`] if a size-feasible `phi`
/// beats the dual objective by more than `1e-8`.
pub fn check_weak_duality(
    problem: &TestingProblem,
    phi: &RandomizedTest,
    q: &[f64],
    prior: &Prior,
) -> Result<WeakDualityReport> {
    let rep = weak_duality_parts(problem, phi, q, prior)?;
    if rep.size_feasible && rep.margin < -WEAK_DUALITY_FLOOR {
        return Err(Error::CertificateInconsistency { margin: rep.margin });
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlacknessReport {
    /// R-mass where `Z_Q > mix` but `phi < 1 - tol`.
    pub upper_violation: f64,
    /// R-mass where `Z_Q < mix` but `phi > tol`.
    pub lower_violation: f64,
    /// Worst `|E^R[phi Z_Pi] - alpha_i|` over the prior's support.
    pub binding_violation: f64,
    pub boundary_mass: f64,
    pub size_excess: f64,
    pub margin: f64,
    pub tol: f64,
    pub certified: bool,
}

pub fn check_slackness(
    problem: &TestingProblem,
    phi: &RandomizedTest,
    q: &[f64],
    prior: &Prior,
    tol: f64,
) -> Result<SlacknessReport> {
    let wd = weak_duality_parts(problem, phi, q, prior)?;
    let c = Contrast::new(problem, q, prior)?;
    let r = problem.reference().weights();
    let (mut upper, mut lower, mut boundary) = (0.0, 0.0, 0.0);
    for (w, &f) in phi.values().iter().enumerate() {
        match c.classify(w, tol) {
            Region::Upper if f < 1.0 - tol => upper += r[w],
            Region::Lower if f > tol => lower += r[w],
            Region::Boundary => boundary += r[w],
            _ => {}
        }
    }
    let sizes = evaluate_size(problem, phi)?.per_member;
    let floor = SUPPORT_FLOOR * prior.total_mass();
    let binding = prior
        .weights()
        .iter()
        .zip(sizes.iter().zip(problem.levels()))
        .filter(|(l, _)| **l > floor && **l > 0.0)
        .map(|(_, (s, a))| (s - a).abs())
        .fold(0.0, f64::max);
    let certified = upper <= tol
        && lower <= tol
        && binding <= tol
        && wd.size_excess <= tol
        && wd.margin <= tol;
    Ok(SlacknessReport {
        upper_violation: upper,
        lower_violation: lower,
        binding_violation: binding,
        boundary_mass: boundary,
        size_excess: wd.size_excess,
        margin: wd.margin,
        tol,
        certified,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddleReport {
    /// Largest gain of a sampled size-feasible test over `phi` against `Q(q)`.
    pub left_violation: f64,
    /// Same, for the exact best response to `Q(q)`.
    pub left_exact_violation: f64,
    /// `E^{Q(q)}[phi] - min_j E^{Q_j}[phi]`.
    pub right_violation: f64,
    pub trials: usize,
    pub seed: Option<u64>,
    pub passed: bool,
}

/// Scales `phi` down until every null level holds.
fn project_to_levels(problem: &TestingProblem, phi: &mut [f64]) {
    let r = problem.reference();
    let mut scale: f64 = 1.0;
    for (z, &a) in problem.null().members().iter().zip(problem.levels()) {
        let s = r.expect_product(phi, z.values());
        if s > a {
            scale = scale.min(a / s);
        }
    }
    if scale < 1.0 {
        phi.iter_mut().for_each(|v| *v *= scale);
    }
}

fn is_size_feasible(problem: &TestingProblem, phi: &[f64]) -> bool {
    let r = problem.reference();
    problem
        .null()
        .members()
        .iter()
        .zip(problem.levels())
        .all(|(z, &a)| r.expect_product(phi, z.values()) <= a + 1e-12)
}

/// Draws a size-feasible test: even draws are uniform boxes scaled into the
/// level set, odd draws are 0-1 vertices kept only if feasible (after a few
/// rejections the last draw is scaled instead).
pub fn sample_feasible_test<R: Rng>(problem: &TestingProblem, rng: &mut R, draw: usize) -> Vec<f64> {
    let n = problem.atom_count();
    if draw % 2 == 0 {
        let mut phi: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        project_to_levels(problem, &mut phi);
        return phi;
    }
    let mut phi = vec![0.0; n];
    for _ in 0..32 {
        let p: f64 = rng.gen();
        for v in phi.iter_mut() {
            *v = if rng.gen::<f64>() < p { 1.0 } else { 0.0 };
        }
        if is_size_feasible(problem, &phi) {
            return phi;
        }
    }
    project_to_levels(problem, &mut phi);
    phi
}

pub fn check_saddle(
    problem: &TestingProblem,
    phi: &RandomizedTest,
    q: &[f64],
    trials: usize,
    seed: Option<u64>,
    tol: f64,
) -> Result<SaddleReport> {
    check_phi(problem, phi)?;
    check_alt_weights(problem, q)?;
    if trials > 0 && seed.is_none() {
        return Err(Error::SeedRequired { trials });
    }
    let (_, excess) = size_excess(problem, phi)?;
    if excess > tol {
        return Err(Error::NotCertified(format!(
            "test exceeds its level by {excess:e}"
        )));
    }
    let r = problem.reference();
    let zq = problem.alt().combine(q)?;
    let own = r.expect_product(phi.values(), &zq);

    let mut left = f64::NEG_INFINITY;
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in 0..trials {
            let cand = sample_feasible_test(problem, &mut rng, t);
            left = left.max(r.expect_product(&cand, &zq) - own);
        }
    }
    let (best, _) = best_response(problem, q)?;
    let left_exact = best - own;
    let right = problem
        .alt()
        .members()
        .iter()
        .map(|z| own - r.expect_product(phi.values(), z.values()))
        .fold(f64::NEG_INFINITY, f64::max);
    let left_violation = if trials == 0 { 0.0 } else { left };
    Ok(SaddleReport {
        left_violation,
        left_exact_violation: left_exact,
        right_violation: right,
        trials,
        seed,
        passed: left_violation <= tol && left_exact <= tol && right <= tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureDecomposition {
    pub upper: Vec<usize>,
    pub lower: Vec<usize>,
    pub boundary: Vec<usize>,
    /// Randomization on each boundary atom, aligned with `boundary`.
    pub delta: Vec<f64>,
    pub tol: f64,
}

impl StructureDecomposition {
    /// Reassembles `1 on upper, 0 on lower, delta on boundary`.
    pub fn rebuild(&self) -> Vec<f64> {
        let n = self.upper.len() + self.lower.len() + self.boundary.len();
        let mut phi = vec![0.0; n];
        for &w in &self.upper {
            phi[w] = 1.0;
        }
        for (&w, &d) in self.boundary.iter().zip(&self.delta) {
            phi[w] = d;
        }
        phi
    }
}

pub fn decompose_structure(
    problem: &TestingProblem,
    phi: &RandomizedTest,
    q: &[f64],
    prior: &Prior,
    tol: f64,
) -> Result<StructureDecomposition> {
    let slack = check_slackness(problem, phi, q, prior, tol)?;
    if !slack.certified {
        return Err(Error::NotCertified(format!(
            "slackness violations upper {:e}, lower {:e}, binding {:e}, margin {:e}",
            slack.upper_violation, slack.lower_violation, slack.binding_violation, slack.margin
        )));
    }
    let c = Contrast::new(problem, q, prior)?;
    let mut out = StructureDecomposition {
        upper: vec![],
        lower: vec![],
        boundary: vec![],
        delta: vec![],
        tol,
    };
    for w in 0..problem.atom_count() {
        match c.classify(w, tol) {
            Region::Upper => out.upper.push(w),
            Region::Lower => out.lower.push(w),
            Region::Boundary => {
                out.boundary.push(w);
                out.delta.push(phi.values()[w]);
            }
        }
    }
    Ok(out)
}

/// The prior rewritten as a total mass times a normalized null density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CkCertificate {
    pub z_hat: f64,
    /// Normalized mixture density; absent when the prior is zero.
    pub w_hat: Option<Vec<f64>>,
    pub identity_residual: f64,
    /// Largest `E^R[phi W] - alpha` over the checked size-feasible tests.
    pub membership_residual: f64,
    pub membership_tests: usize,
    /// True when every feasible indicator test was checked; membership is
    /// otherwise supported by a deterministic sample only.
    pub membership_exhaustive: bool,
}

fn indicator_tests(problem: &TestingProblem, w_hat: &[f64]) -> (Vec<Vec<f64>>, bool) {
    let n = problem.atom_count();
    if n <= EXHAUSTIVE_MEMBERSHIP_ATOMS {
        let tests = (0u32..(1u32 << n))
            .map(|mask| (0..n).map(|w| f64::from((mask >> w) & 1)).collect::<Vec<f64>>())
            .filter(|phi| is_size_feasible(problem, phi))
            .collect();
        return (tests, true);
    }
    // singletons and nested prefixes ordered by W against the largest null density
    let mut order: Vec<usize> = (0..n).collect();
    let ratio = |w: usize| {
        let top = problem
            .null()
            .members()
            .iter()
            .map(|z| z.values()[w])
            .fold(0.0, f64::max);
        if top > 0.0 {
            w_hat[w] / top
        } else {
            0.0
        }
    };
    order.sort_by(|&a, &b| ratio(b).partial_cmp(&ratio(a)).unwrap().then(a.cmp(&b)));
    let mut tests = Vec::new();
    for w in 0..n {
        let mut phi = vec![0.0; n];
        phi[w] = 1.0;
        tests.push(phi);
    }
    let mut prefix = vec![0.0; n];
    for &w in &order {
        prefix[w] = 1.0;
        tests.push(prefix.clone());
    }
    tests.retain(|phi| is_size_feasible(problem, phi));
    (tests, false)
}

pub fn ck_certificate(
    problem: &TestingProblem,
    phi: &RandomizedTest,
    q: &[f64],
    prior: &Prior,
    tol: f64,
) -> Result<CkCertificate> {
    let alpha = match problem.alpha() {
        Alpha::Scalar(a) => *a,
        Alpha::PerMember(_) => return Err(Error::ScalarAlphaRequired),
    };
    let slack = check_slackness(problem, phi, q, prior, tol)?;
    if !slack.certified {
        return Err(Error::NotCertified(
            "complementary slackness fails".to_string(),
        ));
    }
    let r = problem.reference();
    let mix = mixture_density(problem.null(), prior)?;
    let z_hat = mix.total_mass;
    let w_hat = mix.normalized;
    let zq = problem.alt().combine(q)?;
    // z_hat * W_hat reconstructs the mixture; zero prior leaves it at 0
    let scaled: Vec<f64> = match &w_hat {
        Some(w) => w.iter().map(|v| z_hat * v).collect(),
        None => vec![0.0; problem.atom_count()],
    };
    let excess: Vec<f64> = zq.iter().zip(&scaled).map(|(a, b)| (a - b).max(0.0)).collect();
    let rhs = r.expect(&excess) + alpha * z_hat;
    let power = r.expect_product(phi.values(), &zq);
    let identity_residual = (power - rhs).abs();

    let (membership_residual, membership_tests, membership_exhaustive) = match &w_hat {
        Some(w) => {
            let (mut tests, exhaustive) = indicator_tests(problem, w);
            tests.push(phi.values().to_vec());
            let worst = tests
                .iter()
                .map(|t| r.expect_product(t, w) - alpha)
                .fold(f64::NEG_INFINITY, f64::max);
            (worst, tests.len(), exhaustive)
        }
        None => (0.0, 0, false),
    };
    Ok(CkCertificate {
        z_hat,
        w_hat,
        identity_residual,
        membership_residual,
        membership_tests,
        membership_exhaustive,
    })
}
