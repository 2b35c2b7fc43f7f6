//! Discretized normal-mean/variance families for the sample mean of `n`
//! i.i.d. normal observations.
//!
//! The null family is indexed by a grid of `(xi, sigma^2)` pairs lying on one
//! side of `sigma0^2`; the alternative is the single law `N(xi1, sigma1^2)`.
//! Only the sufficient statistic `X̄ ~ N(xi, sigma^2 / n)` is modelled, binned
//! on `x_grid`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Alpha, HypothesisFamily, ReferenceMeasure, Side, TestingProblem};
use crate::npsolver::SolveReport;

pub const MAX_BIN_PROBABILITY: f64 = 0.5;
pub const BOUNDARY_MASS_THRESHOLD: f64 = 0.9;
pub const XBAR_DISTANCE_THRESHOLD: f64 = 0.02;
pub const TRUNCATION_EDGE_THRESHOLD: f64 = 1e-6;

/// Which side of `sigma0^2` the null variances lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceSide {
    /// `sigma^2 >= sigma0^2`
    Upper,
    /// `sigma^2 <= sigma0^2`
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianXbarSpec {
    pub n: usize,
    pub xi1: f64,
    pub sigma1_sq: f64,
    pub sigma0_sq: f64,
    pub xi_grid: Vec<f64>,
    pub sigma_sq_grid: Vec<f64>,
    /// Bin edges for the sample mean.
    pub x_grid: Vec<f64>,
    pub side: VarianceSide,
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl GaussianXbarSpec {
    /// Null variances at or above `sigma0^2 = 2`, alternative variance 1.
    pub fn case1() -> Self {
        Self {
            n: 4,
            xi1: 0.0,
            sigma1_sq: 1.0,
            sigma0_sq: 2.0,
            xi_grid: linspace(-2.0, 2.0, 21),
            sigma_sq_grid: vec![2.0, 3.0, 4.0],
            x_grid: linspace(-4.0, 4.0, 82),
            side: VarianceSide::Upper,
        }
    }

    /// Null variances at or below `sigma0^2 = 1`, alternative variance 2.
    pub fn case2() -> Self {
        Self {
            n: 4,
            xi1: 0.0,
            sigma1_sq: 2.0,
            sigma0_sq: 1.0,
            xi_grid: linspace(-2.0, 2.0, 21),
            sigma_sq_grid: vec![0.25, 0.5, 1.0],
            x_grid: linspace(-4.0, 4.0, 82),
            side: VarianceSide::Lower,
        }
    }

    pub fn preset(case: u8) -> Option<Self> {
        match case {
            1 => Some(Self::case1()),
            2 => Some(Self::case2()),
            _ => None,
        }
    }

    /// Same ranges with twice as many `xi` points and bins.
    pub fn refined(&self) -> Self {
        let refine = |g: &[f64]| {
            let mut out = Vec::with_capacity(2 * g.len());
            for w in g.windows(2) {
                out.push(w[0]);
                out.push(0.5 * (w[0] + w[1]));
            }
            out.extend(g.last());
            out
        };
        Self {
            xi_grid: refine(&self.xi_grid),
            x_grid: refine(&self.x_grid),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        for (name, v) in [("sigma1_sq", self.sigma1_sq), ("sigma0_sq", self.sigma0_sq)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(&format!("{name} must be positive"));
            }
        }
        if !self.xi1.is_finite() {
            return bad("xi1 must be finite");
        }
        for (name, g, min) in [
            ("xi_grid", &self.xi_grid, 1),
            ("sigma_sq_grid", &self.sigma_sq_grid, 1),
            ("x_grid", &self.x_grid, 2),
        ] {
            if g.len() < min || g.iter().any(|v| !v.is_finite()) || !strictly_increasing(g) {
                return bad(&format!(
                    "{name} must be finite and strictly increasing with at least {min} points"
                ));
            }
        }
        if self.sigma_sq_grid[0] <= 0.0 {
            return bad("sigma_sq_grid must be positive");
        }
        let consistent = match self.side {
            VarianceSide::Upper => self.sigma_sq_grid.iter().all(|&s| s >= self.sigma0_sq),
            VarianceSide::Lower => self.sigma_sq_grid.iter().all(|&s| s <= self.sigma0_sq),
        };
        if !consistent {
            return bad("sigma_sq_grid lies on the wrong side of sigma0_sq");
        }
        Ok(())
    }

    /// `(xi, sigma^2)` of each null member, in problem order (xi-major).
    pub fn null_members(&self) -> Vec<(f64, f64)> {
        self.xi_grid
            .iter()
            .flat_map(|&xi| self.sigma_sq_grid.iter().map(move |&s| (xi, s)))
            .collect()
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        self.x_grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn equal_variances(&self) -> bool {
        (self.sigma0_sq - self.sigma1_sq).abs() <= 1e-12 * self.sigma0_sq.max(self.sigma1_sq)
    }

    /// Bin probabilities of `X̄ ~ N(mean, var / n)` by the midpoint rule,
    /// renormalized over the grid.
    fn bin_probabilities(&self, mean: f64, var: f64, label: &str) -> Result<Vec<f64>> {
        let s2 = var / self.n as f64;
        let norm = (2.0 * std::f64::consts::PI * s2).sqrt();
        let raw: Vec<f64> = self
            .x_grid
            .windows(2)
            .map(|w| {
                let x = 0.5 * (w[0] + w[1]);
                (-(x - mean).powi(2) / (2.0 * s2)).exp() / norm * (w[1] - w[0])
            })
            .collect();
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(Error::GridTooCoarse {
                member: label.to_string(),
                bin: 0,
                probability: 0.0,
            });
        }
        let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
        if let Some((bin, &probability)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| **p > MAX_BIN_PROBABILITY)
        {
            return Err(Error::GridTooCoarse {
                member: label.to_string(),
                bin,
                probability,
            });
        }
        Ok(probs)
    }
}

/// Builds the binned testing problem. The reference measure is the uniform
/// mixture of every member's bin distribution; bins no member charges are
/// dropped.
pub fn gaussian_xbar_problem(spec: &GaussianXbarSpec, alpha: f64) -> Result<TestingProblem> {
    spec.validate()?;
    let nulls = spec
        .null_members()
        .iter()
        .map(|&(xi, s)| spec.bin_probabilities(xi, s, &format!("null(xi={xi}, sigma_sq={s})")))
        .collect::<Result<Vec<_>>>()?;
    let alt = spec.bin_probabilities(spec.xi1, spec.sigma1_sq, "alt")?;
    let bins = alt.len();
    let members = (nulls.len() + 1) as f64;
    let raw_r: Vec<f64> = (0..bins)
        .map(|b| (nulls.iter().map(|p| p[b]).sum::<f64>() + alt[b]) / members)
        .collect();
    let keep: Vec<usize> = (0..bins).filter(|&b| raw_r[b] > 0.0).collect();
    let centers = spec.bin_centers();
    let atoms = keep.iter().map(|&b| format!("{:.6}", centers[b])).collect();
    let reference = ReferenceMeasure::from_unnormalized(atoms, keep.iter().map(|&b| raw_r[b]).collect())?;
    let r = reference.weights();
    let to_density = |p: &Vec<f64>| keep.iter().enumerate().map(|(k, &b)| p[b] / r[k]).collect::<Vec<f64>>();
    let null = HypothesisFamily::from_values(&reference, Side::Null, nulls.iter().map(to_density).collect())?;
    let alt = HypothesisFamily::from_values(&reference, Side::Alternative, vec![to_density(&alt)])?;
    TestingProblem::new(reference, null, alt, Alpha::Scalar(alpha))
}

/// Shape of the least favorable prior found by the solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LfpReport {
    pub side: VarianceSide,
    pub prior_total_mass: f64,
    /// Fraction of prior mass on members with `sigma^2 = sigma0^2`.
    pub prior_mass_at_boundary_sigma: f64,
    /// `xi` carrying the most prior mass (summed over variances).
    pub prior_mode_xi: f64,
    /// Grid point nearest `xi1`.
    pub nearest_xi1: f64,
    /// Sup-norm distance between the bin laws of `X̄` under the normalized
    /// prior mixture and under the alternative.
    pub xbar_density_distance: Option<f64>,
    /// Prior mass fraction on the outermost variance of the grid.
    pub truncation_edge_mass: f64,
    /// Sup-norm distance of the prior's `xi`-marginal from the binned
    /// `N(xi1, (sigma1^2 - sigma0^2) / n)` weights, when `sigma1^2 > sigma0^2`.
    pub xi_marginal_distance: Option<f64>,
    pub equal_variances: bool,
    pub lower_value: f64,
    pub gap: f64,
    pub check_passed: bool,
    pub note: String,
}

pub fn lfp_report(
    problem: &TestingProblem,
    spec: &GaussianXbarSpec,
    report: &SolveReport,
) -> Result<LfpReport> {
    let labels = spec.null_members();
    let prior = report.dual.prior.weights();
    if prior.len() != labels.len() || prior.len() != problem.null().len() {
        return Err(Error::NotSolved(format!(
            "prior has {} weights for {} null members",
            prior.len(),
            labels.len()
        )));
    }
    if report.primal.test.len() != problem.atom_count() {
        return Err(Error::NotSolved("test length differs from atom count".into()));
    }
    let total = report.dual.prior.total_mass();
    let frac = |pred: &dyn Fn(f64) -> bool| -> f64 {
        if total <= 0.0 {
            return 0.0;
        }
        labels
            .iter()
            .zip(prior)
            .filter(|((_, s), _)| pred(*s))
            .map(|(_, w)| w)
            .sum::<f64>()
            / total
    };
    let tol = 1e-9 * spec.sigma0_sq;
    let boundary_mass = frac(&|s| (s - spec.sigma0_sq).abs() <= tol);
    let edge = match spec.side {
        VarianceSide::Upper => *spec.sigma_sq_grid.last().unwrap(),
        VarianceSide::Lower => spec.sigma_sq_grid[0],
    };
    let truncation_edge_mass = if (edge - spec.sigma0_sq).abs() <= tol {
        0.0
    } else {
        frac(&|s| (s - edge).abs() <= 1e-12 * edge)
    };

    let xi_marginal: Vec<f64> = spec
        .xi_grid
        .iter()
        .enumerate()
        .map(|(k, _)| {
            (0..spec.sigma_sq_grid.len())
                .map(|j| prior[k * spec.sigma_sq_grid.len() + j])
                .sum()
        })
        .collect();
    let mode = xi_marginal
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, &w)| if w > acc.1 { (k, w) } else { acc })
        .0;
    let nearest = spec
        .xi_grid
        .iter()
        .copied()
        .min_by(|a, b| (a - spec.xi1).abs().partial_cmp(&(b - spec.xi1).abs()).unwrap())
        .unwrap();

    let r = problem.reference().weights();
    let zq = problem.alt().members()[0].values();
    let xbar_density_distance = (total > 0.0).then(|| {
        let mix = problem.null().combine(prior).unwrap();
        (0..problem.atom_count())
            .map(|b| (r[b] * mix[b] / total - r[b] * zq[b]).abs())
            .fold(0.0, f64::max)
    });

    let xi_marginal_distance = (spec.sigma1_sq > spec.sigma0_sq && total > 0.0).then(|| {
        let var = (spec.sigma1_sq - spec.sigma0_sq) / spec.n as f64;
        let target: Vec<f64> = spec
            .xi_grid
            .iter()
            .map(|xi| (-(xi - spec.xi1).powi(2) / (2.0 * var)).exp())
            .collect();
        let tsum: f64 = target.iter().sum();
        xi_marginal
            .iter()
            .zip(&target)
            .map(|(m, t)| (m / total - t / tsum).abs())
            .fold(0.0, f64::max)
    });

    let equal_variances = spec.equal_variances();
    let (check_passed, note) = if equal_variances {
        (
            true,
            "equal variances: the boundary null member coincides with the alternative's variance".to_string(),
        )
    } else {
        match spec.side {
            VarianceSide::Upper => {
                let ok = boundary_mass >= BOUNDARY_MASS_THRESHOLD
                    && spec.xi_grid[mode] == nearest
                    && truncation_edge_mass <= TRUNCATION_EDGE_THRESHOLD;
                (
                    ok,
                    format!(
                        "prior mass at sigma0^2 {boundary_mass:.6} (need >= {BOUNDARY_MASS_THRESHOLD}), mode xi {} (need {nearest})",
                        spec.xi_grid[mode]
                    ),
                )
            }
            VarianceSide::Lower => {
                let d = xbar_density_distance.unwrap_or(f64::INFINITY);
                (
                    d <= XBAR_DISTANCE_THRESHOLD,
                    format!("X̄ bin-law distance {d:.3e} (need <= {XBAR_DISTANCE_THRESHOLD})"),
                )
            }
        }
    };

    Ok(LfpReport {
        side: spec.side,
        prior_total_mass: total,
        prior_mass_at_boundary_sigma: boundary_mass,
        prior_mode_xi: spec.xi_grid[mode],
        nearest_xi1: nearest,
        xbar_density_distance,
        truncation_edge_mass,
        xi_marginal_distance,
        equal_variances,
        lower_value: report.lower_value,
        gap: report.gap,
        check_passed,
        note,
    })
}
