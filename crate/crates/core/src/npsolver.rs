//! Max-min testing problem as a linear program, together with its dual.
//!
//! The primal LP over `(phi, t)` is
//!
//! ```text
//! maximize t
//!   t - E^R[phi Z_Qj] <= 0      for every alternative generator j
//!   E^R[phi Z_Pi]     <= alpha_i for every null member i
//!   phi(w)            <= 1      for every atom w,   phi >= 0, t free
//! ```
//!
//! Its multipliers give the least favorable alternative mixture `q`, the
//! least favorable prior `lambda` and the positive part of
//! `Z_Q(q) - sum_i lambda_i Z_Pi` on each atom.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    evaluate_power, evaluate_size, mixture_density, Prior, RandomizedTest, TestingProblem,
};
use crate::simplex::{solve_lp, LinearProgram, LpStatus, Objective, RowSense};

pub const MIXTURE_WEIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimalSolution {
    pub test: RandomizedTest,
    /// Smallest power of `test` over the alternative generators.
    pub value: f64,
    pub sizes: Vec<f64>,
    pub powers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualSolution {
    /// Convex weights over the alternative generators.
    pub alt_weights: Vec<f64>,
    pub prior: Prior,
    /// Multipliers of the constraints `phi <= 1`.
    pub upper_multipliers: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub primal: PrimalSolution,
    pub dual: DualSolution,
    /// `max_phi min_Q E^Q[phi]`.
    pub lower_value: f64,
    /// `min_Q max_phi E^Q[phi]`, evaluated at the minimizer of the dual LP.
    pub middle_value: f64,
    /// Dual objective at the reported `(q, lambda)`.
    pub dual_value: f64,
    pub gap: f64,
    /// Optimal value of the explicitly solved dual LP.
    pub dual_lp_value: f64,
    pub iterations: usize,
}

fn require_optimal(status: LpStatus, what: &str) -> Result<()> {
    match status {
        LpStatus::Optimal => Ok(()),
        s => Err(Error::Internal(format!("{what} LP reported {s:?}"))),
    }
}

pub fn check_alt_weights(problem: &TestingProblem, q: &[f64]) -> Result<()> {
    if q.len() != problem.alt().len() {
        return Err(Error::DimensionMismatch {
            field: "alt_weights".into(),
            expected: problem.alt().len(),
            found: q.len(),
        });
    }
    let sum: f64 = q.iter().sum();
    if q.iter().any(|w| !w.is_finite() || *w < -MIXTURE_WEIGHT_TOL)
        || (sum - 1.0).abs() > MIXTURE_WEIGHT_TOL
    {
        return Err(Error::InvalidMixtureWeights {
            field: "alt_weights".into(),
            sum,
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

/// `E^R[(Z_Q - sum_i lambda_i Z_Pi)^+] + sum_i alpha_i lambda_i`.
pub fn dual_objective(problem: &TestingProblem, alt_weights: &[f64], prior: &Prior) -> Result<f64> {
    check_alt_weights(problem, alt_weights)?;
    check_prior(problem, prior)?;
    let zq = problem.alt().combine(alt_weights)?;
    let mix = mixture_density(problem.null(), prior)?;
    let excess: Vec<f64> = zq
        .iter()
        .zip(&mix.values)
        .map(|(q, m)| (q - m).max(0.0))
        .collect();
    let penalty: f64 = problem
        .levels()
        .iter()
        .zip(prior.weights())
        .map(|(a, l)| a * l)
        .sum();
    Ok(problem.reference().expect(&excess) + penalty)
}

/// Best size-feasible test against the single alternative `sum_j q_j Q_j`.
pub fn best_response(problem: &TestingProblem, alt_weights: &[f64]) -> Result<(f64, RandomizedTest)> {
    check_alt_weights(problem, alt_weights)?;
    let n = problem.atom_count();
    let zq = problem.alt().combine(alt_weights)?;
    let r = problem.reference().weights();
    // in psi = R phi the coefficients are plain density values
    let mut lp = LinearProgram::new(Objective::Maximize, zq.clone());
    for (j, &rj) in r.iter().enumerate().take(n) {
        lp.set_bounds(j, 0.0, rj);
    }
    for (z, &a) in problem.null().members().iter().zip(problem.levels()) {
        lp.add_row(z.values().to_vec(), RowSense::Le, a);
    }
    let sol = solve_lp(&lp)?;
    require_optimal(sol.status, "best-response")?;
    let phi = RandomizedTest::clamped(sol.primal.iter().zip(r).map(|(p, w)| p / w).collect());
    let value = problem.reference().expect_product(phi.values(), &zq);
    Ok((value, phi))
}

/// Solves the dual LP `min sum alpha_i lambda_i + sum mu_w` directly and
/// returns its value and alternative weights.
fn solve_dual_lp(problem: &TestingProblem) -> Result<(f64, Vec<f64>, usize)> {
    // With M(w) = max_j Z_Qj(w) and the last weight eliminated through
    // sum q = 1, substitute nu = M - s, 0 <= s <= M. Every row then reads
    //   sum_{j<k} q_j (Z_Qj - Z_Qk) - sum_i lambda_i Z_Pi + s <= M - Z_Qk
    // with a nonnegative right side, so the origin is a feasible start.
    let n = problem.atom_count();
    let alts = problem.alt().members();
    let k = alts.len();
    let m = problem.null().len();
    let r = problem.reference().weights();
    let top: Vec<f64> = (0..n)
        .map(|w| alts.iter().map(|z| z.values()[w]).fold(0.0, f64::max))
        .collect();
    let last = alts[k - 1].values();
    let vars = (k - 1) + m + n;
    let mut cost = vec![0.0; k - 1];
    cost.extend_from_slice(problem.levels());
    cost.extend(r.iter().map(|w| -w));
    let mut lp = LinearProgram::new(Objective::Minimize, cost);
    for w in 0..n {
        lp.set_bounds(k - 1 + m + w, 0.0, top[w]);
        let mut row = vec![0.0; vars];
        for j in 0..k - 1 {
            row[j] = alts[j].values()[w] - last[w];
        }
        for (i, z) in problem.null().members().iter().enumerate() {
            row[k - 1 + i] = -z.values()[w];
        }
        row[k - 1 + m + w] = 1.0;
        lp.add_row(row, RowSense::Le, top[w] - last[w]);
    }
    if k > 1 {
        let mut row = vec![0.0; vars];
        row[..k - 1].iter_mut().for_each(|v| *v = 1.0);
        lp.add_row(row, RowSense::Le, 1.0);
    }
    let sol = solve_lp(&lp)?;
    require_optimal(sol.status, "dual")?;
    let mut q: Vec<f64> = sol.primal[..k - 1].iter().map(|v| v.max(0.0)).collect();
    q.push((1.0 - q.iter().sum::<f64>()).max(0.0));
    let s: f64 = q.iter().sum();
    q.iter_mut().for_each(|v| *v /= s);
    let offset: f64 = r.iter().zip(&top).map(|(w, t)| w * t).sum();
    Ok((sol.objective + offset, q, sol.iterations))
}

pub fn solve_maxmin(problem: &TestingProblem) -> Result<SolveReport> {
    let n = problem.atom_count();
    let k = problem.alt().len();
    let m = problem.null().len();

    let r = problem.reference().weights();

    // variables psi_w = R(w) phi_w keep every coefficient a density value
    let mut objective = vec![0.0; n];
    objective.push(1.0);
    let mut lp = LinearProgram::new(Objective::Maximize, objective);
    lp.set_bounds(n, f64::NEG_INFINITY, f64::INFINITY);
    for z in problem.alt().members() {
        let mut row: Vec<f64> = z.values().iter().map(|v| -v).collect();
        row.push(1.0);
        lp.add_row(row, RowSense::Le, 0.0);
    }
    for (z, &a) in problem.null().members().iter().zip(problem.levels()) {
        let mut row = z.values().to_vec();
        row.push(0.0);
        lp.add_row(row, RowSense::Le, a);
    }
    for (w, &rw) in r.iter().enumerate() {
        lp.set_bounds(w, 0.0, rw);
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(Error::Internal(
                "primal LP infeasible although phi = 0 is feasible".into(),
            ))
        }
        LpStatus::Unbounded => return Err(Error::Internal("primal LP unbounded".into())),
    }

    let test = RandomizedTest::clamped(sol.primal[..n].iter().zip(r).map(|(p, w)| p / w).collect());
    let sizes = evaluate_size(problem, &test)?.per_member;
    let power = evaluate_power(problem, &test)?;

    let mut alt_weights: Vec<f64> = sol.duals[..k].iter().map(|y| y.max(0.0)).collect();
    let total: f64 = alt_weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Internal("alternative multipliers vanish".into()));
    }
    alt_weights.iter_mut().for_each(|v| *v /= total);
    let prior = Prior::new(sol.duals[k..k + m].iter().map(|y| y.max(0.0)).collect())?;
    // multipliers of phi <= 1 are the reduced costs of psi scaled back
    let upper_multipliers: Vec<f64> = sol.reduced_costs[..n]
        .iter()
        .zip(r)
        .map(|(y, w)| (y * w).max(0.0))
        .collect();

    let dual_value = dual_objective(problem, &alt_weights, &prior)?;
    let (dual_lp_value, q_bar, dual_iters) = solve_dual_lp(problem)?;
    let (middle_value, _) = best_response(problem, &q_bar)?;
    let lower_value = power.power;

    log::debug!(
        "solved: lower {lower_value:.12} middle {middle_value:.12} dual {dual_value:.12} ({} + {dual_iters} pivots)",
        sol.iterations
    );

    Ok(SolveReport {
        primal: PrimalSolution {
            test,
            value: lower_value,
            sizes,
            powers: power.per_member,
        },
        dual: DualSolution {
            alt_weights,
            prior,
            upper_multipliers,
            value: dual_value,
        },
        lower_value,
        middle_value,
        dual_value,
        gap: dual_value - lower_value,
        dual_lp_value,
        iterations: sol.iterations + dual_iters,
    })
}

/// Dual objective sampled along `scale * direction` for `scale` in a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualRayScan {
    pub scales: Vec<f64>,
    pub values: Vec<f64>,
    /// Slopes between consecutive samples never decrease by more than 1e-9.
    pub convex: bool,
    pub argmin_scale: f64,
    pub min_value: f64,
}

pub fn scan_dual_ray(
    problem: &TestingProblem,
    alt_weights: &[f64],
    direction: &[f64],
    grid: &[f64],
) -> Result<DualRayScan> {
    let dir = Prior::new(direction.to_vec())?;
    check_prior(problem, &dir)?;
    if let Some(index) = grid.iter().position(|s| !s.is_finite() || *s < 0.0) {
        return Err(Error::NonFinite {
            field: "grid".into(),
            index,
        });
    }
    let mut scales = grid.to_vec();
    scales.sort_by(|a, b| a.partial_cmp(b).unwrap());
    scales.dedup();
    let values = scales
        .iter()
        .map(|&s| {
            let prior = Prior::new(dir.weights().iter().map(|w| w * s).collect())?;
            dual_objective(problem, alt_weights, &prior)
        })
        .collect::<Result<Vec<f64>>>()?;
    let slopes: Vec<f64> = (1..scales.len())
        .map(|i| (values[i] - values[i - 1]) / (scales[i] - scales[i - 1]))
        .collect();
    let convex = slopes.windows(2).all(|w| w[1] - w[0] >= -1e-9);
    let (imin, &min_value) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap_or((0, &f64::NAN));
    Ok(DualRayScan {
        argmin_scale: scales.get(imin).copied().unwrap_or(f64::NAN),
        scales,
        values,
        convex,
        min_value,
    })
}
