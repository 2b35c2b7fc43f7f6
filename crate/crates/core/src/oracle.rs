//! Ground truth independent of the LP: the classical likelihood-ratio test for
//! simple hypotheses and exhaustive search over a grid of tests.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{RandomizedTest, ReferenceMeasure, TestingProblem};

pub const GRID_LIMIT: f64 = 1e7;

/// Most powerful level-`alpha` test of one density against another.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicNpResult {
    /// Smallest `z >= 0` with `P(L > z) <= alpha`.
    pub quantile: f64,
    /// Randomization on `{L = quantile}`.
    pub delta: f64,
    pub test: RandomizedTest,
    pub power: f64,
    pub size: f64,
}

/// Likelihood ratio `Z_Q / Z_P`, `+inf` where only `Z_Q` charges the atom and
/// `0` where neither does.
pub fn likelihood_ratio(zp: &[f64], zq: &[f64]) -> Vec<f64> {
    zp.iter()
        .zip(zq)
        .map(|(&p, &q)| {
            if p > 0.0 {
                q / p
            } else if q > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect()
}

pub fn classic_np(
    reference: &ReferenceMeasure,
    zp: &[f64],
    zq: &[f64],
    alpha: f64,
) -> Result<ClassicNpResult> {
    let n = reference.len();
    for (field, v) in [("null", zp), ("alt", zq)] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                field: field.into(),
                expected: n,
                found: v.len(),
            });
        }
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange {
            field: "alpha".into(),
            value: alpha,
        });
    }
    let r = reference.weights();
    let lr = likelihood_ratio(zp, zq);
    let null_mass_above = |z: f64| -> f64 { (0..n).filter(|&w| lr[w] > z).map(|w| r[w] * zp[w]).sum() };

    let mut levels: Vec<f64> = lr.iter().copied().filter(|l| l.is_finite() && *l > 0.0).collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();
    let quantile = std::iter::once(0.0)
        .chain(levels)
        .find(|&z| null_mass_above(z) <= alpha)
        .unwrap_or(0.0);

    let delta = if quantile > 0.0 {
        let at: f64 = (0..n)
            .filter(|&w| lr[w] == quantile)
            .map(|w| r[w] * zp[w])
            .sum();
        ((alpha - null_mass_above(quantile)) / at).clamp(0.0, 1.0)
    } else {
        // size deficit: no randomization on {L = 0}, it adds no power
        0.0
    };
    let phi: Vec<f64> = lr
        .iter()
        .map(|&l| {
            if l > quantile {
                1.0
            } else if l == quantile && quantile > 0.0 {
                delta
            } else {
                0.0
            }
        })
        .collect();
    let power = reference.expect_product(&phi, zq);
    let size = reference.expect_product(&phi, zp);
    Ok(ClassicNpResult {
        quantile,
        delta,
        test: RandomizedTest::new(phi)?,
        power,
        size,
    })
}

/// [`classic_np`] on a problem whose families are singletons.
pub fn classic_np_for(problem: &TestingProblem) -> Result<ClassicNpResult> {
    if problem.null().len() != 1 || problem.alt().len() != 1 {
        return Err(Error::DimensionMismatch {
            field: "families".into(),
            expected: 1,
            found: problem.null().len().max(problem.alt().len()),
        });
    }
    classic_np(
        problem.reference(),
        problem.null().members()[0].values(),
        problem.alt().members()[0].values(),
        problem.levels()[0],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridResult {
    pub value: f64,
    pub test: RandomizedTest,
    pub steps: usize,
    pub points: u64,
    pub feasible_points: u64,
}

/// Exhaustive maximum of the worst-case power over `{0, 1/steps, ..., 1}^atoms`
/// restricted to size-feasible tests. The first maximizer in odometer order
/// (atom 0 varying fastest) is reported.
pub fn grid_bruteforce(problem: &TestingProblem, steps: usize) -> Result<GridResult> {
    let n = problem.atom_count();
    if steps == 0 {
        return Err(Error::TooLarge {
            points: 0.0,
            limit: GRID_LIMIT,
        });
    }
    let points = ((steps + 1) as f64).powi(n as i32);
    if points > GRID_LIMIT {
        return Err(Error::TooLarge {
            points,
            limit: GRID_LIMIT,
        });
    }
    let r = problem.reference().weights();
    // per-atom contribution of one grid step to each size and power
    let nulls: Vec<Vec<f64>> = problem
        .null()
        .members()
        .iter()
        .map(|z| z.values().iter().zip(r).map(|(v, w)| v * w).collect())
        .collect();
    let alts: Vec<Vec<f64>> = problem
        .alt()
        .members()
        .iter()
        .map(|z| z.values().iter().zip(r).map(|(v, w)| v * w).collect())
        .collect();
    let levels = problem.levels();
    let h = 1.0 / steps as f64;

    let mut idx = vec![0usize; n];
    let mut phi = vec![0.0; n];
    let mut best_value = f64::NEG_INFINITY;
    let mut best = phi.clone();
    let mut feasible_points = 0u64;
    loop {
        let feasible = nulls
            .iter()
            .zip(levels)
            .all(|(c, &a)| c.iter().zip(&phi).map(|(x, f)| x * f).sum::<f64>() <= a + 1e-12);
        if feasible {
            feasible_points += 1;
            let value = alts
                .iter()
                .map(|c| c.iter().zip(&phi).map(|(x, f)| x * f).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            if value > best_value {
                best_value = value;
                best.copy_from_slice(&phi);
            }
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == n {
                return Ok(GridResult {
                    value: best_value,
                    test: RandomizedTest::new(best)?,
                    steps,
                    points: points as u64,
                    feasible_points,
                });
            }
            idx[k] += 1;
            if idx[k] <= steps {
                phi[k] = if idx[k] == steps { 1.0 } else { idx[k] as f64 * h };
                break;
            }
            idx[k] = 0;
            phi[k] = 0.0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d1() -> TestingProblem {
        TestingProblem::from_arrays(
            vec![1.0 / 3.0; 3],
            vec![vec![1.5, 0.9, 0.6]],
            vec![vec![0.6, 0.9, 1.5]],
            0.3,
        )
        .unwrap()
    }

    #[test]
    fn three_atom_instance() {
        let res = classic_np_for(&d1()).unwrap();
        assert_eq!(res.quantile, 1.0);
        assert!((res.delta - 1.0 / 3.0).abs() < 1e-15);
        assert!((res.power - 0.6).abs() < 1e-15);
        assert!((res.size - 0.3).abs() < 1e-15);
        let phi = res.test.values();
        assert_eq!(phi[0], 0.0);
        assert_eq!(phi[2], 1.0);
    }

    #[test]
    fn identical_densities_randomize_everywhere() {
        let r = ReferenceMeasure::uniform(2);
        let res = classic_np(&r, &[1.2, 0.8], &[1.2, 0.8], 0.2).unwrap();
        assert_eq!(res.quantile, 1.0);
        assert!((res.delta - 0.2).abs() < 1e-15);
        assert!((res.power - 0.2).abs() < 1e-15);
    }

    #[test]
    fn disjoint_supports_leave_size_slack() {
        let r = ReferenceMeasure::uniform(2);
        let res = classic_np(&r, &[2.0, 0.0], &[0.0, 2.0], 0.1).unwrap();
        assert_eq!(res.quantile, 0.0);
        assert_eq!(res.test.values(), &[0.0, 1.0]);
        assert_eq!(res.size, 0.0);
        assert_eq!(res.power, 1.0);
    }

    #[test]
    fn atoms_charged_by_neither_hypothesis_get_zero() {
        let r = ReferenceMeasure::uniform(3);
        let res = classic_np(&r, &[1.5, 0.0, 1.5], &[3.0, 0.0, 0.0], 0.5).unwrap();
        assert_eq!(res.test.values()[1], 0.0);
        assert!((res.power - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_examples() {
        let t1 = TestingProblem::from_arrays(vec![1.0], vec![vec![1.0]], vec![vec![1.0]], 0.3).unwrap();
        let g = grid_bruteforce(&t1, 10).unwrap();
        assert!((g.value - 0.3).abs() < 1e-12);
        assert!((g.test.values()[0] - 0.3).abs() < 1e-12);

        let g = grid_bruteforce(&d1(), 30).unwrap();
        assert!((g.value - 0.6).abs() < 1e-12, "{}", g.value);

        let sym = TestingProblem::from_arrays(
            vec![0.5, 0.5],
            vec![vec![1.0, 1.0]],
            vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            0.25,
        )
        .unwrap();
        let g = grid_bruteforce(&sym, 4).unwrap();
        assert_eq!(g.value, 0.25);
        assert_eq!(g.test.values(), &[0.25, 0.25]);
    }

    #[test]
    fn grid_guard() {
        let p = TestingProblem::from_arrays(
            vec![0.125; 8],
            vec![vec![1.0; 8]],
            vec![vec![2.0, 0.0, 2.0, 0.0, 2.0, 0.0, 2.0, 0.0]],
            0.1,
        )
        .unwrap();
        assert!(matches!(grid_bruteforce(&p, 10), Err(Error::TooLarge { .. })));
    }
}
