//! Random instances shared by the integration tests.
#![allow(dead_code)]

use npdual::model::{Alpha, ReferenceMeasure, TestingProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ALPHAS: [f64; 4] = [0.05, 0.1, 0.25, 0.5];

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_atoms: usize,
    pub max_null: usize,
    pub max_alt: usize,
}

impl Shape {
    pub const DEFAULT: Shape = Shape {
        max_atoms: 12,
        max_null: 6,
        max_alt: 6,
    };
    pub const SINGLETON: Shape = Shape {
        max_atoms: 12,
        max_null: 1,
        max_alt: 1,
    };
    pub const TINY: Shape = Shape {
        max_atoms: 3,
        max_null: 6,
        max_alt: 6,
    };
}

/// Probability vector with occasional zeros, never all zero.
fn random_law(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.01..1.0) })
            .collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            return raw.iter().map(|v| v / total).collect();
        }
    }
}

/// Densities of `laws` against `r`; only atoms charged by some law may carry
/// reference weight, so every law is absolutely continuous.
fn densities(r: &[f64], laws: &[Vec<f64>]) -> Vec<Vec<f64>> {
    laws.iter()
        .map(|p| p.iter().zip(r).map(|(p, w)| p / w).collect())
        .collect()
}

pub fn random_problem(rng: &mut ChaCha8Rng, shape: Shape) -> TestingProblem {
    let n = rng.gen_range(1..=shape.max_atoms);
    let k_null = rng.gen_range(1..=shape.max_null);
    let k_alt = rng.gen_range(1..=shape.max_alt);
    let alpha = ALPHAS[rng.gen_range(0..ALPHAS.len())];
    let null: Vec<Vec<f64>> = (0..k_null).map(|_| random_law(rng, n)).collect();
    let alt: Vec<Vec<f64>> = (0..k_alt).map(|_| random_law(rng, n)).collect();
    // reference: a positive blend of all laws plus a little uniform mass
    let k = (k_null + k_alt) as f64;
    let raw: Vec<f64> = (0..n)
        .map(|w| {
            let mix: f64 = null.iter().chain(&alt).map(|p| p[w]).sum::<f64>() / k;
            0.9 * mix + 0.1 / n as f64
        })
        .collect();
    let total: f64 = raw.iter().sum();
    let r: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let reference = ReferenceMeasure::from_unnormalized(
        (1..=n).map(|i| format!("w{i}")).collect(),
        r,
    )
    .unwrap();
    let r = reference.weights().to_vec();
    TestingProblem::from_arrays(r.clone(), densities(&r, &null), densities(&r, &alt), alpha)
        .or_else(|_| {
            // duplicate members are rejected; fall back to the first of each
            TestingProblem::from_arrays(
                r.clone(),
                densities(&r, &null[..1]),
                densities(&r, &alt[..1]),
                alpha,
            )
        })
        .unwrap()
}

pub fn seeded_problem(seed: u64, shape: Shape) -> TestingProblem {
    random_problem(&mut ChaCha8Rng::seed_from_u64(seed), shape)
}

pub fn instances(base_seed: u64, count: usize, shape: Shape) -> Vec<TestingProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    (0..count).map(|_| random_problem(&mut rng, shape)).collect()
}

pub fn alpha_of(p: &TestingProblem) -> f64 {
    match p.alpha() {
        Alpha::Scalar(a) => *a,
        Alpha::PerMember(v) => v[0],
    }
}
