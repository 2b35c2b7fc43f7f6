//! Seeded saddle-point check: no sampled level-alpha test beats the solver's
//! test against the least favorable alternative, and no single alternative
//! pushes the solver's test below the max-min value.

use npdual::certify::check_saddle;
use npdual::model::TestingProblem;
use npdual::npsolver::solve_maxmin;

fn main() -> npdual::Result<()> {
    let problem = TestingProblem::from_arrays(
        vec![0.5, 0.5],
        vec![vec![1.0, 1.0]],
        vec![vec![2.0, 0.0], vec![0.0, 2.0]],
        0.25,
    )?;
    let r = solve_maxmin(&problem)?;
    println!("test {:?}, alternative weights {:?}", r.primal.test.values(), r.dual.alt_weights);
    let rep = check_saddle(&problem, &r.primal.test, &r.dual.alt_weights, 1000, Some(42), 1e-8)?;
    println!(
        "sampled gain {:.2e}, exact best-response gain {:.2e}, generator shortfall {:.2e}, passed {}",
        rep.left_violation, rep.left_exact_violation, rep.right_violation, rep.passed
    );
    Ok(())
}
