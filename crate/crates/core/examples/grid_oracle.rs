//! Exhaustive search over a grid of tests approaches the LP value from below.

use npdual::model::TestingProblem;
use npdual::npsolver::solve_maxmin;
use npdual::oracle::grid_bruteforce;

fn main() -> npdual::Result<()> {
    let problem = TestingProblem::from_arrays(
        vec![0.3, 0.3, 0.4],
        vec![vec![1.5, 1.0, 0.625], vec![1.0, 1.5, 0.625]],
        vec![vec![0.5, 0.5, 1.75], vec![1.0, 0.0, 1.75]],
        0.1,
    )?;
    let v = solve_maxmin(&problem)?.lower_value;
    println!("LP value {v:.10}");
    for steps in [3, 6, 12, 24, 48] {
        let g = grid_bruteforce(&problem, steps)?;
        println!("steps {steps:>2}: {:.10} (short by {:.2e}) at {:?}", g.value, v - g.value, g.test.values());
    }
    Ok(())
}
