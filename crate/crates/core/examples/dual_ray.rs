//! The dual objective along the ray through the least favorable prior is
//! convex and bottoms out at the solver's multiplier.

use npdual::model::TestingProblem;
use npdual::npsolver::{scan_dual_ray, solve_maxmin};

fn main() -> npdual::Result<()> {
    let problem = TestingProblem::from_arrays(
        vec![0.2; 5],
        vec![vec![1.8, 1.2, 1.0, 0.6, 0.4], vec![1.4, 1.4, 1.0, 0.8, 0.4]],
        vec![vec![0.2, 0.6, 1.0, 1.4, 1.8]],
        0.05,
    )?;
    let r = solve_maxmin(&problem)?;
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
    let scan = scan_dual_ray(&problem, &r.dual.alt_weights, r.dual.prior.weights(), &grid)?;
    for (s, v) in scan.scales.iter().zip(&scan.values) {
        println!("{s:>4.1}  {v:.8}  {}", "*".repeat((v * 40.0) as usize));
    }
    println!("convex {}, minimum {:.10} at scale {}", scan.convex, scan.min_value, scan.argmin_scale);
    println!("max-min value {:.10}", r.lower_value);
    Ok(())
}
