//! The LP solver on its own: bounds, mixed row senses, multipliers and
//! residuals.

use npdual::simplex::{solve_lp, LinearProgram, Objective, RowSense};

fn main() -> npdual::Result<()> {
    // maximize 3x + 2y + z  s.t.  x + y + z <= 4,  x - y >= -1,  x <= 2,  y, z in [0, 3]
    let mut lp = LinearProgram::new(Objective::Maximize, vec![3.0, 2.0, 1.0]);
    lp.set_bounds(0, 0.0, 2.0);
    lp.set_bounds(1, 0.0, 3.0);
    lp.set_bounds(2, 0.0, 3.0);
    lp.add_row(vec![1.0, 1.0, 1.0], RowSense::Le, 4.0);
    lp.add_row(vec![1.0, -1.0, 0.0], RowSense::Ge, -1.0);
    let sol = solve_lp(&lp)?;
    println!("status {:?} after {} pivots", sol.status, sol.iterations);
    println!("x = {:?}, objective {}", sol.primal, sol.objective);
    println!("row multipliers {:?}", sol.duals);
    println!("reduced costs {:?}", sol.reduced_costs);
    println!("residuals {:?}", sol.residuals);
    Ok(())
}
