//! Sample mean of normals; null variances at or above sigma0^2, alternative
//! variance below it. The least favorable prior sits on sigma0^2 at xi1.

use npdual::families::{gaussian_xbar_problem, lfp_report, GaussianXbarSpec};
use npdual::npsolver::solve_maxmin;

fn main() -> npdual::Result<()> {
    let spec = GaussianXbarSpec::case1();
    let problem = gaussian_xbar_problem(&spec, 0.1)?;
    let r = solve_maxmin(&problem)?;
    let lfp = lfp_report(&problem, &spec, &r)?;
    println!("value {:.10}, gap {:.1e}", r.lower_value, r.gap);
    println!("prior mass on sigma^2 = {}: {:.6}", spec.sigma0_sq, lfp.prior_mass_at_boundary_sigma);
    println!("prior mode xi = {} (nearest grid point to xi1: {})", lfp.prior_mode_xi, lfp.nearest_xi1);
    for ((xi, s2), w) in spec.null_members().iter().zip(r.dual.prior.weights()) {
        if *w > 1e-9 {
            println!("  xi {xi:>5.2} sigma^2 {s2}: {w:.6}");
        }
    }
    println!("{}", lfp.note);
    Ok(())
}
