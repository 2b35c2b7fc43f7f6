//! Optimality certificates for a solved problem, and what happens when the
//! test is perturbed.

use npdual::certify::{check_slackness, check_weak_duality, ck_certificate, decompose_structure, DEFAULT_TOL};
use npdual::model::{RandomizedTest, TestingProblem};
use npdual::npsolver::solve_maxmin;

fn main() -> npdual::Result<()> {
    let problem = TestingProblem::from_arrays(
        vec![0.25; 4],
        vec![vec![1.6, 1.2, 0.8, 0.4], vec![1.0, 1.4, 1.0, 0.6]],
        vec![vec![0.4, 0.6, 1.2, 1.8], vec![0.2, 1.0, 1.0, 1.8]],
        0.1,
    )?;
    let r = solve_maxmin(&problem)?;
    let (phi, q, prior) = (&r.primal.test, &r.dual.alt_weights, &r.dual.prior);

    let wd = check_weak_duality(&problem, phi, q, prior)?;
    println!(
        "margin {:.2e} = unrejected excess {:.2e} + rejected deficit {:.2e} + level slack {:.2e}",
        wd.margin, wd.unrejected_excess, wd.rejected_deficit, wd.level_slack
    );
    let s = check_slackness(&problem, phi, q, prior, DEFAULT_TOL)?;
    println!("slackness certified: {}", s.certified);

    let d = decompose_structure(&problem, phi, q, prior, DEFAULT_TOL)?;
    println!("reject on {:?}, accept on {:?}, randomize on {:?} with {:?}", d.upper, d.lower, d.boundary, d.delta);

    let ck = ck_certificate(&problem, phi, q, prior, DEFAULT_TOL)?;
    println!("z_hat {:.6}, identity residual {:.1e}", ck.z_hat, ck.identity_residual);

    if let Some(&w) = d.lower.first() {
        let mut bumped = phi.values().to_vec();
        bumped[w] += 0.05;
        let s = check_slackness(&problem, &RandomizedTest::new(bumped)?, q, prior, DEFAULT_TOL)?;
        println!("after raising phi on atom {w}: certified {}, lower violation {:.3}", s.certified, s.lower_violation);
    }
    Ok(())
}
