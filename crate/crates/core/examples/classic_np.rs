//! Simple null against simple alternative: the likelihood-ratio test and the
//! LP solver agree.

use npdual::model::TestingProblem;
use npdual::npsolver::solve_maxmin;
use npdual::oracle::classic_np_for;

fn main() -> npdual::Result<()> {
    let problem = TestingProblem::from_arrays(
        vec![1.0 / 3.0; 3],
        vec![vec![1.5, 0.9, 0.6]],
        vec![vec![0.6, 0.9, 1.5]],
        0.3,
    )?;
    let np = classic_np_for(&problem)?;
    println!("threshold z = {}, randomization delta = {:.6}", np.quantile, np.delta);
    println!("test {:?}", np.test.values());
    println!("size {:.6}, power {:.6}", np.size, np.power);

    let lp = solve_maxmin(&problem)?;
    println!("LP value {:.12} (difference {:.1e})", lp.lower_value, (lp.lower_value - np.power).abs());
    println!("LP multiplier on the null: {:.6}", lp.dual.prior.total_mass());
    Ok(())
}
