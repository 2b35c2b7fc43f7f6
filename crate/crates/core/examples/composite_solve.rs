//! Composite null against composite alternative, read from a problem file.
//!
//! cargo run --example composite_solve -- crates/core/data/composite.json

use npdual::cli::read_input;
use npdual::npsolver::solve_maxmin;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/composite.json").into());
    let input = read_input(path.as_ref()).unwrap_or_else(|e| panic!("{e}"));
    let problem = input.problem().expect("valid problem");
    let r = solve_maxmin(&problem).expect("solvable");

    println!("atoms {:?}", problem.reference().atoms());
    println!("test  {:?}", r.primal.test.values().iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());
    println!("sizes  {:?}", r.primal.sizes);
    println!("powers {:?}", r.primal.powers);
    println!("least favorable alternative weights {:?}", r.dual.alt_weights);
    println!("least favorable prior {:?}", r.dual.prior.weights());
    println!(
        "lower {:.12}  middle {:.12}  dual {:.12}  gap {:.1e}",
        r.lower_value, r.middle_value, r.dual_value, r.gap
    );
}
