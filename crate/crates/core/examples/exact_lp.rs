//! The exact feasibility solver on its own.
//!
//! ```bash
//! cargo run --example exact_lp
//! ```

use sheafctx::exactlp::{solve_feasibility, Feasibility, LinearSystem};
use sheafctx::rational::{self, int, ratio};

fn main() -> sheafctx::Result<()> {
    // x + y + z = 1, x - y = 1/3, x, y, z ≥ 0.
    let mut sys = LinearSystem::new(3);
    sys.add_equality(vec![(0, int(1)), (1, int(1)), (2, int(1))], int(1));
    sys.add_equality(vec![(0, int(1)), (1, int(-1))], ratio(1, 3));
    match solve_feasibility(&sys)? {
        Feasibility::Feasible(p) => {
            let shown: Vec<_> = p.iter().map(rational::format).collect();
            println!("feasible: ({})", shown.join(", "));
        }
        Feasibility::Infeasible => println!("infeasible"),
    }

    // Adding y = 1 makes it infeasible.
    sys.add_equality(vec![(1, int(1))], int(1));
    println!("with y = 1: {:?}", solve_feasibility(&sys)?.point().is_some());
    Ok(())
}
