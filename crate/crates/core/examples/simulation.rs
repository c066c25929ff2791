//! The PR box is simulated by the triangle model, but not the other way round.
//!
//! ```bash
//! cargo run --release --example simulation
//! ```

use sheafctx::catalog;
use sheafctx::hom::{find_simulation, DEFAULT_HOM_BUDGET};
use sheafctx::procedure::{is_simulation, ProbabilisticProcedure, SimulationMode};

fn main() -> sheafctx::Result<()> {
    let triangle = catalog::triangle_model();
    let pr = catalog::pr_model();
    let f = ProbabilisticProcedure::deterministic(catalog::triangle_to_square());

    let pushed = f.pushforward(&triangle)?;
    println!("f_*(triangle) == PR: {}", pushed == pr);
    for mode in [
        SimulationMode::Probabilistic,
        SimulationMode::Possibilistic,
        SimulationMode::Weak,
    ] {
        println!("{mode:?} simulation: {}", is_simulation(&f, &triangle, &pr, mode)?);
    }

    // Exhaustive search over every canonical procedure □ → △.
    match find_simulation(&pr, &triangle, DEFAULT_HOM_BUDGET)? {
        Some(g) => println!("unexpected simulation with {} components", g.components().len()),
        None => println!("no procedure maps PR to the triangle model"),
    }
    match find_simulation(&triangle, &pr, DEFAULT_HOM_BUDGET)? {
        Some(g) => println!(
            "search recovers a triangle → PR simulation with {} component(s)",
            g.components().len()
        ),
        None => println!("no triangle → PR simulation found"),
    }
    Ok(())
}
