//! Deciding whether a table of models is induced by a classical procedure.
//!
//! ```bash
//! cargo run --release --example realizability
//! ```

use std::sync::Arc;

use sheafctx::catalog;
use sheafctx::hom::{contextual_via_realizability, realizable, Realizability, RealizabilityQuery, DEFAULT_HOM_BUDGET};
use sheafctx::model::EmpiricalModel;
use sheafctx::rational::ratio;
use sheafctx::scenario::Scenario;

fn report(name: &str, q: &RealizabilityQuery) -> sheafctx::Result<()> {
    match realizable(q, DEFAULT_HOM_BUDGET)? {
        Realizability::Realizable(f) => {
            println!("{name}: realizable by a mixture of {} procedures", f.components().len())
        }
        Realizability::NotRealizable => println!("{name}: not realizable"),
    }
    Ok(())
}

fn main() -> sheafctx::Result<()> {
    let zero = Arc::new(Scenario::zero());
    let pr = catalog::pr_model();
    report(
        "constant PR from the empty scenario",
        &RealizabilityQuery::constant(zero.clone(), &pr, DEFAULT_HOM_BUDGET)?,
    )?;

    // A non-contextual model: half PR box, half uniform noise.
    let sq = pr.scenario().clone();
    let space = sq.events(&sq.all_measurements());
    let mut noise = Vec::new();
    for v in space.iter() {
        noise.push(EmpiricalModel::deterministic(sq.clone(), &space.assignment(v))?);
    }
    let noise: Vec<_> = noise.iter().map(|d| (ratio(1, noise.len() as i64), d)).collect();
    let uniform = EmpiricalModel::convex_combine(&noise)?;
    let mixed = EmpiricalModel::convex_combine(&[(ratio(1, 2), &pr), (ratio(1, 2), &uniform)])?;
    report(
        "constant ½PR + ½uniform",
        &RealizabilityQuery::constant(zero, &mixed, DEFAULT_HOM_BUDGET)?,
    )?;
    println!(
        "contextual via realizability: PR {}, mixture {}",
        contextual_via_realizability(&pr, DEFAULT_HOM_BUDGET)?,
        contextual_via_realizability(&mixed, DEFAULT_HOM_BUDGET)?
    );
    Ok(())
}
