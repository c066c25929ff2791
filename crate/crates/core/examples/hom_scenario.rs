//! The hom-scenario `[S,T]`: procedures as global assignments.
//!
//! ```bash
//! cargo run --example hom_scenario
//! ```

use std::sync::Arc;

use sheafctx::catalog;
use sheafctx::hom::{hom_scenario, outcome_label, DEFAULT_HOM_BUDGET};
use sheafctx::procedure::enumerate_all_procedures;
use sheafctx::scenario::Scenario;

fn main() -> sheafctx::Result<()> {
    let d2 = Arc::new(Scenario::dice(2)?);
    let h = hom_scenario(&d2, &d2, DEFAULT_HOM_BUDGET)?;
    println!("[dice(2), dice(2)] has outcomes:");
    for o in h.outcomes(0) {
        println!("  {}", outcome_label(&d2, &d2, 0, o));
    }

    let tri = Arc::new(catalog::triangle());
    let h = hom_scenario(&tri, &d2, DEFAULT_HOM_BUDGET)?;
    let procedures = enumerate_all_procedures(&tri, &d2, DEFAULT_HOM_BUDGET)?;
    let base = h.base();
    let space = base.events(&base.all_measurements());
    let accepted = space
        .iter()
        .filter(|v| h.accepts_global(&space.assignment(v.clone())))
        .count();
    println!(
        "[triangle, dice(2)]: {} outcomes, {} procedures, {} accepted global assignments",
        h.outcomes(0).len(),
        procedures.len(),
        accepted
    );
    for f in procedures.iter().take(3) {
        let s = h.procedure_to_assignment(f)?;
        assert_eq!(&h.assignment_to_procedure(&s)?, f);
        println!("  {}", base.render(&s));
    }
    Ok(())
}
