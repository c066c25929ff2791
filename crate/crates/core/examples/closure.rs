//! Naming morphisms and the internal composition map of `[S,T]`.
//!
//! ```bash
//! cargo run --release --example closure
//! ```

use std::sync::Arc;

use sheafctx::hom::{composition, hom_scenario, identity_name, name, unname, DEFAULT_HOM_BUDGET};
use sheafctx::procedure::enumerate_all_procedures;
use sheafctx::scenario::Scenario;

fn main() -> sheafctx::Result<()> {
    let d2 = Arc::new(Scenario::dice(2)?);
    let s_s = hom_scenario(&d2, &d2, DEFAULT_HOM_BUDGET)?;

    // name/unname is a bijection between S → T and 0 → [S,T].
    let all = enumerate_all_procedures(&d2, &d2, DEFAULT_HOM_BUDGET)?;
    let round_trips = all
        .iter()
        .filter(|f| name(f, &s_s).and_then(|p| unname(&p, &s_s)).as_ref() == Ok(*f))
        .count();
    println!("name/unname round trips: {round_trips}/{}", all.len());

    // L ∘ j_S = j_[S,S].
    let outer = hom_scenario(s_s.base(), s_s.base(), DEFAULT_HOM_BUDGET)?;
    println!("[[S,S],[S,S]] has {} outcomes per measurement", outer.outcomes(0).len());
    let l = composition(&s_s, &s_s, &s_s, &outer)?;
    let lhs = identity_name(&s_s)?.then(&l)?.canonicalize();
    let rhs = identity_name(&outer)?.canonicalize();
    println!("L ∘ j = j: {}", lhs == rhs);
    Ok(())
}
