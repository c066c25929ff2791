//! Kochen–Specker predicates: the odd cycle admits no consistent colouring.
//!
//! ```bash
//! cargo run --example kochen_specker
//! ```

use std::sync::Arc;

use sheafctx::catalog;
use sheafctx::contextuality::{classify_possibilistic, DEFAULT_BUDGET};
use sheafctx::games::{canonical_model_of_predicate, ks_predicate, Satisfiability};

fn main() -> sheafctx::Result<()> {
    let tri = Arc::new(catalog::triangle_01());
    let g = ks_predicate(tri.clone())?;
    match canonical_model_of_predicate(&g, DEFAULT_BUDGET)? {
        Satisfiability::Satisfiable(m) => {
            for (facet, support) in tri.facets().iter().zip(m.supports()) {
                let space = tri.events(facet);
                let shown: Vec<_> = support.iter().map(|&r| tri.render(&space.assignment_at(r))).collect();
                println!("{}: {}", tri.label(facet), shown.join(" "));
            }
            let r = classify_possibilistic(&m, DEFAULT_BUDGET)?;
            println!("strongly contextual: {}", r.strongly_contextual);
        }
        Satisfiability::Unsatisfiable => println!("no model satisfies the KS predicate"),
    }
    Ok(())
}
