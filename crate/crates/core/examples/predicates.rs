//! Predicates, their canonical models, and the order between them.
//!
//! ```bash
//! cargo run --example predicates
//! ```

use sheafctx::catalog;
use sheafctx::contextuality::DEFAULT_BUDGET;
use sheafctx::games::{
    canonical_model_of_predicate, predicate_from_model, predicate_leq, satisfies_model, PossibilisticPredicate,
};

fn main() -> sheafctx::Result<()> {
    let g = catalog::chsh_predicate();
    let pr = catalog::pr_model();
    println!("PR satisfies the CHSH predicate: {}", satisfies_model(&pr, &g)?);
    println!(
        "CHSH model satisfies it: {}",
        satisfies_model(&catalog::chsh_on_square(), &g)?
    );

    let canonical = canonical_model_of_predicate(&g, DEFAULT_BUDGET)?;
    let m = canonical.model().expect("the PR support satisfies it");
    println!("canonical model is the PR support: {}", *m == pr.collapse());

    let trivial = PossibilisticPredicate::trivial(g.scenario().clone());
    let from_pr = predicate_from_model(&pr.collapse());
    println!("g ≤ trivial: {}", predicate_leq(&g, &trivial, DEFAULT_BUDGET)?);
    println!("trivial ≤ g: {}", predicate_leq(&trivial, &g, DEFAULT_BUDGET)?);
    println!(
        "g ≡ predicate of PR support: {}",
        predicate_leq(&g, &from_pr, DEFAULT_BUDGET)? && predicate_leq(&from_pr, &g, DEFAULT_BUDGET)?
    );
    Ok(())
}
