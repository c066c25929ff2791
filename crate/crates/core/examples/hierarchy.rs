//! Classify the standard models in the contextuality hierarchy.
//!
//! ```bash
//! cargo run --example hierarchy
//! ```

use sheafctx::catalog;
use sheafctx::contextuality::{classify, Witness, DEFAULT_BUDGET};
use sheafctx::rational;

fn main() -> sheafctx::Result<()> {
    let models = [
        ("CHSH", catalog::chsh_model()),
        ("PR box", catalog::pr_model()),
        ("triangle", catalog::triangle_model()),
        ("all-correlated", catalog::chsh_model_all_correlated()),
    ];
    for (name, e) in &models {
        let r = classify(e, DEFAULT_BUDGET)?;
        println!(
            "{name:>15}: probabilistic={} logical={} strong={}",
            r.probabilistically_contextual, r.logically_contextual, r.strongly_contextual
        );
        match &r.witness {
            Some(Witness::GlobalDistribution(d)) => {
                for (s, p) in d {
                    println!("{:>17}{} with p = {}", "", e.scenario().render(s), rational::format(p));
                }
            }
            Some(Witness::NonExtendable { assignment, .. }) => {
                println!(
                    "{:>17}{} extends to no global assignment",
                    "",
                    e.scenario().render(assignment)
                );
            }
            None => {}
        }
    }
    Ok(())
}
