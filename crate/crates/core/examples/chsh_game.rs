//! Values of the CHSH game: classical, on the CHSH model, on the PR box.
//!
//! ```bash
//! cargo run --example chsh_game
//! ```

use sheafctx::catalog;
use sheafctx::contextuality::DEFAULT_BUDGET;
use sheafctx::games::{classical_value, model_value};
use sheafctx::rational;

fn main() -> sheafctx::Result<()> {
    let game = catalog::chsh_game();
    let (value, strategy) = classical_value(&game, DEFAULT_BUDGET)?;
    let square = game.procedure().source();
    println!(
        "classical value  {} (e.g. {})",
        rational::format(&value),
        square.render(&strategy)
    );
    println!(
        "CHSH model       {}",
        rational::format(&model_value(&game, &catalog::chsh_on_square())?)
    );
    println!(
        "PR box           {}",
        rational::format(&model_value(&game, &catalog::pr_model())?)
    );
    Ok(())
}
