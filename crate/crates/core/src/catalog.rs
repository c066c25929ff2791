//! Standard scenarios, models, procedures and games used throughout the
//! documentation, the examples and the test suites.

use std::sync::Arc;

use crate::games::{Experiment, GamePart, LabelledComponent, PossibilisticPredicate};
use crate::model::EmpiricalModel;
use crate::procedure::DeterministicProcedure;
use crate::rational::{ratio, zero, Rational};
use crate::scenario::Scenario;

fn binary(ids: &[&str], outcomes: [&str; 2], facets: &[[&str; 2]]) -> Scenario {
    Scenario::new(
        ids.iter().map(|id| {
            (
                id.to_string(),
                outcomes.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            )
        }),
        facets
            .iter()
            .map(|f| f.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
    )
    .expect("catalog scenario")
}

/// Three yes/no queries, any two of which can be asked together.
pub fn triangle() -> Scenario {
    binary(
        &["pint", "wine", "grub"],
        ["yes", "no"],
        &[["pint", "wine"], ["wine", "grub"], ["pint", "grub"]],
    )
}

/// The triangle with outcomes relabelled `yes ↦ 0`, `no ↦ 1`.
pub fn triangle_01() -> Scenario {
    binary(
        &["pint", "wine", "grub"],
        ["0", "1"],
        &[["pint", "wine"], ["wine", "grub"], ["pint", "grub"]],
    )
}

/// Four parties on a 4-cycle choosing `grain` or `grape` (the CHSH
/// scenario under other labels).
pub fn square() -> Scenario {
    binary(
        &["SammyA", "GeorgieB", "JohnnyB", "EvilG"],
        ["grain", "grape"],
        &[
            ["SammyA", "GeorgieB"],
            ["GeorgieB", "JohnnyB"],
            ["JohnnyB", "EvilG"],
            ["SammyA", "EvilG"],
        ],
    )
}

/// Bipartite two-setting two-outcome Bell scenario.
pub fn bell_scenario() -> Scenario {
    binary(
        &["X_A", "Y_A", "X_B", "Y_B"],
        ["0", "1"],
        &[["X_A", "X_B"], ["X_A", "Y_B"], ["Y_A", "X_B"], ["Y_A", "Y_B"]],
    )
}

fn h() -> Rational {
    ratio(1, 2)
}

fn anti() -> Vec<Rational> {
    vec![zero(), h(), h(), zero()]
}

fn corr() -> Vec<Rational> {
    vec![h(), zero(), zero(), h()]
}

/// Strongly contextual model on the triangle: pint/wine anti-correlated,
/// the other two edges correlated.
pub fn triangle_model() -> EmpiricalModel {
    EmpiricalModel::from_table(
        Arc::new(triangle()),
        &[
            (vec!["pint", "wine"], anti()),
            (vec!["wine", "grub"], corr()),
            (vec!["pint", "grub"], corr()),
        ],
    )
    .expect("triangle model")
}

/// The PR box on the square: SammyA/EvilG anti-correlated, all other
/// edges correlated.
pub fn pr_model() -> EmpiricalModel {
    EmpiricalModel::from_table(
        Arc::new(square()),
        &[
            (vec!["SammyA", "EvilG"], anti()),
            (vec!["SammyA", "GeorgieB"], corr()),
            (vec!["JohnnyB", "EvilG"], corr()),
            (vec!["JohnnyB", "GeorgieB"], corr()),
        ],
    )
    .expect("PR model")
}

fn eighths(a: i64, b: i64, c: i64, d: i64) -> Vec<Rational> {
    vec![ratio(a, 8), ratio(b, 8), ratio(c, 8), ratio(d, 8)]
}

/// The CHSH model: perfectly correlated on `X_A X_B`, correlated with
/// probability 3/4 on `X_A Y_B` and `Y_A X_B`, anti-correlated with
/// probability 3/4 on `Y_A Y_B`.
pub fn chsh_model() -> EmpiricalModel {
    EmpiricalModel::from_table(
        Arc::new(bell_scenario()),
        &[
            (vec!["X_A", "X_B"], corr()),
            (vec!["X_A", "Y_B"], eighths(3, 1, 1, 3)),
            (vec!["Y_A", "X_B"], eighths(3, 1, 1, 3)),
            (vec!["Y_A", "Y_B"], eighths(1, 3, 3, 1)),
        ],
    )
    .expect("CHSH model")
}

/// The CHSH table with the `Y_A Y_B` row also correlated. It is
/// no-signalling but admits a global distribution, so it is
/// non-contextual; kept as a regression fixture.
pub fn chsh_model_all_correlated() -> EmpiricalModel {
    EmpiricalModel::from_table(
        Arc::new(bell_scenario()),
        &[
            (vec!["X_A", "X_B"], corr()),
            (vec!["X_A", "Y_B"], eighths(3, 1, 1, 3)),
            (vec!["Y_A", "X_B"], eighths(3, 1, 1, 3)),
            (vec!["Y_A", "Y_B"], eighths(3, 1, 1, 3)),
        ],
    )
    .expect("CHSH variant")
}

/// The CHSH model transported onto the square: `Y_A ↦ SammyA`,
/// `X_B ↦ GeorgieB`, `X_A ↦ JohnnyB`, `Y_B ↦ EvilG`, `0 ↦ grain`,
/// `1 ↦ grape`. The anti-correlated `Y_A Y_B` edge lands on SammyA/EvilG.
pub fn chsh_on_square() -> EmpiricalModel {
    EmpiricalModel::from_table(
        Arc::new(square()),
        &[
            (vec!["JohnnyB", "GeorgieB"], corr()),
            (vec!["JohnnyB", "EvilG"], eighths(3, 1, 1, 3)),
            (vec!["SammyA", "GeorgieB"], eighths(3, 1, 1, 3)),
            (vec!["SammyA", "EvilG"], eighths(1, 3, 3, 1)),
        ],
    )
    .expect("CHSH on square")
}

/// Triangle → square: SammyA asks `pint`, EvilG asks `wine`, GeorgieB and
/// JohnnyB both ask `grub`; everyone maps `yes ↦ grain`, `no ↦ grape`.
pub fn triangle_to_square() -> DeterministicProcedure {
    let source = Arc::new(triangle());
    let target = Arc::new(square());
    let query = |x: &str, y: &str| (x.to_string(), vec![y.to_string()]);
    let table = |x: &str, y: &str| {
        (
            x.to_string(),
            vec![
                (vec![(y.to_string(), "yes".to_string())], "grain".to_string()),
                (vec![(y.to_string(), "no".to_string())], "grape".to_string()),
            ],
        )
    };
    DeterministicProcedure::from_labels(
        source,
        target,
        vec![
            query("SammyA", "pint"),
            query("EvilG", "wine"),
            query("GeorgieB", "grub"),
            query("JohnnyB", "grub"),
        ],
        vec![
            table("SammyA", "pint"),
            table("EvilG", "wine"),
            table("GeorgieB", "grub"),
            table("JohnnyB", "grub"),
        ],
    )
    .expect("triangle to square procedure")
}

/// Win conditions of the CHSH game: anti-coordinate on SammyA/EvilG,
/// coordinate everywhere else.
pub fn chsh_game_conditions() -> Vec<(Vec<&'static str>, Vec<[&'static str; 2]>)> {
    let same = vec![["grain", "grain"], ["grape", "grape"]];
    vec![
        (vec!["SammyA", "EvilG"], vec![["grape", "grain"], ["grain", "grape"]]),
        (vec!["SammyA", "GeorgieB"], same.clone()),
        (vec!["GeorgieB", "JohnnyB"], same.clone()),
        (vec!["JohnnyB", "EvilG"], same),
    ]
}

/// The CHSH game as a uniform mixture of four deterministic predicates.
pub fn chsh_game() -> Experiment {
    let sq = Arc::new(square());
    let parts: Vec<GamePart> = chsh_game_conditions()
        .into_iter()
        .map(|(ctx, accept)| {
            let rows = accept
                .iter()
                .map(|pair| vec![(ctx[0], pair[0]), (ctx[1], pair[1])])
                .collect();
            (ratio(1, 4), ctx, rows)
        })
        .collect();
    Experiment::game(sq, &parts).expect("CHSH game")
}

/// The CHSH win conditions read as a possibilistic predicate.
pub fn chsh_predicate() -> PossibilisticPredicate {
    let sq = Arc::new(square());
    let comps: Vec<LabelledComponent> = chsh_game_conditions()
        .into_iter()
        .map(|(ctx, accept)| {
            let rows = accept
                .iter()
                .map(|pair| vec![(ctx[0], pair[0]), (ctx[1], pair[1])])
                .collect();
            (ctx, rows)
        })
        .collect();
    PossibilisticPredicate::from_labels(sq, &comps).expect("CHSH predicate")
}
