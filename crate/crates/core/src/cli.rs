//! The `ctx` command line: JSON files in, one deterministic JSON report out.
//!
//! Exit codes: 0 success or property holds, 1 checked property fails,
//! 2 invalid input, 3 budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::contextuality::{self, Witness, DEFAULT_BUDGET};
use crate::error::Error;
use crate::format::{
    self, AnyModelJson, FormatError, Loader, ModelJson, PredicateJson, ProcedureJson, QueryJson, ScenarioRef,
};
use crate::games::{self, Satisfiability};
use crate::hom::{self, Realizability, DEFAULT_HOM_BUDGET};
use crate::model::{EmpiricalModel, PossibilisticModel};
use crate::procedure::{self, SimulationMode};
use crate::rational;
use crate::scenario::Scenario;

#[derive(Debug, Parser)]
#[command(name = "ctx", version, about = "Exact contextuality analysis of empirical models")]
pub struct Cli {
    /// Ceiling on enumerated objects (assignments, procedures, search nodes).
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Simulation mode; `check` collapses to the support unless probabilistic.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Probabilistic,
    Possibilistic,
    Weak,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a model in the contextuality hierarchy.
    Check { model: PathBuf },
    /// Push a model forward along a procedure.
    Push { procedure: PathBuf, model: PathBuf },
    /// Check that a procedure maps one model to another.
    VerifySim {
        procedure: PathBuf,
        from: PathBuf,
        to: PathBuf,
    },
    /// Classical value of a game, or its value on a model.
    GameValue { game: PathBuf, model: Option<PathBuf> },
    /// Decide whether a query is induced by a classical procedure.
    Realizable { query: PathBuf },
    /// The hom-scenario [S,T] and its predicate.
    Hom { source: String, target: String },
    /// The Kochen–Specker predicate of a dichotomic scenario.
    Ks { scenario: String },
    /// The canonical model of a predicate.
    CanonicalPredicate { predicate: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Push { .. } => "push",
            Command::VerifySim { .. } => "verify-sim",
            Command::GameValue { .. } => "game-value",
            Command::Realizable { .. } => "realizable",
            Command::Hom { .. } => "hom",
            Command::Ks { .. } => "ks",
            Command::CanonicalPredicate { .. } => "canonical-predicate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputRecord {
    pub path: String,
    /// Hex SHA-256 of the file; absent for `zero` and `dice(n)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub exit_code: u8,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

struct Outcome {
    result: Value,
    details: Option<Value>,
    exit_code: u8,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome {
            result,
            details: None,
            exit_code: 0,
        }
    }

    fn holds(result: Value, holds: bool) -> Self {
        Outcome {
            result,
            details: None,
            exit_code: if holds { 0 } else { 1 },
        }
    }
}

struct Run {
    budget: Option<u128>,
    mode: Option<Mode>,
    inputs: Vec<InputRecord>,
}

impl Run {
    fn budget(&self, default: u128) -> u128 {
        self.budget.unwrap_or(default)
    }

    fn read<T: for<'de> serde::Deserialize<'de>>(&mut self, path: &Path) -> Result<(T, Loader), FormatError> {
        let bytes = fs::read(path).map_err(|e| FormatError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        self.inputs.push(InputRecord {
            path: path.display().to_string(),
            sha256: Some(hex::encode(Sha256::digest(&bytes))),
        });
        let value = serde_json::from_slice(&bytes).map_err(|e| FormatError::Json {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok((value, Loader::beside(path)))
    }

    fn scenario(&mut self, arg: &str) -> Result<std::sync::Arc<Scenario>, FormatError> {
        if arg == "zero" || (arg.starts_with("dice(") && arg.ends_with(')')) {
            self.inputs.push(InputRecord {
                path: arg.to_string(),
                sha256: None,
            });
            return Loader::new(".").scenario(&ScenarioRef::Named(arg.to_string()));
        }
        let (r, mut loader): (ScenarioRef, _) = self.read(Path::new(arg))?;
        loader.scenario(&r)
    }

    fn any_model(&mut self, path: &Path) -> Result<AnyModel, FormatError> {
        let (json, mut loader): (AnyModelJson, _) = self.read(path)?;
        Ok(match json {
            AnyModelJson::Probabilistic(m) => AnyModel::Probabilistic(loader.model(&m, None)?),
            AnyModelJson::Possibilistic(m) => AnyModel::Possibilistic(loader.possibilistic_model(&m, None)?),
        })
    }

    fn procedure(&mut self, path: &Path) -> Result<procedure::ProbabilisticProcedure, FormatError> {
        let (json, mut loader): (ProcedureJson, _) = self.read(path)?;
        loader.procedure(&json)
    }
}

enum AnyModel {
    Probabilistic(EmpiricalModel),
    Possibilistic(PossibilisticModel),
}

impl AnyModel {
    fn support(&self) -> PossibilisticModel {
        match self {
            AnyModel::Probabilistic(e) => e.collapse(),
            AnyModel::Possibilistic(p) => p.clone(),
        }
    }
}

fn verdict(contextual: bool) -> &'static str {
    if contextual {
        "contextual"
    } else {
        "noncontextual"
    }
}

fn witness_json(s: &Scenario, w: &Witness) -> Value {
    match w {
        Witness::GlobalDistribution(weights) => json!({
            "global_distribution": weights
                .iter()
                .map(|(a, p)| json!({"assignment": format::assignment_to_json(s, a), "p": rational::format(p)}))
                .collect::<Vec<_>>()
        }),
        Witness::NonExtendable { facet, assignment } => json!({
            "non_extendable": {
                "context": s.ids_of(&s.facets()[*facet]),
                "assignment": format::assignment_to_json(s, assignment),
            }
        }),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialisable")
}

fn execute_command(run: &mut Run, command: &Command) -> Result<Outcome, FormatError> {
    match command {
        Command::Check { model } => {
            let model = run.any_model(model)?;
            let budget = run.budget(DEFAULT_BUDGET);
            match (&model, run.mode) {
                (AnyModel::Probabilistic(e), None | Some(Mode::Probabilistic)) => {
                    let r = contextuality::classify(e, budget)?;
                    let mut out = json!({
                        "probabilistic": verdict(r.probabilistically_contextual),
                        "logical": verdict(r.logically_contextual),
                        "strong": verdict(r.strongly_contextual),
                    });
                    if let Some(w) = &r.witness {
                        out["witness"] = witness_json(e.scenario(), w);
                    }
                    Ok(Outcome::ok(out))
                }
                _ => {
                    let pm = model.support();
                    let r = contextuality::classify_possibilistic(&pm, budget)?;
                    let mut out = json!({
                        "logical": verdict(r.logically_contextual),
                        "strong": verdict(r.strongly_contextual),
                    });
                    if let Some((facet, assignment)) = r.non_extendable {
                        out["witness"] = witness_json(pm.scenario(), &Witness::NonExtendable { facet, assignment });
                    }
                    Ok(Outcome::ok(out))
                }
            }
        }
        Command::Push { procedure, model } => {
            let f = run.procedure(procedure)?;
            Ok(Outcome::ok(match run.any_model(model)? {
                AnyModel::Probabilistic(e) => to_value(&format::model_to_json(&f.pushforward(&e)?)),
                AnyModel::Possibilistic(p) => {
                    to_value(&format::possibilistic_model_to_json(&f.support().pushforward(&p)?))
                }
            }))
        }
        Command::VerifySim { procedure, from, to } => {
            let f = run.procedure(procedure)?;
            let (e, d) = (run.any_model(from)?, run.any_model(to)?);
            let mode = run.mode.unwrap_or(Mode::Probabilistic);
            let holds = match (mode, &e, &d) {
                (Mode::Probabilistic, AnyModel::Probabilistic(e), AnyModel::Probabilistic(d)) => {
                    procedure::is_simulation(&f, e, d, SimulationMode::Probabilistic)?
                }
                (Mode::Probabilistic, _, _) => {
                    return Err(Error::Internal("probabilistic mode needs probabilistic models".into()).into())
                }
                (mode, e, d) => procedure::is_possibilistic_simulation(
                    &f.support(),
                    &e.support(),
                    &d.support(),
                    mode == Mode::Weak,
                )?,
            };
            Ok(Outcome::holds(json!({ "simulation": holds }), holds))
        }
        Command::GameValue { game, model } => {
            let (json, mut loader): (ProcedureJson, _) = run.read(game)?;
            let experiment = loader.experiment(&json)?;
            match model {
                Some(path) => {
                    let (m, mut loader): (ModelJson, _) = run.read(path)?;
                    let e = loader.model(&m, None)?;
                    let v = games::model_value(&experiment, &e)?;
                    Ok(Outcome::ok(json!(rational::format(&v))))
                }
                None => {
                    let (v, s) = games::classical_value(&experiment, run.budget(DEFAULT_BUDGET))?;
                    let src = experiment.procedure().source();
                    Ok(Outcome {
                        result: json!(rational::format(&v)),
                        details: Some(json!({ "maximizer": format::assignment_to_json(src, &s) })),
                        exit_code: 0,
                    })
                }
            }
        }
        Command::Realizable { query } => {
            let (json, mut loader): (QueryJson, _) = run.read(query)?;
            let budget = run.budget(DEFAULT_HOM_BUDGET);
            let q = loader.query(&json, budget)?;
            Ok(match hom::realizable(&q, budget)? {
                Realizability::Realizable(f) => Outcome::holds(
                    json!({"verdict": "realizable", "witness": to_value(&format::procedure_to_json(&f))}),
                    true,
                ),
                Realizability::NotRealizable => Outcome::holds(json!({"verdict": "not_realizable"}), false),
            })
        }
        Command::Hom { source, target } => {
            let (s, t) = (run.scenario(source)?, run.scenario(target)?);
            let budget = run.budget(DEFAULT_HOM_BUDGET);
            let h = hom::hom_scenario(&s, &t, budget)?;
            let g = h.predicate(budget)?;
            let predicate: PredicateJson = format::predicate_to_json(&g);
            Ok(Outcome::ok(json!({
                "scenario": to_value(&format::hom_to_json(&h)),
                "predicate": to_value(&predicate.components),
            })))
        }
        Command::Ks { scenario } => {
            let s = run.scenario(scenario)?;
            Ok(Outcome::ok(to_value(&format::predicate_to_json(&games::ks_predicate(
                s,
            )?))))
        }
        Command::CanonicalPredicate { predicate } => {
            let (json, mut loader): (PredicateJson, _) = run.read(predicate)?;
            let g = loader.predicate(&json)?;
            Ok(
                match games::canonical_model_of_predicate(&g, run.budget(DEFAULT_BUDGET))? {
                    Satisfiability::Satisfiable(m) => Outcome::ok(to_value(&format::possibilistic_model_to_json(&m))),
                    Satisfiability::Unsatisfiable => Outcome::holds(json!("unsatisfiable"), false),
                },
            )
        }
    }
}

fn exit_code_of(e: &FormatError) -> u8 {
    match e {
        FormatError::Invalid(Error::BudgetExceeded { .. }) => 3,
        _ => 2,
    }
}

/// Runs a parsed command line without touching stdout.
pub fn execute(cli: &Cli) -> RunReport {
    let mut run = Run {
        budget: cli.budget,
        mode: cli.mode,
        inputs: Vec::new(),
    };
    let outcome = execute_command(&mut run, &cli.command);
    let (result, details, error, exit_code) = match outcome {
        Ok(o) => (Some(o.result), o.details, None, o.exit_code),
        Err(e) => (None, None, Some(e.to_string()), exit_code_of(&e)),
    };
    RunReport {
        command: cli.command.name().to_string(),
        inputs: run.inputs,
        result,
        details,
        error,
        exit_code,
    }
}

/// Entry point of the `ctx` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = execute(&cli);
    if let Some(e) = &report.error {
        eprintln!("ctx {}: {e}", report.command);
    }
    let text = report.to_json();
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("ctx: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code)
}
