//! JSON interchange formats.
//!
//! Rationals are strings (`"3/8"`), assignments are objects keyed by
//! measurement id, and a scenario may be given inline, as `"zero"`, as
//! `"dice(n)"`, or as a path resolved relative to the referencing file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::games::{Experiment, PossibilisticPredicate};
use crate::hom::{HomScenario, RealizabilityQuery};
use crate::model::{Distribution, EmpiricalModel, PossibilisticModel};
use crate::procedure::{DeterministicProcedure, ProbabilisticProcedure};
use crate::rational::{self, Rational};
use crate::scenario::{Assignment, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("malformed JSON in {path}: {message}")]
    Json { path: PathBuf, message: String },
    #[error("`{0}` is not an exact rational")]
    Rational(String),
    #[error("scenario reference cycle through {0}")]
    Cycle(PathBuf),
    #[error(transparent)]
    Invalid(#[from] Error),
}

pub type FormatResult<T> = std::result::Result<T, FormatError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementJson {
    pub id: String,
    pub outcomes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioJson {
    pub measurements: Vec<MeasurementJson>,
    pub maximal_contexts: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioRef {
    Named(String),
    Inline(ScenarioJson),
}

pub type AssignmentJson = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightJson {
    pub assignment: AssignmentJson,
    pub p: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionJson {
    pub context: Vec<String>,
    pub weights: Vec<WeightJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioRef>,
    pub distributions: Vec<DistributionJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportJson {
    pub context: Vec<String>,
    pub support: Vec<AssignmentJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PossibilisticModelJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioRef>,
    pub distributions: Vec<SupportJson>,
}

/// Either kind of model, told apart by `weights` versus `support`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnyModelJson {
    Probabilistic(ModelJson),
    Possibilistic(PossibilisticModelJson),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowJson {
    #[serde(rename = "in")]
    pub input: AssignmentJson,
    pub out: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub weight: String,
    pub pi: BTreeMap<String, Vec<String>>,
    pub alpha: BTreeMap<String, Vec<RowJson>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcedureJson {
    pub source: ScenarioRef,
    pub target: ScenarioRef,
    pub mixture: Vec<ComponentJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateComponentJson {
    pub context: Vec<String>,
    pub accept: Vec<AssignmentJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateJson {
    pub scenario: ScenarioRef,
    pub components: Vec<PredicateComponentJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryEntryJson {
    pub assignment: AssignmentJson,
    pub model: ModelJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryJson {
    pub source: ScenarioRef,
    pub target: ScenarioRef,
    #[serde(rename = "F")]
    pub entries: Vec<QueryEntryJson>,
}

/// Reads and parses a JSON file.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> FormatResult<T> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| FormatError::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Resolves file references relative to `dir`.
pub struct Loader {
    dir: PathBuf,
    stack: Vec<PathBuf>,
}

impl Loader {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Loader {
            dir: dir.into(),
            stack: Vec::new(),
        }
    }

    /// A loader for references found in the file at `path`.
    pub fn beside(path: &Path) -> Self {
        Self::new(path.parent().map(Path::to_path_buf).unwrap_or_default())
    }

    pub fn scenario(&mut self, r: &ScenarioRef) -> FormatResult<Arc<Scenario>> {
        match r {
            ScenarioRef::Inline(json) => Ok(Arc::new(scenario_from_json(json)?)),
            ScenarioRef::Named(name) => {
                if name == "zero" {
                    return Ok(Arc::new(Scenario::zero()));
                }
                if let Some(n) = name.strip_prefix("dice(").and_then(|s| s.strip_suffix(')')) {
                    if let Ok(n) = n.trim().parse::<usize>() {
                        return Ok(Arc::new(Scenario::dice(n)?));
                    }
                }
                let path = self.dir.join(name);
                if self.stack.contains(&path) {
                    return Err(FormatError::Cycle(path));
                }
                let referenced: ScenarioRef = read_json(&path)?;
                let saved = std::mem::replace(&mut self.dir, path.parent().map(Path::to_path_buf).unwrap_or_default());
                self.stack.push(path);
                let result = self.scenario(&referenced);
                self.stack.pop();
                self.dir = saved;
                result
            }
        }
    }

    pub fn model(&mut self, json: &ModelJson, default: Option<&Arc<Scenario>>) -> FormatResult<EmpiricalModel> {
        let scenario = self.model_scenario(json.scenario.as_ref(), default)?;
        model_from_json(scenario, json)
    }

    pub fn possibilistic_model(
        &mut self,
        json: &PossibilisticModelJson,
        default: Option<&Arc<Scenario>>,
    ) -> FormatResult<PossibilisticModel> {
        let scenario = self.model_scenario(json.scenario.as_ref(), default)?;
        let raw = json
            .distributions
            .iter()
            .map(|d| {
                let context = scenario.set_of(&d.context)?;
                let support = d
                    .support
                    .iter()
                    .map(|a| assignment_from_json(&scenario, a))
                    .collect::<Result<Vec<_>, Error>>()?;
                Ok((context, support))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(PossibilisticModel::new(scenario, raw)?)
    }

    fn model_scenario(
        &mut self,
        r: Option<&ScenarioRef>,
        default: Option<&Arc<Scenario>>,
    ) -> FormatResult<Arc<Scenario>> {
        match (r, default) {
            (Some(r), Some(d)) => {
                let s = self.scenario(r)?;
                if *s != **d {
                    return Err(Error::ScenarioMismatch.into());
                }
                Ok(d.clone())
            }
            (Some(r), None) => self.scenario(r),
            (None, Some(d)) => Ok(d.clone()),
            (None, None) => Err(Error::Internal("model has no scenario".into()).into()),
        }
    }

    pub fn procedure(&mut self, json: &ProcedureJson) -> FormatResult<ProbabilisticProcedure> {
        let source = self.scenario(&json.source)?;
        let target = self.scenario(&json.target)?;
        let components = json
            .mixture
            .iter()
            .map(|c| {
                let w = parse_rational(&c.weight)?;
                let pi = c.pi.iter().map(|(x, ids)| (x.clone(), ids.clone())).collect();
                let alpha = c
                    .alpha
                    .iter()
                    .map(|(x, rows)| {
                        let rows = rows
                            .iter()
                            .map(|r| {
                                let input = r.input.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
                                (input, r.out.clone())
                            })
                            .collect();
                        (x.clone(), rows)
                    })
                    .collect();
                let f = DeterministicProcedure::from_labels(source.clone(), target.clone(), pi, alpha)?;
                Ok((w, f))
            })
            .collect::<FormatResult<Vec<_>>>()?;
        Ok(ProbabilisticProcedure::new(components)?)
    }

    pub fn experiment(&mut self, json: &ProcedureJson) -> FormatResult<Experiment> {
        Ok(Experiment::new(self.procedure(json)?)?)
    }

    pub fn predicate(&mut self, json: &PredicateJson) -> FormatResult<PossibilisticPredicate> {
        let scenario = self.scenario(&json.scenario)?;
        let components = json
            .components
            .iter()
            .map(|c| {
                let sigma = scenario.set_of(&c.context)?;
                let space = scenario.events(&sigma);
                let accept = c
                    .accept
                    .iter()
                    .map(|a| {
                        let a = assignment_from_json(&scenario, a)?;
                        if a.domain != sigma {
                            return Err(Error::NotSubdomain);
                        }
                        Ok(space.rank_of(&a))
                    })
                    .collect::<Result<_, Error>>()?;
                Ok((sigma, accept))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(PossibilisticPredicate::new(scenario, components)?)
    }

    pub fn query(&mut self, json: &QueryJson, budget: u128) -> FormatResult<RealizabilityQuery> {
        let source = self.scenario(&json.source)?;
        let target = self.scenario(&json.target)?;
        let entries = json
            .entries
            .iter()
            .map(|e| {
                let s = assignment_from_json(&source, &e.assignment)?;
                let m = self.model(&e.model, Some(&target))?;
                Ok((s, m))
            })
            .collect::<FormatResult<Vec<_>>>()?;
        Ok(RealizabilityQuery::new(source, target, entries, budget)?)
    }
}

pub fn parse_rational(text: &str) -> FormatResult<Rational> {
    rational::parse(text).ok_or_else(|| FormatError::Rational(text.to_string()))
}

pub fn scenario_from_json(json: &ScenarioJson) -> Result<Scenario, Error> {
    Scenario::new(
        json.measurements.iter().map(|m| (m.id.clone(), m.outcomes.clone())),
        json.maximal_contexts.iter().cloned(),
    )
}

pub fn scenario_to_json(s: &Scenario) -> ScenarioJson {
    ScenarioJson {
        measurements: s
            .measurements()
            .iter()
            .map(|m| MeasurementJson {
                id: m.id.clone(),
                outcomes: m.outcomes.clone(),
            })
            .collect(),
        maximal_contexts: s.facets().iter().map(|f| s.ids_of(f)).collect(),
    }
}

pub fn assignment_from_json(s: &Scenario, a: &AssignmentJson) -> Result<Assignment, Error> {
    let pairs: Vec<(&str, &str)> = a.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    s.assignment(&pairs)
}

pub fn assignment_to_json(s: &Scenario, a: &Assignment) -> AssignmentJson {
    s.labels_of(a).into_iter().collect()
}

fn model_from_json(scenario: Arc<Scenario>, json: &ModelJson) -> FormatResult<EmpiricalModel> {
    let raw = json
        .distributions
        .iter()
        .map(|d| {
            let context = scenario.set_of(&d.context)?;
            let weights = d
                .weights
                .iter()
                .map(|w| Ok((assignment_from_json(&scenario, &w.assignment)?, parse_rational(&w.p)?)))
                .collect::<FormatResult<Vec<_>>>()?;
            Ok((context, weights))
        })
        .collect::<FormatResult<Vec<_>>>()?;
    Ok(EmpiricalModel::new(scenario, raw)?)
}

fn distribution_to_json(s: &Scenario, d: &Distribution) -> DistributionJson {
    let space = s.events(&d.context);
    DistributionJson {
        context: s.ids_of(&d.context),
        weights: d
            .weights
            .iter()
            .map(|(&r, p)| WeightJson {
                assignment: assignment_to_json(s, &space.assignment_at(r)),
                p: rational::format(p),
            })
            .collect(),
    }
}

/// Serialises a model with its scenario inlined.
pub fn model_to_json(e: &EmpiricalModel) -> ModelJson {
    let s = e.scenario();
    ModelJson {
        scenario: Some(ScenarioRef::Inline(scenario_to_json(s))),
        distributions: e.distributions().iter().map(|d| distribution_to_json(s, d)).collect(),
    }
}

pub fn possibilistic_model_to_json(e: &PossibilisticModel) -> PossibilisticModelJson {
    let s = e.scenario();
    PossibilisticModelJson {
        scenario: Some(ScenarioRef::Inline(scenario_to_json(s))),
        distributions: s
            .facets()
            .iter()
            .zip(e.supports())
            .map(|(f, support)| {
                let space = s.events(f);
                SupportJson {
                    context: s.ids_of(f),
                    support: support
                        .iter()
                        .map(|&r| assignment_to_json(s, &space.assignment_at(r)))
                        .collect(),
                }
            })
            .collect(),
    }
}

fn component_to_json(w: &Rational, f: &DeterministicProcedure) -> ComponentJson {
    let (source, target) = (f.source(), f.target());
    let mut pi = BTreeMap::new();
    let mut alpha = BTreeMap::new();
    for x in 0..target.measurement_count() {
        let id = target.id(x).to_string();
        pi.insert(id.clone(), source.ids_of(f.pi(x)));
        let space = source.events(f.pi(x));
        let rows = f
            .alpha(x)
            .iter()
            .enumerate()
            .map(|(r, &o)| RowJson {
                input: assignment_to_json(source, &space.assignment_at(r)),
                out: target.outcomes(x)[o].clone(),
            })
            .collect();
        alpha.insert(id, rows);
    }
    ComponentJson {
        weight: rational::format(w),
        pi,
        alpha,
    }
}

pub fn procedure_to_json(p: &ProbabilisticProcedure) -> ProcedureJson {
    ProcedureJson {
        source: ScenarioRef::Inline(scenario_to_json(p.source())),
        target: ScenarioRef::Inline(scenario_to_json(p.target())),
        mixture: p.components().iter().map(|(w, f)| component_to_json(w, f)).collect(),
    }
}

pub fn predicate_to_json(g: &PossibilisticPredicate) -> PredicateJson {
    let s = g.scenario();
    PredicateJson {
        scenario: ScenarioRef::Inline(scenario_to_json(s)),
        components: g
            .components()
            .iter()
            .map(|(sigma, accept)| {
                let space = s.events(sigma);
                PredicateComponentJson {
                    context: s.ids_of(sigma),
                    accept: accept
                        .iter()
                        .map(|&r| assignment_to_json(s, &space.assignment_at(r)))
                        .collect(),
                }
            })
            .collect(),
    }
}

pub fn query_to_json(q: &RealizabilityQuery) -> QueryJson {
    QueryJson {
        source: ScenarioRef::Inline(scenario_to_json(q.source())),
        target: ScenarioRef::Inline(scenario_to_json(q.target())),
        entries: q
            .entries()
            .into_iter()
            .map(|(s, e)| QueryEntryJson {
                assignment: assignment_to_json(q.source(), &s),
                model: ModelJson {
                    scenario: None,
                    distributions: e
                        .distributions()
                        .iter()
                        .map(|d| distribution_to_json(e.scenario(), d))
                        .collect(),
                },
            })
            .collect(),
    }
}

/// `[S,T]` in the scenario schema, outcomes carrying their canonical labels.
pub fn hom_to_json(h: &HomScenario) -> ScenarioJson {
    scenario_to_json(h.base())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn model_round_trip() {
        for e in [catalog::chsh_model(), catalog::pr_model(), catalog::triangle_model()] {
            let json = serde_json::to_string(&model_to_json(&e)).unwrap();
            let back: ModelJson = serde_json::from_str(&json).unwrap();
            assert_eq!(Loader::new(".").model(&back, None).unwrap(), e);
        }
    }

    #[test]
    fn procedure_round_trip() {
        let p = ProbabilisticProcedure::deterministic(catalog::triangle_to_square());
        let json = procedure_to_json(&p);
        assert_eq!(Loader::new(".").procedure(&json).unwrap(), p);
    }

    #[test]
    fn predicate_round_trip() {
        let g = catalog::chsh_predicate();
        assert_eq!(Loader::new(".").predicate(&predicate_to_json(&g)).unwrap(), g);
    }

    #[test]
    fn named_scenarios() {
        let mut l = Loader::new(".");
        assert_eq!(
            *l.scenario(&ScenarioRef::Named("zero".into())).unwrap(),
            Scenario::zero()
        );
        assert_eq!(
            *l.scenario(&ScenarioRef::Named("dice(3)".into())).unwrap(),
            Scenario::dice(3).unwrap()
        );
        assert!(matches!(
            l.scenario(&ScenarioRef::Named("no-such-file.json".into())),
            Err(FormatError::Io { .. })
        ));
    }

    #[test]
    fn bad_rational_is_rejected() {
        let mut json = model_to_json(&catalog::pr_model());
        json.distributions[0].weights[0].p = "0.5".into();
        assert!(matches!(
            Loader::new(".").model(&json, None),
            Err(FormatError::Rational(_))
        ));
    }

    #[test]
    fn possibilistic_json_is_distinguished() {
        let pm = possibilistic_model_to_json(&catalog::pr_model().collapse());
        let text = serde_json::to_string(&pm).unwrap();
        assert!(matches!(
            serde_json::from_str::<AnyModelJson>(&text).unwrap(),
            AnyModelJson::Possibilistic(_)
        ));
        let text = serde_json::to_string(&model_to_json(&catalog::pr_model())).unwrap();
        assert!(matches!(
            serde_json::from_str::<AnyModelJson>(&text).unwrap(),
            AnyModelJson::Probabilistic(_)
        ));
    }
}
