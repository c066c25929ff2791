//! Experiments (procedures into `dice(n)`) and possibilistic predicates
//! (Boolean mixtures of deterministic predicates `S → dice(2)`).

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;

use crate::contextuality::check_budget;
use crate::error::{Error, Result};
use crate::model::{EmpiricalModel, PossibilisticModel};
use crate::procedure::{DeterministicProcedure, ProbabilisticProcedure};
use crate::rational::Rational;
use crate::scenario::{intersection, Assignment, MeasurementSet, Scenario};

/// Joint outcomes of a context, given as `(measurement, outcome)` labels.
pub type LabelledRows<'a> = Vec<Vec<(&'a str, &'a str)>>;
/// A context and the joint outcomes it accepts.
pub type LabelledComponent<'a> = (Vec<&'a str>, LabelledRows<'a>);
/// A weighted component of a game.
pub type GamePart<'a> = (Rational, Vec<&'a str>, LabelledRows<'a>);

/// Global assignment count above which the canonical-model postcondition
/// (domination of every satisfying `δ_s`) is not re-checked exhaustively.
const EXHAUSTIVE_CHECK_LIMIT: u128 = 1 << 12;

/// A probabilistic procedure into `dice(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Experiment {
    procedure: ProbabilisticProcedure,
}

impl Experiment {
    pub fn new(procedure: ProbabilisticProcedure) -> Result<Self> {
        let t = procedure.target();
        if t.measurement_count() != 1 || t.id(0) != "*" || t.facets() != [vec![0]] {
            return Err(Error::ScenarioMismatch);
        }
        Ok(Experiment { procedure })
    }

    /// A game: a mixture of deterministic predicates, each accepting the
    /// listed joint outcomes of one context.
    pub fn game(scenario: Arc<Scenario>, parts: &[GamePart]) -> Result<Self> {
        let d2 = Arc::new(Scenario::dice(2)?);
        let components = parts
            .iter()
            .map(|(w, ctx, rows)| {
                let sigma = scenario.set_of(ctx)?;
                let accept = accept_set(&scenario, &sigma, rows)?;
                Ok((w.clone(), predicate_procedure(&scenario, &d2, &sigma, &accept)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ProbabilisticProcedure::new(components)?)
    }

    pub fn procedure(&self) -> &ProbabilisticProcedure {
        &self.procedure
    }

    pub fn outcomes(&self) -> usize {
        self.procedure.target().outcome_count(0)
    }
}

fn accept_set(scenario: &Scenario, sigma: &[usize], rows: &[Vec<(&str, &str)>]) -> Result<BTreeSet<usize>> {
    if !scenario.contains_face(sigma) {
        return Err(Error::NotAContext(scenario.label(sigma)));
    }
    let space = scenario.events(sigma);
    rows.iter()
        .map(|row| {
            let a = scenario.assignment(row)?;
            if a.domain != sigma {
                return Err(Error::NotSubdomain);
            }
            Ok(space.rank_of(&a))
        })
        .collect()
}

/// `π(*) = σ`, `α(s) = 1` iff `s` is accepted.
fn predicate_procedure(
    scenario: &Arc<Scenario>,
    d2: &Arc<Scenario>,
    sigma: &[usize],
    accept: &BTreeSet<usize>,
) -> Result<DeterministicProcedure> {
    let size = scenario.events(sigma).size();
    let table = (0..size).map(|r| usize::from(accept.contains(&r))).collect();
    DeterministicProcedure::new(scenario.clone(), d2.clone(), vec![sigma.to_vec()], vec![table])
}

/// Probability of outcome `"1"` in the pushforward.
pub fn model_value(experiment: &Experiment, e: &EmpiricalModel) -> Result<Rational> {
    if experiment.outcomes() != 2 {
        return Err(Error::InvalidArity(experiment.outcomes()));
    }
    let pushed = experiment.procedure.pushforward(e)?;
    Ok(pushed.distributions()[0].weight(1))
}

/// Maximum of [`model_value`] over deterministic models, with the
/// lexicographically first maximising global assignment.
pub fn classical_value(experiment: &Experiment, budget: u128) -> Result<(Rational, Assignment)> {
    if experiment.outcomes() != 2 {
        return Err(Error::InvalidArity(experiment.outcomes()));
    }
    let sc = experiment.procedure.source();
    let all = sc.all_measurements();
    check_budget(sc.event_count(&all), budget)?;
    let space = sc.events(&all);
    let mut best: Option<(Rational, usize)> = None;
    for (r, s) in space.iter().enumerate() {
        let value = experiment
            .procedure
            .components()
            .iter()
            .filter(|(_, f)| f.apply_global(&s)[0] == 1)
            .fold(Rational::zero(), |acc, (w, _)| acc + w);
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, r));
        }
    }
    let (value, r) = best.expect("Ev(X) is non-empty");
    Ok((value, space.assignment_at(r)))
}

/// A Boolean mixture of deterministic predicates `(σ, A ⊆ Ev(σ))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PossibilisticPredicate {
    scenario: Arc<Scenario>,
    components: Vec<(MeasurementSet, BTreeSet<usize>)>,
}

impl PossibilisticPredicate {
    pub fn new(scenario: Arc<Scenario>, components: Vec<(MeasurementSet, BTreeSet<usize>)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyMixture);
        }
        for (sigma, accept) in &components {
            if !scenario.contains_face(sigma) || sigma.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::NotAContext(scenario.label(sigma)));
            }
            if accept.iter().any(|&r| r as u128 >= scenario.event_count(sigma)) {
                return Err(Error::Internal("accept rank out of range".into()));
            }
        }
        Ok(PossibilisticPredicate { scenario, components })
    }

    pub fn from_labels(scenario: Arc<Scenario>, components: &[LabelledComponent]) -> Result<Self> {
        let comps = components
            .iter()
            .map(|(ctx, rows)| {
                let sigma = scenario.set_of(ctx)?;
                let accept = accept_set(&scenario, &sigma, rows)?;
                Ok((sigma, accept))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(scenario, comps)
    }

    /// Accepts everything: `A = Ev(σ)` on every facet.
    pub fn trivial(scenario: Arc<Scenario>) -> Self {
        let components = scenario
            .facets()
            .iter()
            .map(|f| (f.clone(), (0..scenario.events(f).size()).collect()))
            .collect();
        PossibilisticPredicate { scenario, components }
    }

    /// `g(e)`: one component per facet accepting the support there.
    pub fn from_model(e: &PossibilisticModel) -> Self {
        let scenario = e.scenario().clone();
        let components = scenario
            .facets()
            .iter()
            .cloned()
            .zip(e.supports().iter().cloned())
            .collect();
        PossibilisticPredicate { scenario, components }
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn components(&self) -> &[(MeasurementSet, BTreeSet<usize>)] {
        &self.components
    }

    /// Whether a global assignment passes every component.
    pub fn accepts_global(&self, s: &Assignment) -> bool {
        self.components.iter().all(|(sigma, accept)| {
            let local = s.restrict(sigma).expect("context within X");
            accept.contains(&self.scenario.events(sigma).rank_of(&local))
        })
    }
}

/// `supp(e_σ) ⊆ A` for every component.
pub fn satisfies(e: &PossibilisticModel, predicate: &PossibilisticPredicate) -> Result<bool> {
    if **e.scenario() != *predicate.scenario {
        return Err(Error::ScenarioMismatch);
    }
    for (sigma, accept) in &predicate.components {
        if !e.support_at(sigma)?.is_subset(accept) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Probabilistic models satisfy a predicate through their collapse.
pub fn satisfies_model(e: &EmpiricalModel, predicate: &PossibilisticPredicate) -> Result<bool> {
    satisfies(&e.collapse(), predicate)
}

pub fn predicate_from_model(e: &PossibilisticModel) -> PossibilisticPredicate {
    PossibilisticPredicate::from_model(e)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Satisfiability {
    /// The greatest model satisfying the predicate.
    Satisfiable(PossibilisticModel),
    Unsatisfiable,
}

impl Satisfiability {
    pub fn model(&self) -> Option<&PossibilisticModel> {
        match self {
            Satisfiability::Satisfiable(m) => Some(m),
            Satisfiability::Unsatisfiable => None,
        }
    }
}

/// The greatest possibilistic model satisfying the predicate, by pruning
/// facet candidate sets to a fixpoint: a joint outcome survives only if
/// its restriction to every facet overlap (including the empty one) is
/// the restriction of a surviving outcome there.
pub fn canonical_model_of_predicate(predicate: &PossibilisticPredicate, budget: u128) -> Result<Satisfiability> {
    let sc = &predicate.scenario;
    let facets = sc.facets();
    for f in facets {
        check_budget(sc.event_count(f), budget)?;
    }
    let spaces: Vec<_> = facets.iter().map(|f| sc.events(f)).collect();
    let mut cand: Vec<BTreeSet<usize>> = spaces.iter().map(|s| (0..s.size()).collect()).collect();
    for (sigma, accept) in &predicate.components {
        for k in 0..facets.len() {
            if let Some(proj) = spaces[k].projection(sigma) {
                cand[k].retain(|&r| accept.contains(&proj.apply(r)));
            }
        }
    }
    let mut projections = Vec::new();
    for i in 0..facets.len() {
        for j in 0..facets.len() {
            if i != j {
                let overlap = intersection(&facets[i], &facets[j]);
                let pi = spaces[i].projection(&overlap).expect("overlap within facet");
                let pj = spaces[j].projection(&overlap).expect("overlap within facet");
                projections.push((i, j, pi, pj));
            }
        }
    }
    loop {
        let mut changed = false;
        for (i, j, pi, pj) in &projections {
            let reachable: BTreeSet<usize> = cand[*j].iter().map(|&r| pj.apply(r)).collect();
            let before = cand[*i].len();
            cand[*i].retain(|&r| reachable.contains(&pi.apply(r)));
            changed |= cand[*i].len() != before;
        }
        if !changed {
            break;
        }
    }
    if cand.iter().any(|c| c.is_empty()) {
        return Ok(Satisfiability::Unsatisfiable);
    }
    let model = PossibilisticModel::from_supports(sc.clone(), cand)?;
    if !satisfies(&model, predicate)? {
        return Err(Error::Internal("canonical model violates its predicate".into()));
    }
    let all = sc.all_measurements();
    if sc.event_count(&all) <= EXHAUSTIVE_CHECK_LIMIT {
        for s in sc.events(&all).iter() {
            let s = sc.events(&all).assignment(s);
            if predicate.accepts_global(&s) && !PossibilisticModel::deterministic(sc.clone(), &s)?.leq(&model)? {
                return Err(Error::Internal(
                    "canonical model misses a satisfying deterministic model".into(),
                ));
            }
        }
    }
    Ok(Satisfiability::Satisfiable(model))
}

/// `g ≤ h`: every model satisfying `g` satisfies `h`.
pub fn predicate_leq(g: &PossibilisticPredicate, h: &PossibilisticPredicate, budget: u128) -> Result<bool> {
    if *g.scenario != *h.scenario {
        return Err(Error::ScenarioMismatch);
    }
    match canonical_model_of_predicate(g, budget)? {
        Satisfiability::Unsatisfiable => Ok(true),
        Satisfiability::Satisfiable(m) => satisfies(&m, h),
    }
}

/// Exactly one measurement of each facet yields `"1"`.
pub fn ks_predicate(scenario: Arc<Scenario>) -> Result<PossibilisticPredicate> {
    let mut ones = Vec::with_capacity(scenario.measurement_count());
    for m in scenario.measurements() {
        let mut labels: Vec<&str> = m.outcomes.iter().map(String::as_str).collect();
        labels.sort_unstable();
        if labels != ["0", "1"] {
            return Err(Error::NotDichotomic(m.id.clone()));
        }
        ones.push(m.outcomes.iter().position(|o| o == "1").expect("checked"));
    }
    let components = scenario
        .facets()
        .iter()
        .map(|f| {
            let space = scenario.events(f);
            let accept = (0..space.size())
                .filter(|&r| {
                    let values = space.unrank(r);
                    f.iter().zip(values).filter(|&(&m, v)| v == ones[m]).count() == 1
                })
                .collect();
            (f.clone(), accept)
        })
        .collect();
    PossibilisticPredicate::new(scenario, components)
}
