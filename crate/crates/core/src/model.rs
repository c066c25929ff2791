//! Probabilistic and possibilistic empirical models.
//!
//! A model stores one distribution (or support set) per facet of its
//! scenario; the value at any other context is obtained by marginalising
//! from a facet containing it. Weights are exact rationals keyed by the
//! rank of the assignment in `Ev(facet)` and stored sparsely.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::scenario::{intersection, Assignment, EventSpace, MeasurementSet, Scenario};

/// A sparse distribution on `Ev(context)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Distribution {
    pub context: MeasurementSet,
    pub weights: BTreeMap<usize, Rational>,
}

impl Distribution {
    pub fn point(context: MeasurementSet, rank: usize) -> Self {
        Distribution {
            context,
            weights: BTreeMap::from([(rank, Rational::one())]),
        }
    }

    pub fn weight(&self, rank: usize) -> Rational {
        self.weights.get(&rank).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.weights.keys().copied().collect()
    }

    /// Push-forward along the restriction `Ev(context) → Ev(sub)`.
    pub fn marginal(&self, scenario: &Scenario, sub: &[usize]) -> Distribution {
        let space = EventSpace::new(scenario, &self.context);
        let proj = space
            .projection(sub)
            .expect("marginal onto a non-subset of the context");
        let mut weights: BTreeMap<usize, Rational> = BTreeMap::new();
        for (&rank, w) in &self.weights {
            *weights.entry(proj.apply(rank)).or_insert_with(Rational::zero) += w;
        }
        weights.retain(|_, w| !w.is_zero());
        Distribution {
            context: sub.to_vec(),
            weights,
        }
    }

    fn total(&self) -> Rational {
        self.weights.values().fold(Rational::zero(), |acc, w| acc + w)
    }
}

/// A no-signalling probabilistic empirical model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EmpiricalModel {
    scenario: Arc<Scenario>,
    dists: Vec<Distribution>,
}

impl EmpiricalModel {
    /// Validates one raw distribution per facet. Compatibility is checked
    /// exactly on every pair of facets.
    pub fn new(scenario: Arc<Scenario>, raw: Vec<(MeasurementSet, Vec<(Assignment, Rational)>)>) -> Result<Self> {
        let mut slots: Vec<Option<Distribution>> = vec![None; scenario.facets().len()];
        for (context, entries) in raw {
            let Some(k) = scenario.facets().iter().position(|f| *f == context) else {
                return Err(Error::UnexpectedContext(scenario.label(&context)));
            };
            let space = scenario.events(&context);
            let mut weights: BTreeMap<usize, Rational> = BTreeMap::new();
            for (a, w) in entries {
                if a.domain != context {
                    return Err(Error::Internal(format!(
                        "assignment over {{{}}} listed under {{{}}}",
                        scenario.label(&a.domain),
                        scenario.label(&context)
                    )));
                }
                *weights.entry(space.rank_of(&a)).or_insert_with(Rational::zero) += w;
            }
            if slots[k].is_some() {
                return Err(Error::Internal(format!(
                    "two distributions for {{{}}}",
                    scenario.label(&context)
                )));
            }
            slots[k] = Some(Distribution { context, weights });
        }
        let dists = slots
            .into_iter()
            .enumerate()
            .map(|(k, d)| d.ok_or_else(|| Error::MissingFacet(scenario.label(&scenario.facets()[k]))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_distributions(scenario, dists)
    }

    /// Validates facet-aligned distributions (zero weights are dropped).
    pub fn from_distributions(scenario: Arc<Scenario>, mut dists: Vec<Distribution>) -> Result<Self> {
        if dists.len() != scenario.facets().len() {
            return Err(Error::Internal("wrong number of facet distributions".into()));
        }
        for (d, f) in dists.iter_mut().zip(scenario.facets()) {
            if d.context != *f {
                return Err(Error::UnexpectedContext(scenario.label(&d.context)));
            }
            if d.weights.values().any(|w| *w < Rational::zero()) {
                return Err(Error::NegativeWeight(scenario.label(f)));
            }
            d.weights.retain(|_, w| !w.is_zero());
            if !d.total().is_one() {
                return Err(Error::NotNormalized(scenario.label(f)));
            }
        }
        let model = EmpiricalModel { scenario, dists };
        model.check_compatible()?;
        Ok(model)
    }

    fn check_compatible(&self) -> Result<()> {
        let facets = self.scenario.facets();
        for i in 0..facets.len() {
            for j in (i + 1)..facets.len() {
                let overlap = intersection(&facets[i], &facets[j]);
                let left = self.dists[i].marginal(&self.scenario, &overlap);
                let right = self.dists[j].marginal(&self.scenario, &overlap);
                if left != right {
                    return Err(Error::IncompatibleMarginals {
                        first: self.scenario.label(&facets[i]),
                        second: self.scenario.label(&facets[j]),
                        overlap: self.scenario.label(&overlap),
                    });
                }
            }
        }
        Ok(())
    }

    /// Builds a model from tables written as in the literature: each row
    /// names a facet in display order and lists weights over its joint
    /// outcomes, the first listed measurement varying slowest.
    pub fn from_table<S: AsRef<str>>(scenario: Arc<Scenario>, rows: &[(Vec<S>, Vec<Rational>)]) -> Result<Self> {
        let mut raw = Vec::new();
        for (ids, weights) in rows {
            let order = ids
                .iter()
                .map(|id| scenario.index_of(id.as_ref()))
                .collect::<Result<Vec<_>>>()?;
            let radices: Vec<usize> = order.iter().map(|&m| scenario.outcome_count(m)).collect();
            let display = EventSpace::from_radices(order.clone(), radices);
            if weights.len() != display.size() {
                return Err(Error::Internal(format!(
                    "row for {{{}}} has {} entries, expected {}",
                    scenario.label(&order),
                    weights.len(),
                    display.size()
                )));
            }
            let mut context = order.clone();
            context.sort_unstable();
            let mut entries = Vec::new();
            for (values, w) in display.iter().zip(weights) {
                let mut pairs: Vec<(usize, usize)> = order.iter().copied().zip(values).collect();
                pairs.sort_unstable();
                let a = Assignment {
                    domain: pairs.iter().map(|p| p.0).collect(),
                    values: pairs.iter().map(|p| p.1).collect(),
                };
                entries.push((a, w.clone()));
            }
            raw.push((context, entries));
        }
        Self::new(scenario, raw)
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    /// Facet-aligned distributions.
    pub fn distributions(&self) -> &[Distribution] {
        &self.dists
    }

    /// `e|τ` computed from the first facet containing `τ`.
    pub fn marginal(&self, context: &[usize]) -> Result<Distribution> {
        let k = self
            .scenario
            .facet_containing(context)
            .ok_or_else(|| Error::NotAContext(self.scenario.label(context)))?;
        Ok(self.dists[k].marginal(&self.scenario, context))
    }

    pub fn marginal_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Distribution> {
        self.marginal(&self.scenario.set_of(ids)?)
    }

    /// Probability of one joint outcome at a context.
    pub fn probability(&self, a: &Assignment) -> Result<Rational> {
        let d = self.marginal(&a.domain)?;
        Ok(d.weight(self.scenario.events(&a.domain).rank_of(a)))
    }

    /// The deterministic model `δ_s` of a global assignment.
    pub fn deterministic(scenario: Arc<Scenario>, global: &Assignment) -> Result<Self> {
        if global.domain != scenario.all_measurements() {
            return Err(Error::NotGlobal(scenario.ids_of(&global.domain)));
        }
        let dists = scenario
            .facets()
            .iter()
            .map(|f| {
                let local = global.restrict(f).expect("facet within global domain");
                Distribution::point(f.clone(), scenario.events(f).rank_of(&local))
            })
            .collect();
        Ok(EmpiricalModel { scenario, dists })
    }

    /// Contextwise convex combination.
    pub fn convex_combine(terms: &[(Rational, &EmpiricalModel)]) -> Result<Self> {
        let first = terms.first().ok_or(Error::EmptyMixture)?;
        let scenario = first.1.scenario.clone();
        let mut total = Rational::zero();
        for (w, m) in terms {
            if *m.scenario != *scenario {
                return Err(Error::ScenarioMismatch);
            }
            if *w < Rational::zero() {
                return Err(Error::NegativeWeight("mixture".into()));
            }
            total += w;
        }
        if !total.is_one() {
            return Err(Error::NotNormalized("mixture".into()));
        }
        let dists = combine_facetwise(&scenario, terms);
        Ok(EmpiricalModel { scenario, dists })
    }

    pub fn collapse(&self) -> PossibilisticModel {
        PossibilisticModel {
            scenario: self.scenario.clone(),
            supports: self.dists.iter().map(|d| d.support()).collect(),
        }
    }

    pub(crate) fn from_parts_unchecked(scenario: Arc<Scenario>, dists: Vec<Distribution>) -> Self {
        EmpiricalModel { scenario, dists }
    }
}

/// Facetwise weighted sum with arbitrary (possibly negative) coefficients.
/// Used to evaluate affine combinations; no normalisation is checked.
pub fn combine_facetwise(scenario: &Scenario, terms: &[(Rational, &EmpiricalModel)]) -> Vec<Distribution> {
    scenario
        .facets()
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let mut weights: BTreeMap<usize, Rational> = BTreeMap::new();
            for (w, m) in terms {
                for (&rank, p) in &m.dists[k].weights {
                    *weights.entry(rank).or_insert_with(Rational::zero) += w * p;
                }
            }
            weights.retain(|_, w| !w.is_zero());
            Distribution {
                context: f.clone(),
                weights,
            }
        })
        .collect()
}

/// A possibilistic model: one non-empty support set per facet, agreeing
/// on overlaps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PossibilisticModel {
    scenario: Arc<Scenario>,
    supports: Vec<BTreeSet<usize>>,
}

impl PossibilisticModel {
    pub fn new(scenario: Arc<Scenario>, raw: Vec<(MeasurementSet, Vec<Assignment>)>) -> Result<Self> {
        let mut slots: Vec<Option<BTreeSet<usize>>> = vec![None; scenario.facets().len()];
        for (context, entries) in raw {
            let Some(k) = scenario.facets().iter().position(|f| *f == context) else {
                return Err(Error::UnexpectedContext(scenario.label(&context)));
            };
            let space = scenario.events(&context);
            let mut set = BTreeSet::new();
            for a in entries {
                if a.domain != context {
                    return Err(Error::Internal("support entry over the wrong context".into()));
                }
                set.insert(space.rank_of(&a));
            }
            slots[k] = Some(set);
        }
        let supports = slots
            .into_iter()
            .enumerate()
            .map(|(k, s)| s.ok_or_else(|| Error::MissingFacet(scenario.label(&scenario.facets()[k]))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_supports(scenario, supports)
    }

    /// Validates facet-aligned rank sets.
    pub fn from_supports(scenario: Arc<Scenario>, supports: Vec<BTreeSet<usize>>) -> Result<Self> {
        if supports.len() != scenario.facets().len() {
            return Err(Error::Internal("wrong number of facet supports".into()));
        }
        for (s, f) in supports.iter().zip(scenario.facets()) {
            if s.is_empty() {
                return Err(Error::EmptySupport(scenario.label(f)));
            }
            let size = scenario.events(f).size();
            if s.iter().any(|&r| r >= size) {
                return Err(Error::Internal("support rank out of range".into()));
            }
        }
        let model = PossibilisticModel { scenario, supports };
        let facets = model.scenario.facets();
        for i in 0..facets.len() {
            for j in (i + 1)..facets.len() {
                let overlap = intersection(&facets[i], &facets[j]);
                if model.project(i, &overlap) != model.project(j, &overlap) {
                    return Err(Error::IncompatibleMarginals {
                        first: model.scenario.label(&facets[i]),
                        second: model.scenario.label(&facets[j]),
                        overlap: model.scenario.label(&overlap),
                    });
                }
            }
        }
        Ok(model)
    }

    /// The model with every joint outcome possible.
    pub fn full(scenario: Arc<Scenario>) -> Self {
        let supports = scenario
            .facets()
            .iter()
            .map(|f| (0..scenario.events(f).size()).collect())
            .collect();
        PossibilisticModel { scenario, supports }
    }

    pub fn deterministic(scenario: Arc<Scenario>, global: &Assignment) -> Result<Self> {
        Ok(EmpiricalModel::deterministic(scenario, global)?.collapse())
    }

    pub(crate) fn from_supports_unchecked(scenario: Arc<Scenario>, supports: Vec<BTreeSet<usize>>) -> Self {
        PossibilisticModel { scenario, supports }
    }

    fn project(&self, facet: usize, sub: &[usize]) -> BTreeSet<usize> {
        let space = self.scenario.events(&self.scenario.facets()[facet]);
        let proj = space.projection(sub).expect("sub-context of facet");
        self.supports[facet].iter().map(|&r| proj.apply(r)).collect()
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    /// Facet-aligned support sets of ranks.
    pub fn supports(&self) -> &[BTreeSet<usize>] {
        &self.supports
    }

    /// Support at an arbitrary context, as ranks of `Ev(context)`.
    pub fn support_at(&self, context: &[usize]) -> Result<BTreeSet<usize>> {
        let k = self
            .scenario
            .facet_containing(context)
            .ok_or_else(|| Error::NotAContext(self.scenario.label(context)))?;
        Ok(self.project(k, context))
    }

    /// Facetwise union.
    pub fn join(models: &[&PossibilisticModel]) -> Result<Self> {
        let first = models.first().ok_or(Error::EmptyMixture)?;
        let mut supports = first.supports.clone();
        for m in &models[1..] {
            if *m.scenario != *first.scenario {
                return Err(Error::ScenarioMismatch);
            }
            for (acc, s) in supports.iter_mut().zip(&m.supports) {
                acc.extend(s.iter().copied());
            }
        }
        Ok(PossibilisticModel {
            scenario: first.scenario.clone(),
            supports,
        })
    }

    /// Facetwise inclusion `self ≤ other`.
    pub fn leq(&self, other: &PossibilisticModel) -> Result<bool> {
        if *self.scenario != *other.scenario {
            return Err(Error::ScenarioMismatch);
        }
        Ok(self.supports.iter().zip(&other.supports).all(|(a, b)| a.is_subset(b)))
    }
}
