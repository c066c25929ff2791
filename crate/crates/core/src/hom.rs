//! The hom-scenario `[S,T]`.
//!
//! `[S,T]` has the measurements and contexts of `T`; an outcome at `x` is a
//! pair `⟨U, α⟩` with `U ⊆ X_S` and `α: Ev_S(U) → O_{T,x}`. Its predicate
//! `g_{S,T}` accepts a family `⟨U_x, α_x⟩_{x∈σ}` iff `∪U_x` is a context of
//! `S`. Global assignments satisfying `g_{S,T}` are exactly the
//! deterministic procedures `S → T`; non-contextual models satisfying it are
//! exactly the probabilistic ones, which gives a decision procedure for
//! whether a family of models is induced by some procedure.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::contextuality::{check_budget, is_noncontextual, mixture_reproduces};
use crate::error::{Error, Result};
use crate::exactlp::{solve_feasibility, Feasibility, LinearSystem};
use crate::games::{canonical_model_of_predicate, PossibilisticPredicate, Satisfiability};
use crate::model::{Distribution, EmpiricalModel, PossibilisticModel};
use crate::procedure::{enumerate_canonical_procedures, local_tables, DeterministicProcedure, ProbabilisticProcedure};
use crate::rational::Rational;
use crate::scenario::{union, Assignment, Measurement, MeasurementSet, Scenario};

/// Default ceiling on the outcome count of a single hom measurement.
pub const DEFAULT_HOM_BUDGET: u128 = 1_000_000;

/// Global assignment count up to which model constructions on `[S,T]` are
/// cross-checked by the non-contextuality LP.
const LP_RECHECK_LIMIT: u128 = 1 << 12;

/// `⟨U, α⟩` with `α` indexed by rank in `Ev_S(U)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomOutcome {
    pub subset: MeasurementSet,
    pub table: Vec<usize>,
}

impl Ord for HomOutcome {
    fn cmp(&self, other: &Self) -> Ordering {
        self.subset
            .len()
            .cmp(&other.subset.len())
            .then_with(|| self.subset.cmp(&other.subset))
            .then_with(|| self.table.cmp(&other.table))
    }
}

impl PartialOrd for HomOutcome {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical label, e.g. `U=a,b|table=00>0;01>1;10>1;11>0`. Input rows list
/// the outcomes of `U` in measurement order, concatenated when every label
/// involved is a single character and comma-separated otherwise.
pub fn outcome_label(source: &Scenario, target: &Scenario, x: usize, outcome: &HomOutcome) -> String {
    let u = &outcome.subset;
    let compact = u
        .iter()
        .all(|&m| source.outcomes(m).iter().all(|o| o.chars().count() == 1));
    let sep = if compact { "" } else { "," };
    let space = source.events(u);
    let rows: Vec<String> = outcome
        .table
        .iter()
        .enumerate()
        .map(|(r, &o)| {
            let input: Vec<&str> = u
                .iter()
                .zip(space.unrank(r))
                .map(|(&m, v)| source.outcomes(m)[v].as_str())
                .collect();
            format!("{}>{}", input.join(sep), target.outcomes(x)[o])
        })
        .collect();
    format!("U={}|table={}", source.ids_of(u).join(","), rows.join(";"))
}

#[derive(Debug, Clone)]
pub struct HomScenario {
    source: Arc<Scenario>,
    target: Arc<Scenario>,
    base: Arc<Scenario>,
    outcomes: Vec<Vec<HomOutcome>>,
    index: Vec<HashMap<HomOutcome, usize>>,
}

/// Builds `[S,T]`; `budget` bounds the outcome count of each measurement.
pub fn hom_scenario(source: &Arc<Scenario>, target: &Arc<Scenario>, budget: u128) -> Result<HomScenario> {
    let n = source.measurement_count();
    if n >= 64 {
        return Err(Error::BudgetExceeded {
            needed: u128::MAX,
            budget,
        });
    }
    let subsets: Vec<MeasurementSet> = (0u64..(1u64 << n))
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
        .collect();
    let mut outcomes = Vec::with_capacity(target.measurement_count());
    let mut index = Vec::with_capacity(target.measurement_count());
    let mut measurements = Vec::with_capacity(target.measurement_count());
    for x in 0..target.measurement_count() {
        let list: Vec<HomOutcome> = local_tables(source, &subsets, target.outcome_count(x), false, budget)?
            .into_iter()
            .map(|(subset, table)| HomOutcome { subset, table })
            .collect();
        debug_assert!(list.windows(2).all(|w| w[0] < w[1]));
        measurements.push(Measurement {
            id: target.id(x).to_string(),
            outcomes: list.iter().map(|o| outcome_label(source, target, x, o)).collect(),
        });
        index.push(list.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect());
        outcomes.push(list);
    }
    let base = Scenario::from_parts(measurements, target.facets().to_vec())?;
    Ok(HomScenario {
        source: source.clone(),
        target: target.clone(),
        base: Arc::new(base),
        outcomes,
        index,
    })
}

impl HomScenario {
    pub fn source(&self) -> &Arc<Scenario> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Scenario> {
        &self.target
    }

    /// `[S,T]` as a plain scenario.
    pub fn base(&self) -> &Arc<Scenario> {
        &self.base
    }

    pub fn outcomes(&self, x: usize) -> &[HomOutcome] {
        &self.outcomes[x]
    }

    pub fn outcome_index(&self, x: usize, outcome: &HomOutcome) -> Option<usize> {
        self.index[x].get(outcome).copied()
    }

    fn require_index(&self, x: usize, outcome: &HomOutcome) -> Result<usize> {
        self.outcome_index(x, outcome)
            .ok_or_else(|| Error::Internal(format!("outcome missing from hom measurement `{}`", self.target.id(x))))
    }

    /// `g_{S,T}` on one joint outcome of `σ` (outcome positions in `σ`'s
    /// order): the queried measurements form a context of `S`.
    pub fn accepts(&self, sigma: &[usize], values: &[usize]) -> bool {
        let used = sigma
            .iter()
            .zip(values)
            .fold(Vec::new(), |acc, (&x, &v)| union(&acc, &self.outcomes[x][v].subset));
        self.source.contains_face(&used)
    }

    /// Whether `δ_s` satisfies `g_{S,T}`.
    pub fn accepts_global(&self, s: &Assignment) -> bool {
        self.base.facets().iter().all(|sigma| {
            let local = s.restrict(sigma).expect("facet within X");
            self.accepts(sigma, &local.values)
        })
    }

    /// Materialises `g_{S,T}`; `budget` bounds `|Ev(σ)|` per facet.
    pub fn predicate(&self, budget: u128) -> Result<PossibilisticPredicate> {
        let components = self
            .base
            .facets()
            .iter()
            .map(|sigma| {
                check_budget(self.base.event_count(sigma), budget)?;
                let space = self.base.events(sigma);
                let accept = space
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| self.accepts(sigma, v))
                    .map(|(r, _)| r)
                    .collect();
                Ok((sigma.clone(), accept))
            })
            .collect::<Result<Vec<_>>>()?;
        PossibilisticPredicate::new(self.base.clone(), components)
    }

    fn check_endpoints(&self, f: &DeterministicProcedure) -> Result<()> {
        if **f.source() != *self.source || **f.target() != *self.target {
            return Err(Error::ScenarioMismatch);
        }
        Ok(())
    }

    /// The global assignment `x ↦ ⟨π(x), α_x⟩`.
    pub fn procedure_to_assignment(&self, f: &DeterministicProcedure) -> Result<Assignment> {
        self.check_endpoints(f)?;
        let values = (0..self.target.measurement_count())
            .map(|x| {
                self.require_index(
                    x,
                    &HomOutcome {
                        subset: f.pi(x).to_vec(),
                        table: f.alpha(x).to_vec(),
                    },
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Assignment {
            domain: self.base.all_measurements(),
            values,
        })
    }

    /// Inverse of [`Self::procedure_to_assignment`]; fails with
    /// `NotSimplicial` exactly when `δ_s` violates `g_{S,T}`.
    pub fn assignment_to_procedure(&self, s: &Assignment) -> Result<DeterministicProcedure> {
        if s.domain != self.base.all_measurements() {
            return Err(Error::NotGlobal(self.base.ids_of(&s.domain)));
        }
        let (pi, alpha) = s
            .values
            .iter()
            .enumerate()
            .map(|(x, &v)| {
                let o = &self.outcomes[x][v];
                (o.subset.clone(), o.table.clone())
            })
            .unzip();
        DeterministicProcedure::new(self.source.clone(), self.target.clone(), pi, alpha)
    }

    /// `Σ r_i δ_{s_i}` for `f = Σ r_i f_i`; re-checks `g_{S,T}` on the
    /// support and, on small hom-scenarios, non-contextuality by LP.
    pub fn procedure_to_model(&self, f: &ProbabilisticProcedure) -> Result<EmpiricalModel> {
        let mut weights: BTreeMap<Assignment, Rational> = BTreeMap::new();
        for (w, g) in f.components() {
            *weights
                .entry(self.procedure_to_assignment(g)?)
                .or_insert_with(Rational::zero) += w;
        }
        let deltas = weights
            .keys()
            .map(|s| EmpiricalModel::deterministic(self.base.clone(), s))
            .collect::<Result<Vec<_>>>()?;
        let terms: Vec<(Rational, &EmpiricalModel)> = weights.values().cloned().zip(deltas.iter()).collect();
        let model = EmpiricalModel::convex_combine(&terms)?;
        for (sigma, d) in self.base.facets().iter().zip(model.distributions()) {
            let space = self.base.events(sigma);
            if d.weights.keys().any(|&r| !self.accepts(sigma, &space.unrank(r))) {
                return Err(Error::Internal("procedure model violates g_{S,T}".into()));
            }
        }
        if !mixture_reproduces(&model, &weights)? {
            return Err(Error::Internal(
                "procedure model is not the mixture of its deltas".into(),
            ));
        }
        let all = self.base.all_measurements();
        if self.base.event_count(&all) <= LP_RECHECK_LIMIT
            && is_noncontextual(&model, LP_RECHECK_LIMIT)?.is_contextual()
        {
            return Err(Error::Internal("procedure model is contextual".into()));
        }
        Ok(model)
    }
}

/// A function from global assignments of `S` to models on `T`; by convexity
/// it determines a unique function on all models of `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizabilityQuery {
    source: Arc<Scenario>,
    target: Arc<Scenario>,
    table: Vec<EmpiricalModel>,
}

impl RealizabilityQuery {
    /// Every global assignment of the source must appear exactly once.
    pub fn new(
        source: Arc<Scenario>,
        target: Arc<Scenario>,
        entries: Vec<(Assignment, EmpiricalModel)>,
        budget: u128,
    ) -> Result<Self> {
        let all = source.all_measurements();
        check_budget(source.event_count(&all), budget)?;
        let space = source.events(&all);
        let mut table: Vec<Option<EmpiricalModel>> = vec![None; space.size()];
        for (s, e) in entries {
            if s.domain != all {
                return Err(Error::NotGlobal(source.ids_of(&s.domain)));
            }
            if **e.scenario() != *target {
                return Err(Error::ScenarioMismatch);
            }
            let slot = &mut table[space.rank_of(&s)];
            if slot.is_some() {
                return Err(Error::IncompleteQuery(format!(
                    "duplicate entry for {}",
                    source.render(&s)
                )));
            }
            *slot = Some(e);
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(r, e)| {
                e.ok_or_else(|| {
                    Error::IncompleteQuery(format!("no entry for {}", source.render(&space.assignment_at(r))))
                })
            })
            .collect::<Result<_>>()?;
        Ok(RealizabilityQuery { source, target, table })
    }

    /// `F(s) = EMP(f)δ_s`.
    pub fn tabulate(f: &ProbabilisticProcedure, budget: u128) -> Result<Self> {
        let source = f.source().clone();
        let all = source.all_measurements();
        check_budget(source.event_count(&all), budget)?;
        let table = source
            .events(&all)
            .iter()
            .map(|v| {
                let s = source.events(&all).assignment(v);
                f.pushforward(&EmpiricalModel::deterministic(source.clone(), &s)?)
            })
            .collect::<Result<_>>()?;
        Ok(RealizabilityQuery {
            source,
            target: f.target().clone(),
            table,
        })
    }

    /// `F(s) = e` for every `s`.
    pub fn constant(source: Arc<Scenario>, e: &EmpiricalModel, budget: u128) -> Result<Self> {
        let all = source.all_measurements();
        check_budget(source.event_count(&all), budget)?;
        let table = vec![e.clone(); source.events(&all).size()];
        Ok(RealizabilityQuery {
            source,
            target: e.scenario().clone(),
            table,
        })
    }

    pub fn source(&self) -> &Arc<Scenario> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Scenario> {
        &self.target
    }

    /// `(s, F(s))` in rank order of `s`.
    pub fn entries(&self) -> Vec<(Assignment, &EmpiricalModel)> {
        let all = self.source.all_measurements();
        let space = self.source.events(&all);
        self.table
            .iter()
            .enumerate()
            .map(|(r, e)| (space.assignment_at(r), e))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realizability {
    /// A procedure inducing the query, re-verified on every `δ_s`.
    Realizable(ProbabilisticProcedure),
    NotRealizable,
}

impl Realizability {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Realizability::Realizable(_))
    }
}

fn witness_from(procs: &[DeterministicProcedure], point: &[Rational]) -> Result<ProbabilisticProcedure> {
    let components = procs
        .iter()
        .zip(point)
        .filter(|(_, w)| !w.is_zero())
        .map(|(f, w)| (w.clone(), f.clone()))
        .collect();
    ProbabilisticProcedure::new(components)
}

/// Exact LP over canonical deterministic procedures: weights `w_f ≥ 0`,
/// `Σ w_f = 1`, and for every `s`, facet `σ` of `T` and `t ∈ Ev(σ)`,
/// `Σ_{f: α_{f,σ}(s) = t} w_f = F(s)_σ(t)`.
pub fn realizable(query: &RealizabilityQuery, budget: u128) -> Result<Realizability> {
    let (source, target) = (&query.source, &query.target);
    let procs = enumerate_canonical_procedures(source, target, budget)?;
    let all = source.all_measurements();
    let globals: Vec<Vec<usize>> = source.events(&all).iter().collect();
    let facets = target.facets();
    let spaces: Vec<_> = facets.iter().map(|f| target.events(f)).collect();
    let mut offsets = Vec::with_capacity(facets.len());
    let mut block = 0usize;
    for space in &spaces {
        offsets.push(block);
        block += space.size();
    }
    let n_rows = globals.len() * block;
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n_rows];
    for (j, f) in procs.iter().enumerate() {
        for (si, s) in globals.iter().enumerate() {
            let t = f.apply_global(s);
            for (k, sigma) in facets.iter().enumerate() {
                let local: Vec<usize> = sigma.iter().map(|&x| t[x]).collect();
                rows[si * block + offsets[k] + spaces[k].rank(&local)].push((j, Rational::one()));
            }
        }
    }
    let mut system = LinearSystem::new(procs.len());
    for (row, coeffs) in rows.into_iter().enumerate() {
        let (si, rest) = (row / block, row % block);
        let k = offsets.iter().rposition(|&o| o <= rest).expect("offset 0 exists");
        system.add_equality(coeffs, query.table[si].distributions()[k].weight(rest - offsets[k]));
    }
    system.add_equality(
        (0..procs.len()).map(|j| (j, Rational::one())).collect(),
        Rational::one(),
    );
    match solve_feasibility(&system)? {
        Feasibility::Infeasible => Ok(Realizability::NotRealizable),
        Feasibility::Feasible(point) => {
            let witness = witness_from(&procs, &point)?;
            for (s, expected) in query.entries() {
                let delta = EmpiricalModel::deterministic(source.clone(), &s)?;
                if witness.pushforward(&delta)?.distributions() != expected.distributions() {
                    return Err(Error::Internal(
                        "realizability witness does not reproduce the query".into(),
                    ));
                }
            }
            Ok(Realizability::Realizable(witness))
        }
    }
}

/// A probabilistic procedure `f` with `EMP(f)e = d`, if any: exact LP over
/// canonical procedures with one row per facet `σ` of `T` and `t ∈ Ev(σ)`.
pub fn find_simulation(e: &EmpiricalModel, d: &EmpiricalModel, budget: u128) -> Result<Option<ProbabilisticProcedure>> {
    let (source, target) = (e.scenario(), d.scenario());
    let procs = enumerate_canonical_procedures(source, target, budget)?;
    let mut marginals: HashMap<MeasurementSet, Distribution> = HashMap::new();
    for face in source.faces() {
        let m = e.marginal(&face)?;
        marginals.insert(face, m);
    }
    let facets = target.facets();
    let spaces: Vec<_> = facets.iter().map(|f| target.events(f)).collect();
    let mut offsets = Vec::with_capacity(facets.len());
    let mut block = 0usize;
    for space in &spaces {
        offsets.push(block);
        block += space.size();
    }
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); block];
    for (j, f) in procs.iter().enumerate() {
        for (k, sigma) in facets.iter().enumerate() {
            let local = &marginals[&f.image(sigma)];
            let table = f.alpha_sigma(sigma);
            let mut pushed: BTreeMap<usize, Rational> = BTreeMap::new();
            for (&r, w) in &local.weights {
                *pushed.entry(table[r]).or_insert_with(Rational::zero) += w;
            }
            for (t, w) in pushed {
                rows[offsets[k] + t].push((j, w));
            }
        }
    }
    let mut system = LinearSystem::new(procs.len());
    for (row, coeffs) in rows.into_iter().enumerate() {
        let k = offsets.iter().rposition(|&o| o <= row).expect("offset 0 exists");
        system.add_equality(coeffs, d.distributions()[k].weight(row - offsets[k]));
    }
    system.add_equality(
        (0..procs.len()).map(|j| (j, Rational::one())).collect(),
        Rational::one(),
    );
    match solve_feasibility(&system)? {
        Feasibility::Infeasible => Ok(None),
        Feasibility::Feasible(point) => {
            let witness = witness_from(&procs, &point)?;
            if witness.pushforward(e)?.distributions() != d.distributions() {
                return Err(Error::Internal(
                    "simulation witness does not reproduce the target".into(),
                ));
            }
            Ok(Some(witness))
        }
    }
}

/// Contextuality decided as non-simulability from the empty scenario.
pub fn contextual_via_realizability(e: &EmpiricalModel, budget: u128) -> Result<bool> {
    let zero = Arc::new(Scenario::zero());
    let query = RealizabilityQuery::constant(zero, e, budget)?;
    Ok(!realizable(&query, budget)?.is_realizable())
}

/// A scenario with a satisfiable structure predicate, stored as its
/// canonical (greatest satisfying) possibilistic model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioWithPredicate {
    model: PossibilisticModel,
}

impl ScenarioWithPredicate {
    /// The trivial predicate (everything possible).
    pub fn trivial(scenario: Arc<Scenario>) -> Self {
        ScenarioWithPredicate {
            model: PossibilisticModel::full(scenario),
        }
    }

    pub fn from_predicate(predicate: &PossibilisticPredicate, budget: u128) -> Result<Self> {
        match canonical_model_of_predicate(predicate, budget)? {
            Satisfiability::Satisfiable(model) => Ok(ScenarioWithPredicate { model }),
            Satisfiability::Unsatisfiable => Err(Error::UnsatisfiablePredicate),
        }
    }

    /// `⟨S, g(e)⟩`.
    pub fn from_model(model: PossibilisticModel) -> Self {
        ScenarioWithPredicate { model }
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        self.model.scenario()
    }

    pub fn model(&self) -> &PossibilisticModel {
        &self.model
    }

    pub fn predicate(&self) -> PossibilisticPredicate {
        PossibilisticPredicate::from_model(&self.model)
    }
}

/// Whether `f` is a morphism `⟨S,g⟩ → ⟨T,h⟩`: `EMP_B(f)e_g ≤ e_h`.
pub fn respects(f: &DeterministicProcedure, from: &ScenarioWithPredicate, to: &ScenarioWithPredicate) -> Result<bool> {
    f.pushforward_possibilistic(&from.model)?.leq(&to.model)
}

/// `[⟨S,g⟩,⟨T,h⟩]`: at each facet `σ` of `T`, a family `⟨U_x, α_x⟩` is
/// accepted iff `U = ∪U_x` is a context of `S` and every `s` in `g`'s
/// support at `U` is sent into `h`'s support at `σ`.
pub fn hom_with_predicates(
    from: &ScenarioWithPredicate,
    to: &ScenarioWithPredicate,
    budget: u128,
) -> Result<(HomScenario, ScenarioWithPredicate)> {
    let hom = hom_scenario(from.scenario(), to.scenario(), budget)?;
    let (source, target) = (&hom.source, &hom.target);
    let components = hom
        .base
        .facets()
        .iter()
        .enumerate()
        .map(|(k, sigma)| {
            check_budget(hom.base.event_count(sigma), budget)?;
            let out_space = target.events(sigma);
            let allowed = &to.model.supports()[k];
            let accept = hom
                .base
                .events(sigma)
                .iter()
                .enumerate()
                .filter(|(_, values)| {
                    let parts: Vec<&HomOutcome> =
                        sigma.iter().zip(values).map(|(&x, &v)| &hom.outcomes[x][v]).collect();
                    let used = parts.iter().fold(Vec::new(), |acc, o| union(&acc, &o.subset));
                    if !source.contains_face(&used) {
                        return false;
                    }
                    let space = source.events(&used);
                    let projections: Vec<_> = parts
                        .iter()
                        .map(|o| space.projection(&o.subset).expect("U_x ⊆ U"))
                        .collect();
                    from.model
                        .support_at(&used)
                        .expect("used set is a face")
                        .into_iter()
                        .all(|r| {
                            let t: Vec<usize> = parts
                                .iter()
                                .zip(&projections)
                                .map(|(o, p)| o.table[p.apply(r)])
                                .collect();
                            allowed.contains(&out_space.rank(&t))
                        })
                })
                .map(|(r, _)| r)
                .collect();
            Ok((sigma.clone(), accept))
        })
        .collect::<Result<Vec<_>>>()?;
    let predicate = PossibilisticPredicate::new(hom.base.clone(), components)?;
    let structure = ScenarioWithPredicate::from_predicate(&predicate, budget)?;
    Ok((hom, structure))
}

fn zero_arc() -> Arc<Scenario> {
    Arc::new(Scenario::zero())
}

/// `i_S: S → [0,S]`, `o ↦ ⟨∅, const o⟩`.
pub fn unit_iso(zero_s: &HomScenario) -> Result<DeterministicProcedure> {
    if zero_s.source.measurement_count() != 0 {
        return Err(Error::ScenarioMismatch);
    }
    let s = &zero_s.target;
    let pi = (0..s.measurement_count()).map(|x| vec![x]).collect();
    let alpha = (0..s.measurement_count())
        .map(|x| {
            (0..s.outcome_count(x))
                .map(|o| {
                    zero_s.require_index(
                        x,
                        &HomOutcome {
                            subset: vec![],
                            table: vec![o],
                        },
                    )
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    DeterministicProcedure::new(s.clone(), zero_s.base.clone(), pi, alpha)
}

/// `j_S: 0 → [S,S]`, naming the identity: `x ↦ ⟨{x}, id⟩`.
pub fn identity_name(s_s: &HomScenario) -> Result<DeterministicProcedure> {
    if *s_s.source != *s_s.target {
        return Err(Error::ScenarioMismatch);
    }
    name(&DeterministicProcedure::identity(s_s.source.clone()), s_s)
}

/// `name(f): 0 → [S,T]`, `x ↦ ⟨π_f(x), α_{f,x}⟩`.
pub fn name(f: &DeterministicProcedure, s_t: &HomScenario) -> Result<DeterministicProcedure> {
    let s = s_t.procedure_to_assignment(f)?;
    let n = s_t.target.measurement_count();
    DeterministicProcedure::new(
        zero_arc(),
        s_t.base.clone(),
        vec![Vec::new(); n],
        s.values.into_iter().map(|v| vec![v]).collect(),
    )
}

/// Inverse of [`name`].
pub fn unname(p: &DeterministicProcedure, s_t: &HomScenario) -> Result<DeterministicProcedure> {
    if p.source().measurement_count() != 0 || **p.target() != *s_t.base {
        return Err(Error::ScenarioMismatch);
    }
    let values = (0..s_t.target.measurement_count()).map(|x| p.alpha(x)[0]).collect();
    s_t.assignment_to_procedure(&Assignment {
        domain: s_t.base.all_measurements(),
        values,
    })
}

/// `L: [S,T] → [[P,S],[P,T]]`, internal composition. `π` is the identity;
/// `⟨U, k⟩ ↦ ⟨U, k̃⟩` with `k̃(⟨V_y, m_y⟩_{y∈U}) = ⟨∪V_y, k ∘ ⟨m_y ∘ ρ_y⟩⟩`.
pub fn composition(
    s_t: &HomScenario,
    p_s: &HomScenario,
    p_t: &HomScenario,
    outer: &HomScenario,
) -> Result<DeterministicProcedure> {
    if *p_s.source != *p_t.source
        || *p_s.target != *s_t.source
        || *p_t.target != *s_t.target
        || *outer.source != *p_s.base
        || *outer.target != *p_t.base
    {
        return Err(Error::ScenarioMismatch);
    }
    let (p, s) = (&p_s.source, &s_t.source);
    let n = s_t.target.measurement_count();
    let mut alpha = Vec::with_capacity(n);
    for x in 0..n {
        let mut table = Vec::with_capacity(s_t.outcomes[x].len());
        for o in &s_t.outcomes[x] {
            let u = &o.subset;
            let u_space = s.events(u);
            let families = p_s.base.events(u);
            let mut k_tilde = Vec::with_capacity(families.size());
            for family in families.iter() {
                let parts: Vec<&HomOutcome> = u.iter().zip(&family).map(|(&y, &v)| &p_s.outcomes[y][v]).collect();
                let w = parts.iter().fold(Vec::new(), |acc, m| union(&acc, &m.subset));
                let w_space = p.events(&w);
                let projections: Vec<_> = parts
                    .iter()
                    .map(|m| w_space.projection(&m.subset).expect("V_y ⊆ W"))
                    .collect();
                let inner = (0..w_space.size())
                    .map(|q| {
                        let vals: Vec<usize> = parts
                            .iter()
                            .zip(&projections)
                            .map(|(m, pr)| m.table[pr.apply(q)])
                            .collect();
                        o.table[u_space.rank(&vals)]
                    })
                    .collect();
                k_tilde.push(p_t.require_index(
                    x,
                    &HomOutcome {
                        subset: w,
                        table: inner,
                    },
                )?);
            }
            table.push(outer.require_index(
                x,
                &HomOutcome {
                    subset: u.clone(),
                    table: k_tilde,
                },
            )?);
        }
        alpha.push(table);
    }
    DeterministicProcedure::new(
        s_t.base.clone(),
        outer.base.clone(),
        (0..n).map(|x| vec![x]).collect(),
        alpha,
    )
}

/// `[id,f]: [A,B] → [A,C]` for `f: B → C`: `π = π_f`,
/// `⟨U_y, k_y⟩_{y∈π_f(x)} ↦ ⟨∪U_y, α_{f,x} ∘ ⟨k_y ∘ ρ_y⟩⟩`.
pub fn hom_post(f: &DeterministicProcedure, a_b: &HomScenario, a_c: &HomScenario) -> Result<DeterministicProcedure> {
    if *a_b.source != *a_c.source || *a_b.target != **f.source() || *a_c.target != **f.target() {
        return Err(Error::ScenarioMismatch);
    }
    let (a, b) = (&a_b.source, &a_b.target);
    let n = a_c.target.measurement_count();
    let mut alpha = Vec::with_capacity(n);
    for x in 0..n {
        let ys = f.pi(x);
        let y_space = b.events(ys);
        let families = a_b.base.events(ys);
        let mut table = Vec::with_capacity(families.size());
        for family in families.iter() {
            let parts: Vec<&HomOutcome> = ys.iter().zip(&family).map(|(&y, &v)| &a_b.outcomes[y][v]).collect();
            let w = parts.iter().fold(Vec::new(), |acc, m| union(&acc, &m.subset));
            let w_space = a.events(&w);
            let projections: Vec<_> = parts
                .iter()
                .map(|m| w_space.projection(&m.subset).expect("U_y ⊆ W"))
                .collect();
            let composed = (0..w_space.size())
                .map(|q| {
                    let vals: Vec<usize> = parts
                        .iter()
                        .zip(&projections)
                        .map(|(m, pr)| m.table[pr.apply(q)])
                        .collect();
                    f.alpha(x)[y_space.rank(&vals)]
                })
                .collect();
            table.push(a_c.require_index(
                x,
                &HomOutcome {
                    subset: w,
                    table: composed,
                },
            )?);
        }
        alpha.push(table);
    }
    DeterministicProcedure::new(a_b.base.clone(), a_c.base.clone(), f.pis().to_vec(), alpha)
}

/// `[f,id]: [B,C] → [A,C]` for `f: A → B`: `π` is the identity,
/// `⟨U, k⟩ ↦ ⟨π_f(U), k ∘ α_{f,U}⟩`.
pub fn hom_pre(f: &DeterministicProcedure, b_c: &HomScenario, a_c: &HomScenario) -> Result<DeterministicProcedure> {
    if *b_c.target != *a_c.target || *b_c.source != **f.target() || *a_c.source != **f.source() {
        return Err(Error::ScenarioMismatch);
    }
    let n = a_c.target.measurement_count();
    let mut alpha = Vec::with_capacity(n);
    for x in 0..n {
        let table = b_c.outcomes[x]
            .iter()
            .map(|o| {
                let through = f.alpha_sigma(&o.subset);
                a_c.require_index(
                    x,
                    &HomOutcome {
                        subset: f.image(&o.subset),
                        table: through.iter().map(|&r| o.table[r]).collect(),
                    },
                )
            })
            .collect::<Result<Vec<_>>>()?;
        alpha.push(table);
    }
    DeterministicProcedure::new(
        b_c.base.clone(),
        a_c.base.clone(),
        (0..n).map(|x| vec![x]).collect(),
        alpha,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::contextuality::DEFAULT_BUDGET;
    use crate::procedure::enumerate_all_procedures;
    use crate::rational::ratio;

    fn arc(s: Scenario) -> Arc<Scenario> {
        Arc::new(s)
    }

    fn d2() -> Arc<Scenario> {
        arc(Scenario::dice(2).unwrap())
    }

    #[test]
    fn hom_dice_dice() {
        let h = hom_scenario(&d2(), &d2(), DEFAULT_HOM_BUDGET).unwrap();
        let labels: Vec<&str> = h.base().outcomes(0).iter().map(String::as_str).collect();
        assert_eq!(
            labels,
            [
                "U=|table=>0",
                "U=|table=>1",
                "U=*|table=0>0;1>0",
                "U=*|table=0>0;1>1",
                "U=*|table=0>1;1>0",
                "U=*|table=0>1;1>1",
            ]
        );
    }

    #[test]
    fn hom_from_zero_is_target() {
        let sq = arc(catalog::square());
        let h = hom_scenario(&arc(Scenario::zero()), &sq, DEFAULT_HOM_BUDGET).unwrap();
        for x in 0..4 {
            assert_eq!(h.outcomes(x).len(), 2);
        }
        assert_eq!(h.base().facets(), sq.facets());
        let i = unit_iso(&h).unwrap();
        assert_eq!(i.source(), &sq);
    }

    #[test]
    fn hom_triangle_square_shape() {
        let tri = arc(catalog::triangle());
        let sq = arc(catalog::square());
        let h = hom_scenario(&tri, &sq, DEFAULT_HOM_BUDGET).unwrap();
        assert_eq!(h.base().measurement_count(), 4);
        assert_eq!(h.base().facets(), sq.facets());
        assert_eq!(h.outcomes(0).len(), 318);
        let f = catalog::triangle_to_square();
        let s = h.procedure_to_assignment(&f).unwrap();
        assert!(h.accepts_global(&s));
        assert_eq!(h.assignment_to_procedure(&s).unwrap(), f);
    }

    #[test]
    fn non_simplicial_assignment_is_rejected() {
        let sq = arc(catalog::square());
        let tri = arc(catalog::triangle());
        let h = hom_scenario(&sq, &tri, 100_000).unwrap();
        let sammy = sq.index_of("SammyA").unwrap();
        let johnny = sq.index_of("JohnnyB").unwrap();
        let pick = |m: usize| {
            h.outcome_index(
                0,
                &HomOutcome {
                    subset: vec![m],
                    table: vec![0, 1],
                },
            )
            .unwrap()
        };
        // grub ↦ SammyA, pint ↦ SammyA, wine ↦ JohnnyB: {pint,wine} breaks.
        let s = Assignment {
            domain: vec![0, 1, 2],
            values: vec![pick(sammy), pick(sammy), pick(johnny)],
        };
        assert!(!h.accepts_global(&s));
        assert!(matches!(
            h.assignment_to_procedure(&s),
            Err(Error::NotSimplicial { .. })
        ));
    }

    #[test]
    fn bijection_dice() {
        let h = hom_scenario(&d2(), &d2(), DEFAULT_HOM_BUDGET).unwrap();
        let procs = enumerate_all_procedures(&d2(), &d2(), DEFAULT_BUDGET).unwrap();
        assert_eq!(procs.len(), 6);
        for f in &procs {
            let s = h.procedure_to_assignment(f).unwrap();
            assert_eq!(&h.assignment_to_procedure(&s).unwrap(), f);
        }
    }

    #[test]
    fn procedure_models() {
        let tri = arc(catalog::triangle());
        let h = hom_scenario(&tri, &d2(), DEFAULT_HOM_BUDGET).unwrap();
        let procs = enumerate_canonical_procedures(&tri, &d2(), DEFAULT_BUDGET).unwrap();
        let mix = ProbabilisticProcedure::new(vec![(ratio(1, 3), procs[3].clone()), (ratio(2, 3), procs[20].clone())])
            .unwrap();
        let m = h.procedure_to_model(&mix).unwrap();
        assert!(!is_noncontextual(&m, DEFAULT_BUDGET).unwrap().is_contextual());
        let single = h
            .procedure_to_model(&ProbabilisticProcedure::deterministic(procs[5].clone()))
            .unwrap();
        let s = h.procedure_to_assignment(&procs[5]).unwrap();
        assert_eq!(single, EmpiricalModel::deterministic(h.base().clone(), &s).unwrap());
    }

    #[test]
    fn realizability_basics() {
        let tri = arc(catalog::triangle());
        let procs = enumerate_canonical_procedures(&tri, &d2(), DEFAULT_BUDGET).unwrap();
        let f = ProbabilisticProcedure::new(vec![(ratio(1, 4), procs[7].clone()), (ratio(3, 4), procs[30].clone())])
            .unwrap();
        let q = RealizabilityQuery::tabulate(&f, DEFAULT_BUDGET).unwrap();
        let Realizability::Realizable(w) = realizable(&q, DEFAULT_BUDGET).unwrap() else {
            panic!("tabulated query must be realizable");
        };
        for (s, expected) in q.entries() {
            let delta = EmpiricalModel::deterministic(tri.clone(), &s).unwrap();
            assert_eq!(&w.pushforward(&delta).unwrap(), expected);
        }

        let zero = arc(Scenario::zero());
        let q = RealizabilityQuery::constant(zero.clone(), &catalog::pr_model(), DEFAULT_BUDGET).unwrap();
        assert_eq!(realizable(&q, DEFAULT_BUDGET).unwrap(), Realizability::NotRealizable);

        let sq = arc(catalog::square());
        let all = sq.events(&sq.all_measurements());
        let deltas: Vec<EmpiricalModel> = (0..16)
            .map(|r| EmpiricalModel::deterministic(sq.clone(), &all.assignment_at(r)).unwrap())
            .collect();
        let terms: Vec<(Rational, &EmpiricalModel)> = deltas.iter().map(|d| (ratio(1, 16), d)).collect();
        let uniform = EmpiricalModel::convex_combine(&terms).unwrap();
        let q = RealizabilityQuery::constant(zero, &uniform, DEFAULT_BUDGET).unwrap();
        assert!(realizable(&q, DEFAULT_BUDGET).unwrap().is_realizable());
    }

    #[test]
    fn contextuality_through_realizability() {
        assert!(contextual_via_realizability(&catalog::chsh_model(), DEFAULT_BUDGET).unwrap());
        assert!(!contextual_via_realizability(&catalog::chsh_model_all_correlated(), DEFAULT_BUDGET).unwrap());
        let sq = arc(catalog::square());
        let s = sq.events(&sq.all_measurements()).assignment_at(6);
        let delta = EmpiricalModel::deterministic(sq, &s).unwrap();
        assert!(!contextual_via_realizability(&delta, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn simulation_search() {
        let found = find_simulation(&catalog::triangle_model(), &catalog::pr_model(), DEFAULT_BUDGET).unwrap();
        let witness = found.expect("triangle simulates PR");
        assert_eq!(
            witness.pushforward(&catalog::triangle_model()).unwrap(),
            catalog::pr_model()
        );
    }

    #[test]
    fn predicated_hom_trivial_reduces_to_g() {
        let tri = arc(catalog::triangle());
        let (hom, structure) = hom_with_predicates(
            &ScenarioWithPredicate::trivial(tri.clone()),
            &ScenarioWithPredicate::trivial(d2()),
            DEFAULT_HOM_BUDGET,
        )
        .unwrap();
        let g = hom.predicate(DEFAULT_HOM_BUDGET).unwrap();
        assert_eq!(structure.model().supports()[0], g.components()[0].1);
    }

    #[test]
    fn predicated_hom_triangle_square() {
        let tri = ScenarioWithPredicate::from_model(catalog::triangle_model().collapse());
        let sq = ScenarioWithPredicate::from_model(catalog::pr_model().collapse());
        let (hom, structure) = hom_with_predicates(&tri, &sq, DEFAULT_HOM_BUDGET).unwrap();
        let f = catalog::triangle_to_square();
        let s = hom.procedure_to_assignment(&f).unwrap();
        let delta = PossibilisticModel::deterministic(hom.base().clone(), &s).unwrap();
        assert!(crate::games::satisfies(&delta, &structure.predicate()).unwrap());
        assert!(respects(&f, &tri, &sq).unwrap());
    }

    #[test]
    fn name_round_trip() {
        let tri = arc(catalog::triangle());
        let sq = arc(catalog::square());
        let h = hom_scenario(&tri, &sq, DEFAULT_HOM_BUDGET).unwrap();
        let f = catalog::triangle_to_square();
        assert_eq!(unname(&name(&f, &h).unwrap(), &h).unwrap(), f);
    }

    #[test]
    fn closure_cc1_cc2() {
        let (s, t) = (d2(), d2());
        let s_s = hom_scenario(&s, &s, DEFAULT_HOM_BUDGET).unwrap();
        let t_s = hom_scenario(&t, &s, DEFAULT_HOM_BUDGET).unwrap();
        let outer = hom_scenario(t_s.base(), t_s.base(), DEFAULT_HOM_BUDGET).unwrap();
        assert_eq!(outer.outcomes(0).len(), 46662);
        // CC1: L ∘ j_S = j_{[T,S]}.
        let j = identity_name(&s_s).unwrap();
        let l = composition(&s_s, &t_s, &t_s, &outer).unwrap();
        let lhs = j.then(&l).unwrap().canonicalize();
        let rhs = identity_name(&outer).unwrap().canonicalize();
        assert_eq!(lhs, rhs);

        // CC2: [j,id] ∘ L = i.
        let s_t = hom_scenario(&s, &t, DEFAULT_HOM_BUDGET).unwrap();
        let outer2 = hom_scenario(s_s.base(), s_t.base(), DEFAULT_HOM_BUDGET).unwrap();
        let l2 = composition(&s_t, &s_s, &s_t, &outer2).unwrap();
        let zero_st = hom_scenario(&arc(Scenario::zero()), s_t.base(), DEFAULT_HOM_BUDGET).unwrap();
        let pre = hom_pre(&j, &outer2, &zero_st).unwrap();
        let lhs = l2.then(&pre).unwrap().canonicalize();
        let rhs = unit_iso(&zero_st).unwrap().canonicalize();
        assert_eq!(lhs, rhs);
    }
}
