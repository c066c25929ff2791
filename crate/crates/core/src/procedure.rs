//! Procedures between scenarios and the pushforward of models along them.
//!
//! A deterministic procedure `f: S → T` picks, for every measurement `x` of
//! `T`, a set `π(x)` of measurements of `S` to perform and a lookup table
//! `α_x: Ev_S(π(x)) → O_{T,x}`. Tables are indexed by rank in
//! `Ev_S(π(x))`. Probabilistic procedures are convex mixtures, possibilistic
//! ones Boolean mixtures.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{Distribution, EmpiricalModel, PossibilisticModel};
use crate::rational::Rational;
use crate::scenario::{is_subset, union, EventSpace, MeasurementSet, Scenario};

/// Rows `(input assignment, output)` of one labelled table.
pub type LabelledTable = Vec<(Vec<(String, String)>, String)>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicProcedure {
    source: Arc<Scenario>,
    target: Arc<Scenario>,
    pi: Vec<MeasurementSet>,
    alpha: Vec<Vec<usize>>,
}

impl DeterministicProcedure {
    /// Validates raw position-based data: `pi[x]` and `alpha[x]` for every
    /// measurement `x` of the target.
    pub fn new(
        source: Arc<Scenario>,
        target: Arc<Scenario>,
        pi: Vec<MeasurementSet>,
        alpha: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = target.measurement_count();
        if pi.len() != n || alpha.len() != n {
            let x = pi.len().min(alpha.len()).min(n.saturating_sub(1));
            return Err(Error::IncompleteTable(
                target.measurements().get(x).map(|m| m.id.clone()).unwrap_or_default(),
            ));
        }
        for x in 0..n {
            let set = &pi[x];
            if set.windows(2).any(|w| w[0] >= w[1]) || set.iter().any(|&m| m >= source.measurement_count()) {
                return Err(Error::IncompleteTable(target.id(x).to_string()));
            }
            if alpha[x].len() as u128 != source.event_count(set) {
                return Err(Error::IncompleteTable(target.id(x).to_string()));
            }
            if alpha[x].iter().any(|&o| o >= target.outcome_count(x)) {
                return Err(Error::CodomainViolation(target.id(x).to_string()));
            }
        }
        for facet in target.facets() {
            let image = image_of(&pi, facet);
            if !source.contains_face(&image) {
                return Err(Error::NotSimplicial {
                    facet: target.label(facet),
                    image: source.label(&image),
                });
            }
        }
        Ok(DeterministicProcedure {
            source,
            target,
            pi,
            alpha,
        })
    }

    /// Builds a procedure from measurement and outcome labels. `alpha` lists,
    /// for each target measurement, rows `(input assignment on π(x), output)`.
    pub fn from_labels(
        source: Arc<Scenario>,
        target: Arc<Scenario>,
        pi: Vec<(String, Vec<String>)>,
        alpha: Vec<(String, LabelledTable)>,
    ) -> Result<Self> {
        let n = target.measurement_count();
        let mut sets: Vec<Option<MeasurementSet>> = vec![None; n];
        for (x, ids) in &pi {
            let xi = target.index_of(x)?;
            sets[xi] = Some(source.set_of(ids)?);
        }
        let sets: Vec<MeasurementSet> = sets
            .into_iter()
            .enumerate()
            .map(|(x, s)| s.ok_or_else(|| Error::IncompleteTable(target.id(x).to_string())))
            .collect::<Result<_>>()?;
        let mut tables: Vec<Option<Vec<Option<usize>>>> = vec![None; n];
        for (x, rows) in &alpha {
            let xi = target.index_of(x)?;
            let space = source.events(&sets[xi]);
            let mut table = vec![None; space.size()];
            for (input, output) in rows {
                let a = source.assignment(input)?;
                if a.domain != sets[xi] {
                    return Err(Error::IncompleteTable(x.clone()));
                }
                let out = target
                    .outcome_index(xi, output)
                    .map_err(|_| Error::CodomainViolation(x.clone()))?;
                let slot = &mut table[space.rank_of(&a)];
                if slot.is_some_and(|o| o != out) {
                    return Err(Error::IncompleteTable(x.clone()));
                }
                *slot = Some(out);
            }
            tables[xi] = Some(table);
        }
        let alpha = tables
            .into_iter()
            .enumerate()
            .map(|(x, t)| {
                t.and_then(|rows| rows.into_iter().collect::<Option<Vec<usize>>>())
                    .ok_or_else(|| Error::IncompleteTable(target.id(x).to_string()))
            })
            .collect::<Result<_>>()?;
        Self::new(source, target, sets, alpha)
    }

    /// `π(x) = {x}` with identity tables.
    pub fn identity(scenario: Arc<Scenario>) -> Self {
        let n = scenario.measurement_count();
        let pi = (0..n).map(|x| vec![x]).collect();
        let alpha = (0..n).map(|x| (0..scenario.outcome_count(x)).collect()).collect();
        DeterministicProcedure {
            source: scenario.clone(),
            target: scenario,
            pi,
            alpha,
        }
    }

    pub(crate) fn from_parts_unchecked(
        source: Arc<Scenario>,
        target: Arc<Scenario>,
        pi: Vec<MeasurementSet>,
        alpha: Vec<Vec<usize>>,
    ) -> Self {
        DeterministicProcedure {
            source,
            target,
            pi,
            alpha,
        }
    }

    pub fn source(&self) -> &Arc<Scenario> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Scenario> {
        &self.target
    }

    /// `π(x)`.
    pub fn pi(&self, x: usize) -> &[usize] {
        &self.pi[x]
    }

    pub fn pis(&self) -> &[MeasurementSet] {
        &self.pi
    }

    /// `α_x`, indexed by rank in `Ev_S(π(x))`.
    pub fn alpha(&self, x: usize) -> &[usize] {
        &self.alpha[x]
    }

    pub fn alphas(&self) -> &[Vec<usize>] {
        &self.alpha
    }

    /// `π(σ) = ∪_{x∈σ} π(x)`.
    pub fn image(&self, sigma: &[usize]) -> MeasurementSet {
        image_of(&self.pi, sigma)
    }

    /// Sort key giving the canonical order of procedures: measurement by
    /// measurement, `|π(x)|`, then `π(x)`, then the table.
    pub fn key(&self) -> Vec<(usize, &[usize], &[usize])> {
        self.pi
            .iter()
            .zip(&self.alpha)
            .map(|(u, t)| (u.len(), u.as_slice(), t.as_slice()))
            .collect()
    }

    /// Rebinds endpoints to structurally equal scenario handles.
    pub(crate) fn rebind(mut self, source: Arc<Scenario>, target: Arc<Scenario>) -> Self {
        debug_assert!(*source == *self.source && *target == *self.target);
        self.source = source;
        self.target = target;
        self
    }

    /// The global assignment of `T` obtained from a global assignment of `S`
    /// (outcome positions in measurement order).
    pub fn apply_global(&self, s: &[usize]) -> Vec<usize> {
        (0..self.pi.len())
            .map(|x| {
                let space = self.source.events(&self.pi[x]);
                let local: Vec<usize> = self.pi[x].iter().map(|&m| s[m]).collect();
                self.alpha[x][space.rank(&local)]
            })
            .collect()
    }

    /// `α_σ: Ev_S(π(σ)) → Ev_T(σ)` as a rank table.
    pub fn alpha_sigma(&self, sigma: &[usize]) -> Vec<usize> {
        let domain = self.image(sigma);
        let space = self.source.events(&domain);
        let out = self.target.events(sigma);
        let projections: Vec<_> = sigma
            .iter()
            .map(|&x| space.projection(&self.pi[x]).expect("π(x) ⊆ π(σ)"))
            .collect();
        (0..space.size())
            .map(|r| {
                let values: Vec<usize> = sigma
                    .iter()
                    .zip(&projections)
                    .map(|(&x, p)| self.alpha[x][p.apply(r)])
                    .collect();
                out.rank(&values)
            })
            .collect()
    }

    /// `EMP(f)e`.
    pub fn pushforward(&self, e: &EmpiricalModel) -> Result<EmpiricalModel> {
        if **e.scenario() != *self.source {
            return Err(Error::ScenarioMismatch);
        }
        Ok(EmpiricalModel::from_parts_unchecked(
            self.target.clone(),
            self.push_distributions(e),
        ))
    }

    fn push_distributions(&self, e: &EmpiricalModel) -> Vec<Distribution> {
        self.target
            .facets()
            .iter()
            .map(|sigma| {
                let domain = self.image(sigma);
                let local = e.marginal(&domain).expect("image of a facet is a face");
                let table = self.alpha_sigma(sigma);
                let mut weights: BTreeMap<usize, Rational> = BTreeMap::new();
                for (&r, w) in &local.weights {
                    *weights.entry(table[r]).or_insert_with(Rational::zero) += w;
                }
                Distribution {
                    context: sigma.clone(),
                    weights,
                }
            })
            .collect()
    }

    /// `EMP_B(f)e`: image of the supports.
    pub fn pushforward_possibilistic(&self, e: &PossibilisticModel) -> Result<PossibilisticModel> {
        if **e.scenario() != *self.source {
            return Err(Error::ScenarioMismatch);
        }
        Ok(PossibilisticModel::from_supports_unchecked(
            self.target.clone(),
            self.push_supports(e),
        ))
    }

    fn push_supports(&self, e: &PossibilisticModel) -> Vec<BTreeSet<usize>> {
        self.target
            .facets()
            .iter()
            .map(|sigma| {
                let domain = self.image(sigma);
                let table = self.alpha_sigma(sigma);
                e.support_at(&domain)
                    .expect("image of a facet is a face")
                    .into_iter()
                    .map(|r| table[r])
                    .collect()
            })
            .collect()
    }

    /// `g ∘ self` for `self: S → T`, `g: T → V`.
    pub fn then(&self, g: &DeterministicProcedure) -> Result<DeterministicProcedure> {
        if *self.target != *g.source {
            return Err(Error::ScenarioMismatch);
        }
        let mut pi = Vec::with_capacity(g.pi.len());
        let mut alpha = Vec::with_capacity(g.pi.len());
        for v in 0..g.pi.len() {
            let mid = &g.pi[v];
            let domain = self.image(mid);
            let space = self.source.events(&domain);
            let mid_space = self.target.events(mid);
            let projections: Vec<_> = mid
                .iter()
                .map(|&x| space.projection(&self.pi[x]).expect("π(x) ⊆ π(σ)"))
                .collect();
            let table = (0..space.size())
                .map(|r| {
                    let values: Vec<usize> = mid
                        .iter()
                        .zip(&projections)
                        .map(|(&x, p)| self.alpha[x][p.apply(r)])
                        .collect();
                    g.alpha[v][mid_space.rank(&values)]
                })
                .collect();
            pi.push(domain);
            alpha.push(table);
        }
        Ok(DeterministicProcedure {
            source: self.source.clone(),
            target: g.target.clone(),
            pi,
            alpha,
        })
    }

    /// Shrinks every `π(x)` to the least subset its table depends on.
    pub fn canonicalize(&self) -> DeterministicProcedure {
        let mut pi = Vec::with_capacity(self.pi.len());
        let mut alpha = Vec::with_capacity(self.pi.len());
        for x in 0..self.pi.len() {
            let space = self.source.events(&self.pi[x]);
            let (u, table) = shrink_table(&space, &self.alpha[x]);
            pi.push(u);
            alpha.push(table);
        }
        DeterministicProcedure {
            source: self.source.clone(),
            target: self.target.clone(),
            pi,
            alpha,
        }
    }

    pub fn is_canonical(&self) -> bool {
        (0..self.pi.len()).all(|x| {
            let space = self.source.events(&self.pi[x]);
            essential_positions(&space, &self.alpha[x]).len() == self.pi[x].len()
        })
    }
}

fn image_of(pi: &[MeasurementSet], sigma: &[usize]) -> MeasurementSet {
    sigma.iter().fold(Vec::new(), |acc, &x| union(&acc, &pi[x]))
}

/// Positions `i` of the domain at which some pair of points differing only
/// in coordinate `i` receive different values.
pub fn essential_positions<T: PartialEq>(space: &EventSpace, table: &[T]) -> Vec<usize> {
    let radices = space.radices();
    let mut strides = vec![1usize; radices.len()];
    for i in (0..radices.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * radices[i + 1];
    }
    (0..radices.len())
        .filter(|&i| {
            (0..space.size()).any(|r| {
                let digit = (r / strides[i]) % radices[i];
                digit == 0 && (1..radices[i]).any(|k| table[r + k * strides[i]] != table[r])
            })
        })
        .collect()
}

/// The least subset of `space`'s domain through which `table` factors,
/// with the factored table on it.
fn shrink_table<T: PartialEq + Clone>(space: &EventSpace, table: &[T]) -> (MeasurementSet, Vec<T>) {
    let keep = essential_positions(space, table);
    let u: MeasurementSet = keep.iter().map(|&i| space.domain()[i]).collect();
    if u.len() == space.domain().len() {
        return (u, table.to_vec());
    }
    let sub = EventSpace::from_radices(u.clone(), keep.iter().map(|&i| space.radices()[i]).collect());
    let factored = (0..sub.size())
        .map(|r| {
            let digits = sub.unrank(r);
            let mut full = vec![0usize; space.domain().len()];
            for (&i, d) in keep.iter().zip(digits) {
                full[i] = d;
            }
            table[space.rank(&full)].clone()
        })
        .collect();
    (u, factored)
}

/// The least `U ⊆ X_S` through which a table on `Ev(X_S)` factors. The
/// factorisation is re-checked before returning.
pub fn least_subset<T: PartialEq + Clone>(source: &Scenario, table: &[T], budget: u128) -> Result<MeasurementSet> {
    let all = source.all_measurements();
    crate::contextuality::check_budget(source.event_count(&all), budget)?;
    let space = source.events(&all);
    if table.len() != space.size() {
        return Err(Error::IncompleteTable("global table".into()));
    }
    let (u, factored) = shrink_table(&space, table);
    let proj = space.projection(&u).expect("U ⊆ X_S");
    if (0..space.size()).any(|r| table[r] != factored[proj.apply(r)]) {
        return Err(Error::Internal("least subset does not factor the table".into()));
    }
    Ok(u)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProbabilisticProcedure {
    components: Vec<(Rational, DeterministicProcedure)>,
}

impl ProbabilisticProcedure {
    /// Weights must be strictly positive and sum to 1; equal components are
    /// merged.
    pub fn new(components: Vec<(Rational, DeterministicProcedure)>) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyMixture)?;
        let (source, target) = (first.1.source.clone(), first.1.target.clone());
        let mut total = Rational::zero();
        for (w, f) in &components {
            if *f.source != *source || *f.target != *target {
                return Err(Error::ScenarioMismatch);
            }
            if *w <= Rational::zero() {
                return Err(Error::NonPositiveWeight);
            }
            total += w;
        }
        if !total.is_one() {
            return Err(Error::NotNormalized("procedure mixture".into()));
        }
        let components = components
            .into_iter()
            .map(|(w, f)| (w, f.rebind(source.clone(), target.clone())))
            .collect();
        Ok(ProbabilisticProcedure {
            components: merge(components),
        })
    }

    pub fn deterministic(f: DeterministicProcedure) -> Self {
        ProbabilisticProcedure {
            components: vec![(Rational::one(), f)],
        }
    }

    pub fn components(&self) -> &[(Rational, DeterministicProcedure)] {
        &self.components
    }

    pub fn source(&self) -> &Arc<Scenario> {
        &self.components[0].1.source
    }

    pub fn target(&self) -> &Arc<Scenario> {
        &self.components[0].1.target
    }

    /// `EMP(Σ r_i f_i)e = Σ r_i EMP(f_i)e`.
    pub fn pushforward(&self, e: &EmpiricalModel) -> Result<EmpiricalModel> {
        if **e.scenario() != **self.source() {
            return Err(Error::ScenarioMismatch);
        }
        let target = self.target().clone();
        let mut acc: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); target.facets().len()];
        for (w, f) in &self.components {
            for (slot, d) in acc.iter_mut().zip(f.push_distributions(e)) {
                for (r, p) in d.weights {
                    *slot.entry(r).or_insert_with(Rational::zero) += w * p;
                }
            }
        }
        let dists = target
            .facets()
            .iter()
            .zip(acc)
            .map(|(sigma, mut weights)| {
                weights.retain(|_, w| !w.is_zero());
                Distribution {
                    context: sigma.clone(),
                    weights,
                }
            })
            .collect();
        Ok(EmpiricalModel::from_parts_unchecked(target, dists))
    }

    /// Bilinear composition `g ∘ self`.
    pub fn then(&self, g: &ProbabilisticProcedure) -> Result<ProbabilisticProcedure> {
        let mut out = Vec::new();
        for (w, f) in &self.components {
            for (v, h) in &g.components {
                out.push((w * v, f.then(h)?));
            }
        }
        Ok(ProbabilisticProcedure { components: merge(out) })
    }

    /// Canonicalizes every component and merges duplicates.
    pub fn canonicalize(&self) -> ProbabilisticProcedure {
        ProbabilisticProcedure {
            components: merge(
                self.components
                    .iter()
                    .map(|(w, f)| (w.clone(), f.canonicalize()))
                    .collect(),
            ),
        }
    }

    /// The Boolean mixture of the components.
    pub fn support(&self) -> PossibilisticProcedure {
        PossibilisticProcedure {
            components: self.components.iter().map(|(_, f)| f.clone()).collect(),
        }
    }
}

fn merge(components: Vec<(Rational, DeterministicProcedure)>) -> Vec<(Rational, DeterministicProcedure)> {
    let mut out: Vec<(Rational, DeterministicProcedure)> = Vec::with_capacity(components.len());
    let mut sorted = components;
    sorted.sort_by(|a, b| a.1.key().cmp(&b.1.key()));
    for (w, f) in sorted {
        match out.last_mut() {
            Some((acc, g)) if *g == f => *acc += w,
            _ => out.push((w, f)),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PossibilisticProcedure {
    components: Vec<DeterministicProcedure>,
}

impl PossibilisticProcedure {
    pub fn new(components: Vec<DeterministicProcedure>) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyMixture)?;
        let (source, target) = (first.source.clone(), first.target.clone());
        if components.iter().any(|f| *f.source != *source || *f.target != *target) {
            return Err(Error::ScenarioMismatch);
        }
        let mut components: Vec<_> = components
            .into_iter()
            .map(|f| f.rebind(source.clone(), target.clone()))
            .collect();
        components.sort_by(|a, b| a.key().cmp(&b.key()));
        components.dedup();
        Ok(PossibilisticProcedure { components })
    }

    pub fn components(&self) -> &[DeterministicProcedure] {
        &self.components
    }

    /// Union over components of the image of the supports.
    pub fn pushforward(&self, e: &PossibilisticModel) -> Result<PossibilisticModel> {
        let first = &self.components[0];
        if **e.scenario() != *first.source {
            return Err(Error::ScenarioMismatch);
        }
        let mut acc = vec![BTreeSet::new(); first.target.facets().len()];
        for f in &self.components {
            for (slot, s) in acc.iter_mut().zip(f.push_supports(e)) {
                slot.extend(s);
            }
        }
        Ok(PossibilisticModel::from_supports_unchecked(first.target.clone(), acc))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationMode {
    /// `EMP(f)e = d`.
    Probabilistic,
    /// Equal supports.
    Possibilistic,
    /// Supports of `EMP(f)e` included in those of `d`.
    Weak,
}

/// Whether `f` simulates `d` from `e` in the given mode.
pub fn is_simulation(
    f: &ProbabilisticProcedure,
    e: &EmpiricalModel,
    d: &EmpiricalModel,
    mode: SimulationMode,
) -> Result<bool> {
    if **d.scenario() != **f.target() {
        return Err(Error::ScenarioMismatch);
    }
    let pushed = f.pushforward(e)?;
    Ok(match mode {
        SimulationMode::Probabilistic => pushed.distributions() == d.distributions(),
        SimulationMode::Possibilistic => pushed.collapse().supports() == d.collapse().supports(),
        SimulationMode::Weak => pushed
            .collapse()
            .supports()
            .iter()
            .zip(d.collapse().supports())
            .all(|(a, b)| a.is_subset(b)),
    })
}

/// Possibilistic and weak simulation between possibilistic models.
pub fn is_possibilistic_simulation(
    f: &PossibilisticProcedure,
    e: &PossibilisticModel,
    d: &PossibilisticModel,
    weak: bool,
) -> Result<bool> {
    let pushed = f.pushforward(e)?;
    if *pushed.scenario() != *d.scenario() {
        return Err(Error::ScenarioMismatch);
    }
    Ok(if weak {
        pushed.leq(d)?
    } else {
        pushed.supports() == d.supports()
    })
}

/// Candidate `(U, table)` pairs for one target measurement, ordered by
/// `|U|`, then `U`, then the table read as a word.
pub(crate) fn local_tables(
    source: &Scenario,
    subsets: &[MeasurementSet],
    outcomes: usize,
    canonical_only: bool,
    budget: u128,
) -> Result<Vec<(MeasurementSet, Vec<usize>)>> {
    let mut subsets = subsets.to_vec();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut needed: u128 = 0;
    for u in &subsets {
        let rows = source.event_count(u);
        let count = u32::try_from(rows)
            .ok()
            .and_then(|r| (outcomes as u128).checked_pow(r))
            .unwrap_or(u128::MAX);
        needed = needed.saturating_add(count);
    }
    crate::contextuality::check_budget(needed, budget)?;
    let mut out = Vec::new();
    for u in subsets {
        let space = source.events(&u);
        let mut table = vec![0usize; space.size()];
        loop {
            if !canonical_only || essential_positions(&space, &table).len() == u.len() {
                out.push((u.clone(), table.clone()));
            }
            // Next word in lexicographic order, first entry most significant.
            let mut i = table.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                table[i] += 1;
                if table[i] < outcomes {
                    break;
                }
                table[i] = 0;
            }
            if table.iter().all(|&o| o == 0) {
                break;
            }
        }
    }
    Ok(out)
}

fn faces_of(source: &Scenario) -> Vec<MeasurementSet> {
    source.faces()
}

/// Backtracking over per-measurement candidates, keeping `π` simplicial on
/// every partially assigned facet of the target.
fn enumerate(
    source: &Arc<Scenario>,
    target: &Arc<Scenario>,
    canonical_only: bool,
    budget: u128,
    mut visit: impl FnMut(&[usize], &[Vec<(MeasurementSet, Vec<usize>)>]) -> Result<()>,
) -> Result<()> {
    let faces = faces_of(source);
    let candidates: Vec<Vec<(MeasurementSet, Vec<usize>)>> = (0..target.measurement_count())
        .map(|x| local_tables(source, &faces, target.outcome_count(x), canonical_only, budget))
        .collect::<Result<_>>()?;
    let mut facets_of: Vec<Vec<usize>> = vec![Vec::new(); target.measurement_count()];
    for (k, f) in target.facets().iter().enumerate() {
        for &x in f {
            facets_of[x].push(k);
        }
    }
    let n = target.measurement_count();
    let mut choice = vec![0usize; n];
    let mut nodes: u128 = 0;
    // Iterative depth-first search; `depth` measurements are fixed.
    let mut depth = 0usize;
    let mut next = vec![0usize; n + 1];
    loop {
        if depth == n {
            visit(&choice, &candidates)?;
            if depth == 0 {
                return Ok(());
            }
            depth -= 1;
            continue;
        }
        let x = depth;
        if next[x] >= candidates[x].len() {
            next[x] = 0;
            if depth == 0 {
                return Ok(());
            }
            depth -= 1;
            continue;
        }
        let c = next[x];
        next[x] += 1;
        nodes += 1;
        crate::contextuality::check_budget(nodes, budget)?;
        choice[x] = c;
        let ok = facets_of[x].iter().all(|&k| {
            let image = target.facets()[k]
                .iter()
                .filter(|&&y| y <= x)
                .fold(Vec::new(), |acc, &y| union(&acc, &candidates[y][choice[y]].0));
            source.contains_face(&image)
        });
        if ok {
            depth += 1;
        }
    }
}

fn collect(
    source: &Arc<Scenario>,
    target: &Arc<Scenario>,
    canonical_only: bool,
    budget: u128,
) -> Result<Vec<DeterministicProcedure>> {
    let mut out = Vec::new();
    enumerate(source, target, canonical_only, budget, |choice, candidates| {
        let (pi, alpha) = choice
            .iter()
            .enumerate()
            .map(|(x, &c)| candidates[x][c].clone())
            .unzip();
        out.push(DeterministicProcedure::from_parts_unchecked(
            source.clone(),
            target.clone(),
            pi,
            alpha,
        ));
        Ok(())
    })?;
    Ok(out)
}

/// Every canonical (least-subset) deterministic procedure `S → T`, once
/// each, in canonical order.
pub fn enumerate_canonical_procedures(
    source: &Arc<Scenario>,
    target: &Arc<Scenario>,
    budget: u128,
) -> Result<Vec<DeterministicProcedure>> {
    collect(source, target, true, budget)
}

/// Number of canonical procedures, without materialising them.
pub fn count_canonical_procedures(source: &Arc<Scenario>, target: &Arc<Scenario>, budget: u128) -> Result<u128> {
    let mut count = 0u128;
    enumerate(source, target, true, budget, |_, _| {
        count += 1;
        Ok(())
    })?;
    Ok(count)
}

/// Every deterministic procedure `S → T`, with `π(x)` unrestricted.
pub fn enumerate_all_procedures(
    source: &Arc<Scenario>,
    target: &Arc<Scenario>,
    budget: u128,
) -> Result<Vec<DeterministicProcedure>> {
    collect(source, target, false, budget)
}

/// Whether `set` is a subset of some facet of `scenario`.
pub fn is_face(scenario: &Scenario, set: &[usize]) -> bool {
    scenario.facets().iter().any(|f| is_subset(set, f))
}
