//! Measurement scenarios, their simplicial complexes of contexts, and the
//! event sheaf `Ev`.
//!
//! Measurements are kept sorted by id and addressed internally by position;
//! outcomes are addressed by their position in the declared list. A set of
//! measurements is a sorted `Vec<usize>` of positions. The complex of
//! contexts is stored by its facets only.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Sorted, duplicate-free list of measurement positions.
pub type MeasurementSet = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Measurement {
    pub id: String,
    pub outcomes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    measurements: Vec<Measurement>,
    facets: Vec<MeasurementSet>,
}

impl Scenario {
    /// Validates raw scenario data. Facets that are contained in other facets
    /// are dropped. A scenario without measurements has the single face `∅`.
    pub fn new<M, O, C>(measurements: M, maximal_contexts: C) -> Result<Self>
    where
        M: IntoIterator<Item = (String, O)>,
        O: IntoIterator<Item = String>,
        C: IntoIterator<Item = Vec<String>>,
    {
        let mut measurements: Vec<Measurement> = measurements
            .into_iter()
            .map(|(id, outcomes)| Measurement {
                id,
                outcomes: outcomes.into_iter().collect(),
            })
            .collect();
        measurements.sort();
        for pair in measurements.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateMeasurementId(pair[0].id.clone()));
            }
        }
        for m in &measurements {
            if m.id.is_empty() {
                return Err(Error::EmptyMeasurementId);
            }
            if m.outcomes.is_empty() {
                return Err(Error::EmptyOutcomeSet(m.id.clone()));
            }
            let mut seen = BTreeSet::new();
            for o in &m.outcomes {
                if !seen.insert(o) {
                    return Err(Error::DuplicateOutcome {
                        measurement: m.id.clone(),
                        outcome: o.clone(),
                    });
                }
            }
        }

        let mut facets: Vec<MeasurementSet> = Vec::new();
        for context in maximal_contexts {
            let mut set = Vec::with_capacity(context.len());
            for id in &context {
                match measurements.binary_search_by(|m| m.id.as_str().cmp(id)) {
                    Ok(i) => set.push(i),
                    Err(_) => return Err(Error::UnknownMeasurementInContext(id.clone())),
                }
            }
            set.sort_unstable();
            set.dedup();
            facets.push(set);
        }
        Self::from_parts(measurements, facets)
    }

    /// Builds a scenario from already-sorted measurements and position-based
    /// contexts.
    pub(crate) fn from_parts(measurements: Vec<Measurement>, mut facets: Vec<MeasurementSet>) -> Result<Self> {
        facets.sort();
        facets.dedup();
        let antichain: Vec<MeasurementSet> = facets
            .iter()
            .filter(|f| !facets.iter().any(|g| g != *f && is_subset(f, g)))
            .cloned()
            .collect();
        let mut facets = antichain;
        if facets.is_empty() {
            facets.push(Vec::new());
        }
        let mut covered = vec![false; measurements.len()];
        for f in &facets {
            for &i in f {
                covered[i] = true;
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::UncoveredMeasurement(measurements[i].id.clone()));
        }
        Ok(Scenario { measurements, facets })
    }

    /// The scenario with no measurements; its only context is `∅`.
    pub fn zero() -> Self {
        Scenario {
            measurements: Vec::new(),
            facets: vec![Vec::new()],
        }
    }

    /// One measurement `*` with outcomes `"0"..="n-1"`.
    pub fn dice(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArity(n));
        }
        Ok(Scenario {
            measurements: vec![Measurement {
                id: "*".to_string(),
                outcomes: (0..n).map(|k| k.to_string()).collect(),
            }],
            facets: vec![vec![0]],
        })
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn measurement_count(&self) -> usize {
        self.measurements.len()
    }

    pub fn facets(&self) -> &[MeasurementSet] {
        &self.facets
    }

    pub fn all_measurements(&self) -> MeasurementSet {
        (0..self.measurements.len()).collect()
    }

    pub fn id(&self, m: usize) -> &str {
        &self.measurements[m].id
    }

    pub fn outcomes(&self, m: usize) -> &[String] {
        &self.measurements[m].outcomes
    }

    pub fn outcome_count(&self, m: usize) -> usize {
        self.measurements[m].outcomes.len()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.measurements
            .binary_search_by(|m| m.id.as_str().cmp(id))
            .map_err(|_| Error::UnknownMeasurement(id.to_string()))
    }

    pub fn outcome_index(&self, m: usize, label: &str) -> Result<usize> {
        self.measurements[m]
            .outcomes
            .iter()
            .position(|o| o == label)
            .ok_or_else(|| Error::UnknownOutcome {
                measurement: self.measurements[m].id.clone(),
                outcome: label.to_string(),
            })
    }

    /// Converts measurement ids into a sorted position set.
    pub fn set_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<MeasurementSet> {
        let mut set = ids
            .iter()
            .map(|id| self.index_of(id.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        set.sort_unstable();
        set.dedup();
        Ok(set)
    }

    pub fn ids_of(&self, set: &[usize]) -> Vec<String> {
        set.iter().map(|&m| self.id(m).to_string()).collect()
    }

    /// Human-readable `a,b,c` label of a measurement set.
    pub fn label(&self, set: &[usize]) -> String {
        self.ids_of(set).join(",")
    }

    /// Membership in the simplicial complex: `U` is a face iff it is
    /// contained in some facet.
    pub fn contains_face(&self, set: &[usize]) -> bool {
        self.facets.iter().any(|f| is_subset(set, f))
    }

    pub fn is_context<S: AsRef<str>>(&self, ids: &[S]) -> Result<bool> {
        Ok(self.contains_face(&self.set_of(ids)?))
    }

    /// Some facet containing `set`, if any (the first in canonical order).
    pub fn facet_containing(&self, set: &[usize]) -> Option<usize> {
        self.facets.iter().position(|f| is_subset(set, f))
    }

    /// Every face of the complex, sorted.
    pub fn faces(&self) -> Vec<MeasurementSet> {
        let mut all = BTreeSet::new();
        for f in &self.facets {
            for mask in 0u64..(1u64 << f.len()) {
                let face: MeasurementSet = f
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &m)| m)
                    .collect();
                all.insert(face);
            }
        }
        all.into_iter().collect()
    }

    /// `|Ev(U)|`, saturating at `u128::MAX`.
    pub fn event_count(&self, set: &[usize]) -> u128 {
        set.iter()
            .fold(1u128, |acc, &m| acc.saturating_mul(self.outcome_count(m) as u128))
    }

    pub fn events(&self, set: &[usize]) -> EventSpace {
        EventSpace::new(self, set)
    }

    /// `Ev(U)` as explicit assignments in canonical order.
    pub fn enumerate_assignments<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<Assignment>> {
        let set = self.set_of(ids)?;
        let space = self.events(&set);
        Ok(space.iter().map(|values| space.assignment(values)).collect())
    }

    /// `T|σ`: the measurements of `σ` with a single facet.
    pub fn restrict<S: AsRef<str>>(&self, ids: &[S]) -> Result<Scenario> {
        let set = self.set_of(ids)?;
        self.restrict_to(&set)
    }

    pub fn restrict_to(&self, set: &[usize]) -> Result<Scenario> {
        if !self.contains_face(set) {
            return Err(Error::NotAContext(self.label(set)));
        }
        let measurements: Vec<Measurement> = set.iter().map(|&m| self.measurements[m].clone()).collect();
        let facet: MeasurementSet = (0..set.len()).collect();
        Scenario::from_parts(measurements, vec![facet])
    }

    /// Builds an assignment from `(measurement id, outcome label)` pairs.
    pub fn assignment<S: AsRef<str>, T: AsRef<str>>(&self, pairs: &[(S, T)]) -> Result<Assignment> {
        let mut entries = Vec::with_capacity(pairs.len());
        for (id, label) in pairs {
            let m = self.index_of(id.as_ref())?;
            entries.push((m, self.outcome_index(m, label.as_ref())?));
        }
        entries.sort_unstable();
        let before = entries.len();
        entries.dedup_by_key(|e| e.0);
        if entries.len() != before {
            return Err(Error::Internal("assignment repeats a measurement".into()));
        }
        Ok(Assignment {
            domain: entries.iter().map(|e| e.0).collect(),
            values: entries.iter().map(|e| e.1).collect(),
        })
    }

    /// `(id, label)` pairs of an assignment, sorted by id.
    pub fn labels_of(&self, a: &Assignment) -> Vec<(String, String)> {
        a.domain
            .iter()
            .zip(&a.values)
            .map(|(&m, &o)| (self.id(m).to_string(), self.outcomes(m)[o].clone()))
            .collect()
    }

    /// Compact rendering such as `pint=yes,wine=no`.
    pub fn render(&self, a: &Assignment) -> String {
        self.labels_of(a)
            .into_iter()
            .map(|(m, o)| format!("{m}={o}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let facets: Vec<String> = self.facets.iter().map(|c| format!("{{{}}}", self.label(c))).collect();
        write!(f, "Scenario[{}]", facets.join(" "))
    }
}

/// An element of `Ev(U)`: outcome positions for the measurements of a domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub domain: MeasurementSet,
    pub values: Vec<usize>,
}

impl Assignment {
    pub fn empty() -> Self {
        Assignment {
            domain: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn value(&self, m: usize) -> Option<usize> {
        self.domain.binary_search(&m).ok().map(|pos| self.values[pos])
    }

    /// The projection `Ev(U) → Ev(V)` for `V ⊆ U`.
    pub fn restrict(&self, sub: &[usize]) -> Result<Assignment> {
        let positions = positions_in(sub, &self.domain).ok_or(Error::NotSubdomain)?;
        Ok(Assignment {
            domain: sub.to_vec(),
            values: positions.iter().map(|&p| self.values[p]).collect(),
        })
    }

    /// Glues two assignments that agree on their overlap.
    pub fn glue(&self, other: &Assignment) -> Option<Assignment> {
        let mut domain = Vec::new();
        let mut values = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.domain.len() || j < other.domain.len() {
            let left = self.domain.get(i);
            let right = other.domain.get(j);
            match (left, right) {
                (Some(&a), Some(&b)) if a == b => {
                    if self.values[i] != other.values[j] {
                        return None;
                    }
                    domain.push(a);
                    values.push(self.values[i]);
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) if a < b => {
                    domain.push(a);
                    values.push(self.values[i]);
                    i += 1;
                }
                (Some(&a), None) => {
                    domain.push(a);
                    values.push(self.values[i]);
                    i += 1;
                }
                (_, Some(&b)) => {
                    domain.push(b);
                    values.push(other.values[j]);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Some(Assignment { domain, values })
    }
}

/// The finite set `Ev(U)` with a mixed-radix ranking. The first measurement
/// of the domain is the most significant digit, so ranks follow the
/// lexicographic order on `(measurement id, outcome position)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSpace {
    domain: MeasurementSet,
    radices: Vec<usize>,
    size: usize,
}

impl EventSpace {
    pub fn new(scenario: &Scenario, set: &[usize]) -> Self {
        let radices: Vec<usize> = set.iter().map(|&m| scenario.outcome_count(m)).collect();
        Self::from_radices(set.to_vec(), radices)
    }

    pub fn from_radices(domain: MeasurementSet, radices: Vec<usize>) -> Self {
        let size = radices
            .iter()
            .try_fold(1usize, |acc, &r| acc.checked_mul(r))
            .expect("event space too large to index");
        EventSpace { domain, radices, size }
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rank(&self, values: &[usize]) -> usize {
        values.iter().zip(&self.radices).fold(0, |acc, (&v, &r)| acc * r + v)
    }

    pub fn unrank(&self, mut rank: usize) -> Vec<usize> {
        let mut values = vec![0; self.radices.len()];
        for k in (0..self.radices.len()).rev() {
            values[k] = rank % self.radices[k];
            rank /= self.radices[k];
        }
        values
    }

    pub fn rank_of(&self, a: &Assignment) -> usize {
        debug_assert_eq!(a.domain, self.domain);
        self.rank(&a.values)
    }

    pub fn assignment(&self, values: Vec<usize>) -> Assignment {
        Assignment {
            domain: self.domain.clone(),
            values,
        }
    }

    pub fn assignment_at(&self, rank: usize) -> Assignment {
        self.assignment(self.unrank(rank))
    }

    /// Iterates outcome vectors in rank order.
    pub fn iter(&self) -> EventIter<'_> {
        EventIter {
            space: self,
            next: if self.size == 0 {
                None
            } else {
                Some(vec![0; self.radices.len()])
            },
        }
    }

    /// Projection of ranks onto a subdomain.
    pub fn projection(&self, sub: &[usize]) -> Option<Projection> {
        let positions = positions_in(sub, &self.domain)?;
        let radices: Vec<usize> = positions.iter().map(|&p| self.radices[p]).collect();
        Some(Projection {
            source: self.clone(),
            positions,
            target: EventSpace::from_radices(sub.to_vec(), radices),
        })
    }
}

pub struct EventIter<'a> {
    space: &'a EventSpace,
    next: Option<Vec<usize>>,
}

impl Iterator for EventIter<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut k = succ.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            succ[k] += 1;
            if succ[k] < self.space.radices[k] {
                self.next = Some(succ);
                break;
            }
            succ[k] = 0;
        }
        Some(current)
    }
}

/// Rank-level restriction map `Ev(U) → Ev(V)`.
#[derive(Debug, Clone)]
pub struct Projection {
    source: EventSpace,
    positions: Vec<usize>,
    target: EventSpace,
}

impl Projection {
    pub fn target(&self) -> &EventSpace {
        &self.target
    }

    pub fn apply_values(&self, values: &[usize]) -> Vec<usize> {
        self.positions.iter().map(|&p| values[p]).collect()
    }

    pub fn apply(&self, rank: usize) -> usize {
        let values = self.source.unrank(rank);
        self.target.rank(&self.apply_values(&values))
    }
}

pub fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

pub fn union(a: &[usize], b: &[usize]) -> MeasurementSet {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn intersection(a: &[usize], b: &[usize]) -> MeasurementSet {
    a.iter().filter(|x| b.binary_search(x).is_ok()).copied().collect()
}

/// Positions of the elements of `sub` inside the sorted `sup`.
pub fn positions_in(sub: &[usize], sup: &[usize]) -> Option<Vec<usize>> {
    sub.iter().map(|x| sup.binary_search(x).ok()).collect()
}
