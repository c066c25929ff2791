//! The contextuality hierarchy.
//!
//! * probabilistic: no global distribution marginalises to the model
//!   (exact LP over global assignments);
//! * logical: some locally possible joint outcome extends to no globally
//!   consistent assignment;
//! * strong: no global assignment is consistent with the supports at all.
//!
//! Also provides the signed ("quasi-probability") decomposition that every
//! no-signalling model admits.

use std::collections::{BTreeMap, HashSet};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlp::{solve_feasibility, solve_linear_system, Feasibility, LinearSystem};
use crate::model::{combine_facetwise, EmpiricalModel, PossibilisticModel};
use crate::rational::{one, Rational};
use crate::scenario::{Assignment, Scenario};

/// Default ceiling on `|Ev(X_S)|` (and on search nodes).
pub const DEFAULT_BUDGET: u128 = 1 << 20;

pub(crate) fn check_budget(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonContextuality {
    /// A distribution on global assignments marginalising to the model.
    NonContextual(BTreeMap<Assignment, Rational>),
    Contextual,
}

impl NonContextuality {
    pub fn is_contextual(&self) -> bool {
        matches!(self, NonContextuality::Contextual)
    }
}

/// Rows `Σ_{s|C = t} d(s) = e_C(t)` for every facet `C` and `t ∈ Ev(C)`,
/// followed by the normalisation row.
fn marginal_system(model: &EmpiricalModel, free: bool) -> (LinearSystem, usize) {
    let sc = model.scenario();
    let global = sc.events(&sc.all_measurements());
    let n = global.size();
    let mut system = if free {
        LinearSystem::new_free(n)
    } else {
        LinearSystem::new(n)
    };
    for (facet, dist) in sc.facets().iter().zip(model.distributions()) {
        let proj = global.projection(facet).expect("facet within X");
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); proj.target().size()];
        for rank in 0..n {
            rows[proj.apply(rank)].push((rank, one()));
        }
        for (t, coeffs) in rows.into_iter().enumerate() {
            system.add_equality(coeffs, dist.weight(t));
        }
    }
    system.add_equality((0..n).map(|r| (r, one())).collect(), one());
    (system, n)
}

/// Decides probabilistic non-contextuality by exact LP feasibility.
pub fn is_noncontextual(model: &EmpiricalModel, budget: u128) -> Result<NonContextuality> {
    let sc = model.scenario();
    let all = sc.all_measurements();
    check_budget(sc.event_count(&all), budget)?;
    let (system, _) = marginal_system(model, false);
    match solve_feasibility(&system)? {
        Feasibility::Infeasible => Ok(NonContextuality::Contextual),
        Feasibility::Feasible(point) => {
            let global = sc.events(&all);
            let witness: BTreeMap<Assignment, Rational> = point
                .into_iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(r, w)| (global.assignment_at(r), w))
                .collect();
            if !mixture_reproduces(model, &witness)? {
                return Err(Error::Internal(
                    "non-contextual witness does not reproduce the model".into(),
                ));
            }
            Ok(NonContextuality::NonContextual(witness))
        }
    }
}

/// Whether `Σ w_s δ_s` equals the model contextwise (weights may be signed).
pub fn mixture_reproduces(model: &EmpiricalModel, weights: &BTreeMap<Assignment, Rational>) -> Result<bool> {
    let sc = model.scenario();
    let deltas = weights
        .keys()
        .map(|s| EmpiricalModel::deterministic(sc.clone(), s))
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<(Rational, &EmpiricalModel)> = weights.values().cloned().zip(deltas.iter()).collect();
    let sum = weights.values().fold(Rational::zero(), |acc, w| acc + w);
    Ok(sum == one() && combine_facetwise(sc, &terms) == model.distributions())
}

/// `S_e`: the global assignments consistent with the supports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalSupport {
    pub assignments: Vec<Assignment>,
}

/// Backtracking over measurements in canonical order. A partial assignment
/// survives only if, for every facet, its restriction to the assigned part
/// of that facet is the prefix of some supported joint outcome. `budget`
/// bounds the number of search nodes.
pub fn global_support(model: &PossibilisticModel, budget: u128) -> Result<GlobalSupport> {
    let sc = model.scenario();
    let n = sc.measurement_count();
    // allowed[c][len] = projections of facet c's support onto its first
    // `len` measurements.
    let mut allowed: Vec<Vec<HashSet<Vec<usize>>>> = Vec::new();
    for (facet, support) in sc.facets().iter().zip(model.supports()) {
        let space = sc.events(facet);
        let mut levels = vec![HashSet::new(); facet.len() + 1];
        for &rank in support {
            let values = space.unrank(rank);
            for (len, level) in levels.iter_mut().enumerate() {
                level.insert(values[..len].to_vec());
            }
        }
        allowed.push(levels);
    }
    // For each measurement, the facets containing it with its position.
    let mut touching: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (c, facet) in sc.facets().iter().enumerate() {
        for (pos, &m) in facet.iter().enumerate() {
            touching[m].push((c, pos));
        }
    }
    if allowed.iter().any(|levels| levels[0].is_empty()) {
        return Ok(GlobalSupport {
            assignments: Vec::new(),
        });
    }

    let mut found = Vec::new();
    let mut values = vec![0usize; n];
    let mut nodes: u128 = 0;
    search(sc, &allowed, &touching, 0, &mut values, &mut found, &mut nodes, budget)?;
    let all = sc.all_measurements();
    Ok(GlobalSupport {
        assignments: found
            .into_iter()
            .map(|v| Assignment {
                domain: all.clone(),
                values: v,
            })
            .collect(),
    })
}

#[allow(clippy::too_many_arguments)]
fn search(
    sc: &Scenario,
    allowed: &[Vec<HashSet<Vec<usize>>>],
    touching: &[Vec<(usize, usize)>],
    m: usize,
    values: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
    nodes: &mut u128,
    budget: u128,
) -> Result<()> {
    if m == values.len() {
        found.push(values.clone());
        return Ok(());
    }
    for o in 0..sc.outcome_count(m) {
        *nodes += 1;
        check_budget(*nodes, budget)?;
        values[m] = o;
        let consistent = touching[m].iter().all(|&(c, pos)| {
            let facet = &sc.facets()[c];
            let prefix: Vec<usize> = facet[..=pos].iter().map(|&x| values[x]).collect();
            allowed[c][pos + 1].contains(&prefix)
        });
        if consistent {
            search(sc, allowed, touching, m + 1, values, found, nodes, budget)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Global distribution certifying non-contextuality.
    GlobalDistribution(BTreeMap<Assignment, Rational>),
    /// The first (facet, joint outcome) in canonical order that is possible
    /// but extends to no consistent global assignment.
    NonExtendable { facet: usize, assignment: Assignment },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyReport {
    pub probabilistically_contextual: bool,
    pub logically_contextual: bool,
    pub strongly_contextual: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalReport {
    pub logically_contextual: bool,
    pub strongly_contextual: bool,
    pub non_extendable: Option<(usize, Assignment)>,
    pub global_support: GlobalSupport,
}

/// Logical and strong contextuality of a possibilistic model.
pub fn classify_possibilistic(model: &PossibilisticModel, budget: u128) -> Result<LogicalReport> {
    let sc = model.scenario();
    let support = global_support(model, budget)?;
    let mut non_extendable = None;
    'facets: for (c, facet) in sc.facets().iter().enumerate() {
        let space = sc.events(facet);
        let reachable: HashSet<usize> = support
            .assignments
            .iter()
            .map(|s| space.rank_of(&s.restrict(facet).expect("facet within X")))
            .collect();
        for &rank in &model.supports()[c] {
            if !reachable.contains(&rank) {
                non_extendable = Some((c, space.assignment_at(rank)));
                break 'facets;
            }
        }
    }
    Ok(LogicalReport {
        logically_contextual: non_extendable.is_some(),
        strongly_contextual: support.assignments.is_empty(),
        non_extendable,
        global_support: support,
    })
}

/// Full hierarchy classification of a probabilistic model.
pub fn classify(model: &EmpiricalModel, budget: u128) -> Result<HierarchyReport> {
    let logical = classify_possibilistic(&model.collapse(), budget)?;
    let probabilistic = is_noncontextual(model, budget)?;
    let witness = match (&probabilistic, logical.non_extendable) {
        (NonContextuality::NonContextual(w), _) => Some(Witness::GlobalDistribution(w.clone())),
        (NonContextuality::Contextual, Some((facet, assignment))) => Some(Witness::NonExtendable { facet, assignment }),
        (NonContextuality::Contextual, None) => None,
    };
    let report = HierarchyReport {
        probabilistically_contextual: probabilistic.is_contextual(),
        logically_contextual: logical.logically_contextual,
        strongly_contextual: logical.strongly_contextual,
        witness,
    };
    if (report.strongly_contextual && !report.logically_contextual)
        || (report.logically_contextual && !report.probabilistically_contextual)
    {
        return Err(Error::Internal("contextuality hierarchy violated".into()));
    }
    Ok(report)
}

/// Signed weights `r_s` over global assignments with `Σ r_s = 1` and
/// `Σ r_s δ_s = e` contextwise. Only non-zero weights are returned.
pub fn affine_decomposition(model: &EmpiricalModel, budget: u128) -> Result<BTreeMap<Assignment, Rational>> {
    let sc = model.scenario();
    let all = sc.all_measurements();
    check_budget(sc.event_count(&all), budget)?;
    let (system, _) = marginal_system(model, true);
    let point = solve_linear_system(&system)?
        .ok_or_else(|| Error::Internal("no affine decomposition exists for a no-signalling model".into()))?;
    let global = sc.events(&all);
    let weights: BTreeMap<Assignment, Rational> = point
        .into_iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(r, w)| (global.assignment_at(r), w))
        .collect();
    if !mixture_reproduces(model, &weights)? {
        return Err(Error::Internal("affine decomposition failed substitution check".into()));
    }
    Ok(weights)
}

/// Whether any weight is negative.
pub fn has_negative_weight(weights: &BTreeMap<Assignment, Rational>) -> bool {
    weights.values().any(|w| w.is_negative())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::catalog;
    use crate::rational::ratio;

    #[test]
    fn chsh_is_contextual_but_not_logically() {
        let r = classify(&catalog::chsh_model(), DEFAULT_BUDGET).unwrap();
        assert!(r.probabilistically_contextual);
        assert!(!r.logically_contextual);
        assert!(!r.strongly_contextual);
        assert_eq!(r.witness, None);
    }

    #[test]
    fn all_correlated_table_is_noncontextual() {
        let m = catalog::chsh_model_all_correlated();
        let NonContextuality::NonContextual(w) = is_noncontextual(&m, DEFAULT_BUDGET).unwrap() else {
            panic!("expected a global distribution");
        };
        assert!(mixture_reproduces(&m, &w).unwrap());
    }

    #[test]
    fn pr_and_triangle_are_strongly_contextual() {
        for m in [catalog::pr_model(), catalog::triangle_model()] {
            let r = classify(&m, DEFAULT_BUDGET).unwrap();
            assert!(r.probabilistically_contextual && r.logically_contextual && r.strongly_contextual);
            assert!(global_support(&m.collapse(), DEFAULT_BUDGET)
                .unwrap()
                .assignments
                .is_empty());
            // First facet, first supported outcome.
            let Some(Witness::NonExtendable { facet, assignment }) = r.witness else {
                panic!("missing witness");
            };
            assert_eq!(facet, 0);
            let first = *m.collapse().supports()[0].iter().next().unwrap();
            let sc = m.scenario();
            assert_eq!(sc.events(&sc.facets()[0]).rank_of(&assignment), first);
        }
    }

    #[test]
    fn deterministic_models_are_noncontextual() {
        let sq = Arc::new(catalog::square());
        let all = sq.events(&sq.all_measurements());
        for rank in [0, 5, 15] {
            let s = all.assignment_at(rank);
            let d = EmpiricalModel::deterministic(sq.clone(), &s).unwrap();
            assert_eq!(
                is_noncontextual(&d, DEFAULT_BUDGET).unwrap(),
                NonContextuality::NonContextual(BTreeMap::from([(s.clone(), one())]))
            );
            let gs = global_support(&d.collapse(), DEFAULT_BUDGET).unwrap();
            assert_eq!(gs.assignments, vec![s.clone()]);
            let r = classify(&d, DEFAULT_BUDGET).unwrap();
            assert!(!r.probabilistically_contextual);
            // Signed decompositions are not unique; only reproduction is.
            let w = affine_decomposition(&d, DEFAULT_BUDGET).unwrap();
            assert!(mixture_reproduces(&d, &w).unwrap());
        }
    }

    #[test]
    fn uniform_mixture_on_square_is_noncontextual() {
        let sq = Arc::new(catalog::square());
        let all = sq.events(&sq.all_measurements());
        let deltas: Vec<EmpiricalModel> = (0..16)
            .map(|r| EmpiricalModel::deterministic(sq.clone(), &all.assignment_at(r)).unwrap())
            .collect();
        let terms: Vec<(Rational, &EmpiricalModel)> = deltas.iter().map(|d| (ratio(1, 16), d)).collect();
        let u = EmpiricalModel::convex_combine(&terms).unwrap();
        assert!(!is_noncontextual(&u, DEFAULT_BUDGET).unwrap().is_contextual());
    }

    #[test]
    fn affine_decompositions() {
        let chsh = catalog::chsh_model();
        let w = affine_decomposition(&chsh, DEFAULT_BUDGET).unwrap();
        assert!(mixture_reproduces(&chsh, &w).unwrap());
        let pr = catalog::pr_model();
        let w = affine_decomposition(&pr, DEFAULT_BUDGET).unwrap();
        assert!(mixture_reproduces(&pr, &w).unwrap());
        assert!(has_negative_weight(&w));
    }

    #[test]
    fn budget_is_enforced() {
        let chsh = catalog::chsh_model();
        assert_eq!(
            is_noncontextual(&chsh, 15),
            Err(Error::BudgetExceeded { needed: 16, budget: 15 })
        );
        assert!(matches!(
            affine_decomposition(&chsh, 4),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn single_facet_models_are_noncontextual() {
        let sq = catalog::square();
        let pr = catalog::pr_model();
        for facet in sq.facets() {
            let restricted = Arc::new(sq.restrict_to(facet).unwrap());
            let dist = pr.marginal(facet).unwrap();
            let ctx: Vec<usize> = (0..facet.len()).collect();
            let m = EmpiricalModel::from_distributions(
                restricted,
                vec![crate::model::Distribution {
                    context: ctx,
                    weights: dist.weights,
                }],
            )
            .unwrap();
            assert!(!is_noncontextual(&m, DEFAULT_BUDGET).unwrap().is_contextual());
        }
    }

    #[test]
    fn pr_plus_noise_regression() {
        // ½·PR + ½·uniform: correlators 1/2 on three edges and −1/2 on the
        // fourth, saturating the CHSH bound of 2, hence non-contextual.
        let pr = catalog::pr_model();
        let sq = pr.scenario().clone();
        let all = sq.events(&sq.all_measurements());
        let deltas: Vec<EmpiricalModel> = (0..16)
            .map(|r| EmpiricalModel::deterministic(sq.clone(), &all.assignment_at(r)).unwrap())
            .collect();
        let terms: Vec<(Rational, &EmpiricalModel)> = deltas.iter().map(|d| (ratio(1, 16), d)).collect();
        let uniform = EmpiricalModel::convex_combine(&terms).unwrap();
        let mix = EmpiricalModel::convex_combine(&[(ratio(1, 2), &pr), (ratio(1, 2), &uniform)]).unwrap();
        let r = classify(&mix, DEFAULT_BUDGET).unwrap();
        assert!(!r.probabilistically_contextual);
        // Slightly more PR weight crosses the bound.
        let mix = EmpiricalModel::convex_combine(&[(ratio(5, 8), &pr), (ratio(3, 8), &uniform)]).unwrap();
        let r = classify(&mix, DEFAULT_BUDGET).unwrap();
        assert!(r.probabilistically_contextual);
        assert!(!r.logically_contextual);
    }
}
