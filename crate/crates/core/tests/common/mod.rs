//! Random generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod laws;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sheafctx::catalog;
use sheafctx::model::{Distribution, EmpiricalModel, PossibilisticModel};
use sheafctx::procedure::{DeterministicProcedure, ProbabilisticProcedure};
use sheafctx::rational::{ratio, Rational};
use sheafctx::scenario::{is_subset, Assignment, Scenario};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn triangle() -> Arc<Scenario> {
    Arc::new(catalog::triangle())
}

pub fn square() -> Arc<Scenario> {
    Arc::new(catalog::square())
}

pub fn dice(n: usize) -> Arc<Scenario> {
    Arc::new(Scenario::dice(n).unwrap())
}

pub fn global_assignments(s: &Scenario) -> Vec<Assignment> {
    let all = s.all_measurements();
    let space = s.events(&all);
    space.iter().map(|v| space.assignment(v)).collect()
}

/// On a cycle of binary measurements: each edge perfectly correlated or
/// anti-correlated with uniform marginals.
pub fn edge_box(s: &Arc<Scenario>, anti: &[bool]) -> EmpiricalModel {
    let dists = s
        .facets()
        .iter()
        .zip(anti)
        .map(|(f, &a)| {
            let space = s.events(f);
            let weights = space
                .iter()
                .enumerate()
                .filter(|(_, v)| (v[0] != v[1]) == a)
                .map(|(r, _)| (r, ratio(1, 2)))
                .collect();
            Distribution {
                context: f.clone(),
                weights,
            }
        })
        .collect();
    EmpiricalModel::from_distributions(s.clone(), dists).unwrap()
}

pub fn uniform(s: &Arc<Scenario>) -> EmpiricalModel {
    let all = global_assignments(s);
    let n = all.len() as i64;
    let deltas: Vec<_> = all
        .iter()
        .map(|g| EmpiricalModel::deterministic(s.clone(), g).unwrap())
        .collect();
    let terms: Vec<_> = deltas.iter().map(|d| (ratio(1, n), d)).collect();
    EmpiricalModel::convex_combine(&terms).unwrap()
}

fn random_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| ratio(w, total)).collect()
}

/// A random mixture of deterministic models, edge boxes (on cycles) and
/// uniform noise.
pub fn random_model(rng: &mut ChaCha8Rng, s: &Arc<Scenario>) -> EmpiricalModel {
    let globals = global_assignments(s);
    let is_cycle = s.facets().len() >= 3 && s.facets().iter().all(|f| f.len() == 2);
    let k = rng.gen_range(1..=4);
    let mut parts = Vec::new();
    for _ in 0..k {
        let pick = rng.gen_range(0..10);
        let part = if is_cycle && pick < 4 {
            let anti: Vec<bool> = (0..s.facets().len()).map(|_| rng.gen_bool(0.5)).collect();
            edge_box(s, &anti)
        } else if pick == 4 {
            uniform(s)
        } else {
            EmpiricalModel::deterministic(s.clone(), globals.choose(rng).unwrap()).unwrap()
        };
        parts.push(part);
    }
    let weights = random_weights(rng, k);
    let terms: Vec<_> = weights.into_iter().zip(parts.iter()).collect();
    EmpiricalModel::convex_combine(&terms).unwrap()
}

pub fn random_procedure(rng: &mut ChaCha8Rng, s: &Arc<Scenario>, t: &Arc<Scenario>) -> DeterministicProcedure {
    let faces = s.faces();
    for _ in 0..64 {
        let mut pi = Vec::new();
        let mut alpha = Vec::new();
        for x in 0..t.measurement_count() {
            let u = faces.choose(rng).unwrap().clone();
            let n = s.events(&u).size();
            alpha.push((0..n).map(|_| rng.gen_range(0..t.outcome_count(x))).collect());
            pi.push(u);
        }
        if let Ok(f) = DeterministicProcedure::new(s.clone(), t.clone(), pi, alpha) {
            return f;
        }
    }
    let pi = vec![Vec::new(); t.measurement_count()];
    let alpha = (0..t.measurement_count())
        .map(|x| vec![rng.gen_range(0..t.outcome_count(x))])
        .collect();
    DeterministicProcedure::new(s.clone(), t.clone(), pi, alpha).unwrap()
}

pub fn random_mixture(rng: &mut ChaCha8Rng, s: &Arc<Scenario>, t: &Arc<Scenario>) -> ProbabilisticProcedure {
    let k = rng.gen_range(1..=3);
    let weights = random_weights(rng, k);
    let comps = weights.into_iter().map(|w| (w, random_procedure(rng, s, t))).collect();
    ProbabilisticProcedure::new(comps).unwrap()
}

/// Supports on `sigma`, read off the first facet that contains it.
pub fn support_at(pm: &PossibilisticModel, sigma: &[usize]) -> BTreeSet<Vec<usize>> {
    let s = pm.scenario();
    let k = s.facets().iter().position(|f| is_subset(sigma, f)).unwrap();
    let space = s.events(&s.facets()[k]);
    pm.supports()[k]
        .iter()
        .map(|&r| space.assignment_at(r).restrict(sigma).unwrap().values)
        .collect()
}

/// Brute force: global assignments whose every facet restriction is possible.
pub fn consistent_globals(pm: &PossibilisticModel) -> Vec<Assignment> {
    let s = pm.scenario();
    global_assignments(s)
        .into_iter()
        .filter(|g| {
            s.facets().iter().zip(pm.supports()).all(|(f, sup)| {
                let space = s.events(f);
                sup.contains(&space.rank_of(&g.restrict(f).unwrap()))
            })
        })
        .collect()
}

/// (logically contextual, strongly contextual) by exhaustive search.
pub fn logical_oracle(pm: &PossibilisticModel) -> (bool, bool) {
    let s = pm.scenario();
    let globals = consistent_globals(pm);
    let mut logical = false;
    for (f, sup) in s.facets().iter().zip(pm.supports()) {
        let space = s.events(f);
        for &r in sup {
            let t = space.assignment_at(r);
            if !globals.iter().any(|g| g.restrict(f).unwrap() == t) {
                logical = true;
            }
        }
    }
    (logical, globals.is_empty())
}

/// Facet marginals on every pairwise overlap, summed by hand.
pub fn no_signalling_oracle(s: &Scenario, tables: &[BTreeMap<Vec<usize>, Rational>]) -> bool {
    let facets = s.facets();
    for i in 0..facets.len() {
        for j in 0..facets.len() {
            let overlap: Vec<usize> = facets[i].iter().copied().filter(|m| facets[j].contains(m)).collect();
            let marginal = |k: usize| {
                let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
                for (v, p) in &tables[k] {
                    let key: Vec<usize> = overlap
                        .iter()
                        .map(|m| v[facets[k].iter().position(|x| x == m).unwrap()])
                        .collect();
                    *out.entry(key).or_default() += p;
                }
                out.retain(|_, p| *p != Rational::from_integer(0.into()));
                out
            };
            if marginal(i) != marginal(j) {
                return false;
            }
        }
    }
    true
}

fn supports_compatible(s: &Scenario, supports: &[BTreeSet<usize>]) -> bool {
    let facets = s.facets();
    let project = |k: usize, overlap: &[usize]| -> BTreeSet<Vec<usize>> {
        let space = s.events(&facets[k]);
        supports[k]
            .iter()
            .map(|&r| space.assignment_at(r).restrict(overlap).unwrap().values)
            .collect()
    };
    (0..facets.len()).all(|i| {
        (0..facets.len()).all(|j| {
            let overlap: Vec<usize> = facets[i].iter().copied().filter(|m| facets[j].contains(m)).collect();
            project(i, &overlap) == project(j, &overlap)
        })
    })
}

/// Every possibilistic model on `s`, by filtering all support combinations.
pub fn all_possibilistic_models(s: &Arc<Scenario>) -> Vec<PossibilisticModel> {
    let sizes: Vec<usize> = s.facets().iter().map(|f| s.events(f).size()).collect();
    let mut out = Vec::new();
    let mut choice = vec![1usize; sizes.len()];
    loop {
        let supports: Vec<BTreeSet<usize>> = choice
            .iter()
            .zip(&sizes)
            .map(|(&mask, &n)| (0..n).filter(|b| mask >> b & 1 == 1).collect())
            .collect();
        if supports_compatible(s, &supports) {
            out.push(PossibilisticModel::from_supports(s.clone(), supports).unwrap());
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < 1 << sizes[k] {
                break;
            }
            choice[k] = 1;
            k += 1;
        }
    }
}
