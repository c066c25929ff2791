//! Algebraic laws on random models, procedures, tables and predicates.
//! Each law takes a seed and is driven by a property-testing runner.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::seq::SliceRandom;
use rand::Rng;

use super::*;
use sheafctx::contextuality::{classify, DEFAULT_BUDGET};
use sheafctx::games::{predicate_leq, PossibilisticPredicate};
use sheafctx::model::{combine_facetwise, EmpiricalModel, PossibilisticModel};
use sheafctx::procedure::{least_subset, DeterministicProcedure, ProbabilisticProcedure};
use sheafctx::rational::{int, ratio, Rational};
use sheafctx::scenario::{Assignment, Scenario};

pub const CASES: u32 = 1000;

pub type Law = fn(u64) -> Result<(), TestCaseError>;

pub const ALL: [(&str, Law); 8] = [
    ("no-signalling of accepted models", accepted_models_are_no_signalling),
    ("hierarchy monotonicity", hierarchy_is_monotone),
    ("convexity", pushforward_is_convex),
    ("affine preservation", pushforward_is_affine),
    ("functoriality", pushforward_is_functorial),
    ("collapse naturality", collapse_is_natural),
    ("least subset minimality and union", least_subset_laws),
    ("predicate_leq preorder", predicate_order_is_a_preorder),
];

fn scenarios() -> Vec<Arc<Scenario>> {
    vec![triangle(), square(), dice(2), dice(3)]
}

fn pick(rng: &mut rand_chacha::ChaCha8Rng) -> Arc<Scenario> {
    scenarios().choose(rng).unwrap().clone()
}

fn same_facetwise(a: &EmpiricalModel, terms: &[(Rational, &EmpiricalModel)]) -> bool {
    combine_facetwise(a.scenario(), terms) == a.distributions()
}

/// The constructor accepts a facet table exactly when it is normalised,
/// non-negative and no-signalling.
pub fn accepted_models_are_no_signalling(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rng(seed);
    let s = if rng.gen_bool(0.5) { triangle() } else { square() };
    let e = random_model(&mut rng, &s);
    let mut tables: Vec<BTreeMap<Vec<usize>, Rational>> = Vec::new();
    for d in e.distributions() {
        let space = s.events(&d.context);
        tables.push(d.weights.iter().map(|(&r, p)| (space.unrank(r), p.clone())).collect());
    }
    prop_assert!(no_signalling_oracle(&s, &tables));

    // Move mass between two joint outcomes of one facet.
    let k = rng.gen_range(0..tables.len());
    let n = s.events(&s.facets()[k]).size();
    let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
    let delta = ratio(rng.gen_range(1..4), 8);
    let space = s.events(&s.facets()[k]);
    let (va, vb) = (space.unrank(a), space.unrank(b));
    *tables[k].entry(va).or_default() += &delta;
    *tables[k].entry(vb).or_default() -= &delta;
    let nonneg = tables[k].values().all(|p| *p >= int(0));
    let expected = nonneg && no_signalling_oracle(&s, &tables);

    let raw = s
        .facets()
        .iter()
        .zip(&tables)
        .map(|(f, t)| {
            let space = s.events(f);
            let w = t
                .iter()
                .map(|(v, p)| (space.assignment(v.clone()), p.clone()))
                .collect();
            (f.clone(), w)
        })
        .collect();
    prop_assert_eq!(EmpiricalModel::new(s.clone(), raw).is_ok(), expected);
    Ok(())
}

/// strong ⇒ logical ⇒ probabilistic, with the possibilistic levels
/// matching exhaustive search.
pub fn hierarchy_is_monotone(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rng(seed);
    let s = pick(&mut rng);
    let e = random_model(&mut rng, &s);
    let r = classify(&e, DEFAULT_BUDGET).unwrap();
    prop_assert!(!r.strongly_contextual || r.logically_contextual);
    prop_assert!(!r.logically_contextual || r.probabilistically_contextual);
    let (logical, strong) = logical_oracle(&e.collapse());
    prop_assert_eq!(r.logically_contextual, logical);
    prop_assert_eq!(r.strongly_contextual, strong);
    Ok(())
}

/// Pushforward preserves convex combinations, in the model and in the
/// procedure.
pub fn pushforward_is_convex(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rng(seed);
    let (s, t) = (pick(&mut rng), pick(&mut rng));
    let (a, b) = (random_model(&mut rng, &s), random_model(&mut rng, &s));
    let l = ratio(rng.gen_range(0..=8), 8);
    let m = int(1) - &l;
    let f = random_mixture(&mut rng, &s, &t);
    let mix = EmpiricalModel::convex_combine(&[(l.clone(), &a), (m.clone(), &b)]).unwrap();
    let (fa, fb) = (f.pushforward(&a).unwrap(), f.pushforward(&b).unwrap());
    prop_assert!(same_facetwise(
        &f.pushforward(&mix).unwrap(),
        &[(l.clone(), &fa), (m.clone(), &fb)]
    ));

    let g = random_mixture(&mut rng, &s, &t);
    if l > int(0) && m > int(0) {
        let mut comps: Vec<_> = f.components().iter().map(|(w, h)| (w * &l, h.clone())).collect();
        comps.extend(g.components().iter().map(|(w, h)| (w * &m, h.clone())));
        let fg = ProbabilisticProcedure::new(comps).unwrap();
        let ga = g.pushforward(&a).unwrap();
        prop_assert!(same_facetwise(&fg.pushforward(&a).unwrap(), &[(l, &fa), (m, &ga)]));
    }
    Ok(())
}

/// Pushforward preserves affine combinations with negative coefficients:
/// with `c = ½a + ½b`, `f(a) = 2 f(c) − f(b)`.
pub fn pushforward_is_affine(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rng(seed);
    let (s, t) = (pick(&mut rng), pick(&mut rng));
    let (a, b) = (random_model(&mut rng, &s), random_model(&mut rng, &s));
    let c = EmpiricalModel::convex_combine(&[(ratio(1, 2), &a), (ratio(1, 2), &b)]).unwrap();
    prop_assert!(same_facetwise(&a, &[(int(2), &c), (int(-1), &b)]));
    let f = random_mixture(&mut rng, &s, &t);
    let (fa, fb, fc) = (
        f.pushforward(&a).unwrap(),
        f.pushforward(&b).unwrap(),
        f.pushforward(&c).unwrap(),
    );
    prop_assert!(same_facetwise(&fa, &[(int(2), &fc), (int(-1), &fb)]));
    Ok(())
}

/// `(g ∘ f)_* = g_* ∘ f_*`, identities push forward trivially, and
/// composition is associative up to canonicalisation.
pub fn pushforward_is_functorial(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rng(seed);
    let (s, t, u) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
    let e = random_model(&mut rng, &s);
    let f = random_procedure(&mut rng, &s, &t);
    let g = random_procedure(&mut rng, &t, &u);
    let gf = f.then(&g).unwrap();
    prop_assert_eq!(
        gf.pushforward(&e).unwrap(),
        g.pushforward(&f.pushforward(&e).unwrap()).unwrap()
    );
    prop_assert_eq!(
        DeterministicProcedure::identity(s.clone()).pushforward(&e).unwrap(),
        e.clone()
    );

    let h = random_procedure(&mut rng, &u, &s);
    let left = f.then(&g).unwrap().then(&h).unwrap().canonicalize();
    let right = f.then(&g.then(&h).unwrap()).unwrap().canonicalize();
    prop_assert_eq!(left, right);

    let pf = random_mixture(&mut rng, &s, &t);
    let pg = random_mixture(&mut rng, &t, &u);
    let pgf = pf.then(&pg).unwrap();
    prop_assert_eq!(
        pgf.pushforward(&e).unwrap(),
        pg.pushforward(&pf.pushforward(&e).unwrap()).unwrap()
    );
    Ok(())
}

/// Collapsing commutes with pushforward: `supp(f_* e) = supp(f)_*(supp e)`.
pub fn collapse_is_natural(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rng(seed);
    let (s, t) = (pick(&mut rng), pick(&mut rng));
    let e = random_model(&mut rng, &s);
    let f = random_mixture(&mut rng, &s, &t);
    prop_assert_eq!(
        f.pushforward(&e).unwrap().collapse(),
        f.support().pushforward(&e.collapse()).unwrap()
    );
    Ok(())
}

/// The least subset is the intersection of all factoring subsets, and
/// the least subset of a tuple is the union of the least subsets.
pub fn least_subset_laws(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rng(seed);
    let s = random_product_scenario(&mut rng);
    let f1 = random_table(&mut rng, &s);
    let f2 = random_table(&mut rng, &s);
    let u1 = least_subset(&s, &f1, DEFAULT_BUDGET).unwrap();
    prop_assert_eq!(&u1, &least_factoring_subset(&s, &f1));
    for m in &u1 {
        let smaller: Vec<usize> = u1.iter().copied().filter(|x| x != m).collect();
        prop_assert!(!factors_through(&s, &f1, &smaller));
    }
    let u2 = least_subset(&s, &f2, DEFAULT_BUDGET).unwrap();
    let tuple: Vec<(usize, usize)> = f1.iter().copied().zip(f2.iter().copied()).collect();
    let u: BTreeSet<usize> = u1.iter().chain(&u2).copied().collect();
    prop_assert_eq!(
        least_subset(&s, &tuple, DEFAULT_BUDGET).unwrap(),
        u.into_iter().collect::<Vec<_>>()
    );
    Ok(())
}

/// `predicate_leq` agrees with quantifying over every possibilistic
/// model, and is reflexive and transitive.
pub fn predicate_order_is_a_preorder(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = rng(seed);
    let s = triangle();
    let g = random_predicate(&mut rng, &s, None);
    let h = random_predicate(&mut rng, &s, Some(&g));
    let k = random_predicate(&mut rng, &s, Some(&h));
    prop_assert!(predicate_leq(&g, &g, DEFAULT_BUDGET).unwrap());
    let gh = predicate_leq(&g, &h, DEFAULT_BUDGET).unwrap();
    let hk = predicate_leq(&h, &k, DEFAULT_BUDGET).unwrap();
    let gk = predicate_leq(&g, &k, DEFAULT_BUDGET).unwrap();
    prop_assert_eq!(gh, leq_oracle(&g, &h));
    prop_assert_eq!(hk, leq_oracle(&h, &k));
    prop_assert_eq!(gk, leq_oracle(&g, &k));
    prop_assert!(!(gh && hk) || gk);
    Ok(())
}

fn random_product_scenario(rng: &mut rand_chacha::ChaCha8Rng) -> Scenario {
    let n = rng.gen_range(1..=5);
    let ms: Vec<(String, Vec<String>)> = (0..n)
        .map(|i| {
            let k = rng.gen_range(1..=3);
            (format!("m{i}"), (0..k).map(|o| o.to_string()).collect())
        })
        .collect();
    let ids: Vec<String> = ms.iter().map(|(id, _)| id.clone()).collect();
    Scenario::new(ms, vec![ids]).unwrap()
}

/// A random function of a random subset of the measurements.
fn random_table(rng: &mut rand_chacha::ChaCha8Rng, s: &Scenario) -> Vec<usize> {
    let n = s.measurement_count();
    let v: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    let mut memo: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let values = rng.gen_range(1..=3);
    global_assignments(s)
        .iter()
        .map(|g| {
            let key: Vec<usize> = v.iter().map(|&m| g.values[m]).collect();
            *memo.entry(key).or_insert_with(|| rng.gen_range(0..values))
        })
        .collect()
}

fn factors_through(s: &Scenario, table: &[usize], u: &[usize]) -> bool {
    let globals = global_assignments(s);
    let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    globals.iter().zip(table).all(|(g, &v)| {
        let key: Vec<usize> = u.iter().map(|&m| g.values[m]).collect();
        *seen.entry(key).or_insert(v) == v
    })
}

fn least_factoring_subset(s: &Scenario, table: &[usize]) -> Vec<usize> {
    let n = s.measurement_count();
    let mut least: Vec<usize> = (0..n).collect();
    for mask in 0..1usize << n {
        let u: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if factors_through(s, table, &u) {
            least.retain(|m| u.contains(m));
        }
    }
    least
}

/// A random conjunction of per-face accept sets; with `weaker_than`, each
/// component of it is kept with its accept set enlarged, or dropped.
fn random_predicate(
    rng: &mut rand_chacha::ChaCha8Rng,
    s: &Arc<Scenario>,
    weaker_than: Option<&PossibilisticPredicate>,
) -> PossibilisticPredicate {
    let faces: Vec<_> = s.faces().into_iter().filter(|f| !f.is_empty()).collect();
    let mut comps = Vec::new();
    if let Some(base) = weaker_than.filter(|_| rng.gen_bool(0.7)) {
        for (sigma, accept) in base.components() {
            if rng.gen_bool(0.2) {
                continue;
            }
            let n = s.events(sigma).size();
            let mut accept = accept.clone();
            accept.extend((0..n).filter(|_| rng.gen_bool(0.2)));
            comps.push((sigma.clone(), accept));
        }
    }
    while comps.is_empty() || rng.gen_bool(0.3) {
        let sigma = faces.choose(rng).unwrap().clone();
        let n = s.events(&sigma).size();
        let accept: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        comps.push((sigma, accept));
    }
    PossibilisticPredicate::new(s.clone(), comps).unwrap()
}

fn models() -> &'static [PossibilisticModel] {
    static MODELS: OnceLock<Vec<PossibilisticModel>> = OnceLock::new();
    MODELS.get_or_init(|| all_possibilistic_models(&triangle()))
}

fn satisfies_oracle(m: &PossibilisticModel, g: &PossibilisticPredicate) -> bool {
    let s = m.scenario();
    g.components().iter().all(|(sigma, accept)| {
        let space = s.events(sigma);
        support_at(m, sigma).into_iter().all(|v| {
            accept.contains(&space.rank_of(&Assignment {
                domain: sigma.clone(),
                values: v,
            }))
        })
    })
}

fn leq_oracle(g: &PossibilisticPredicate, h: &PossibilisticPredicate) -> bool {
    models()
        .iter()
        .all(|m| !satisfies_oracle(m, g) || satisfies_oracle(m, h))
}
