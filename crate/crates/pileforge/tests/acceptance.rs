//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its counts. Run with `cargo test --test acceptance -- --nocapture`.

use pileforge::colang::{cosatisfies, random_sentence, Assignment};
use pileforge::embedding::{
    check_ls_limited, dominate, ebounded_ep_corpus, quotient_ep, quotient_ep_corpus,
    rigid_product, verify_domination, EmbeddingProblem,
};
use pileforge::group::{self, lift_generators, minimal_generating_set, rank};
use pileforge::isystem::{encode, frobenius_system};
use pileforge::measure::{
    cubic_scenario, exact_measure, holds_in_fixed_field, monte_carlo, quadratic_scenario,
    GaloisScenario, TestSentence,
};
use pileforge::pile::{conjugation_closed_families, deficient_pile_corpus, GroupPile, PileHom};
use pileforge::ringc::{compile, eval_ring, eval_ring_limited, EvalMode, FiniteFieldModel};
use pileforge::{catalog, Error, Subgroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeSet;

const LIMIT: u64 = 2_000_000;

/// Criterion 1: decode(encode(p)) is pile-isomorphic to p for every
/// deficient catalog pile over at most two labels, capped at 500 piles.
#[test]
fn criterion_1_roundtrip_equivalence() {
    let groups = catalog::catalog_upto(12);
    // per-group pile streams, drawn round-robin so every group contributes
    // before the cap closes the corpus
    let mut streams: Vec<Vec<GroupPile>> = Vec::new();
    for g in &groups {
        let families = conjugation_closed_families(g, 2).unwrap();
        let mut stream = Vec::new();
        for f1 in &families {
            stream.push(
                GroupPile::new(
                    g.clone(),
                    [Subgroup::trivial()],
                    [("p".to_string(), f1.iter().cloned().collect::<Vec<_>>())],
                )
                .unwrap(),
            );
            for f2 in families.iter().take(3) {
                stream.push(
                    GroupPile::new(
                        g.clone(),
                        [Subgroup::trivial()],
                        [
                            ("p".to_string(), f1.iter().cloned().collect::<Vec<_>>()),
                            ("q".to_string(), f2.iter().cloned().collect::<Vec<_>>()),
                        ],
                    )
                    .unwrap(),
                );
            }
        }
        streams.push(stream);
    }
    let mut piles: Vec<GroupPile> = Vec::new();
    let mut depth = 0;
    while piles.len() < 500 {
        let mut drained = true;
        for stream in &streams {
            if let Some(pile) = stream.get(depth) {
                piles.push(pile.clone());
                drained = false;
                if piles.len() >= 500 {
                    break;
                }
            }
        }
        if drained {
            break;
        }
        depth += 1;
    }
    let mut checked = 0;
    for pile in &piles {
        let sys = encode(pile).unwrap();
        assert!(sys.validate_axioms().is_empty(), "encode output invalid for {pile:?}");
        let decoded = sys.decode().unwrap();
        assert!(decoded.is_isomorphic_to(pile), "round trip failed for {pile:?}");
        checked += 1;
    }
    assert!(checked >= 300);
    println!("criterion 1: PASS: {checked} piles round-tripped exactly");
}

fn rigid_deficient_corpus(min: usize) -> Vec<EmbeddingProblem> {
    let groups = catalog::catalog_upto(8);
    let piles1 = deficient_pile_corpus(&groups, &["p"], 2, 400);
    let piles2 = deficient_pile_corpus(&groups, &["p", "q"], 1, 200);
    let mut eps = quotient_ep_corpus(&piles1, true, min);
    if eps.len() < min {
        eps.extend(quotient_ep_corpus(&piles2, true, min - eps.len()));
    }
    eps
}

/// Criterion 2: every generated rigid deficient finite embedding problem is
/// locally solvable.
#[test]
fn criterion_2_rigid_implies_locally_solvable() {
    let eps = rigid_deficient_corpus(1000);
    assert!(eps.len() >= 1000, "only {} problems generated", eps.len());
    for ep in &eps {
        assert!(ep.is_rigid() && ep.is_deficient());
        let report = check_ls_limited(ep, LIMIT).unwrap();
        assert!(report.holds, "LS failed on {ep:?}");
        // rigidity gives the prime-label half of (LS) in both directions
        for w in &report.witnesses {
            if w.label != "0" {
                assert!(w.matched.is_some());
            }
        }
    }
    println!(
        "criterion 2: PASS: {} rigid deficient problems, all locally solvable",
        eps.len()
    );
}

fn locally_solvable_deficient_corpus(min: usize) -> Vec<EmbeddingProblem> {
    let groups = catalog::catalog_upto(8);
    let piles = deficient_pile_corpus(&groups, &["p"], 2, 300);
    let mut out = Vec::new();
    for ep in quotient_ep_corpus(&piles, false, min * 3) {
        if check_ls_limited(&ep, LIMIT).unwrap().holds {
            out.push(ep);
            if out.len() >= min {
                break;
            }
        }
    }
    out
}

/// Criterion 3: the rigid product of a locally solvable finite deficient
/// problem has epimorphic projections with the second one rigid.
#[test]
fn criterion_3_rigid_product_contract() {
    let eps = locally_solvable_deficient_corpus(200);
    assert!(eps.len() >= 200, "only {} problems generated", eps.len());
    for ep in &eps {
        let b_def = ep.b().deficient_reduct();
        let a_def = ep.a().deficient_reduct();
        let g_def = ep.g().deficient_reduct();
        let alpha =
            PileHom::new(b_def.clone(), a_def.clone(), ep.alpha().underlying().clone()).unwrap();
        let phi =
            PileHom::new(g_def.clone(), a_def.clone(), ep.phi().underlying().clone()).unwrap();
        let (_, pi, beta) =
            rigid_product(&b_def, &a_def, &g_def, &alpha, &phi, LIMIT).unwrap();
        assert!(pi.is_pile_epi(), "pi not epi for {ep:?}");
        assert!(beta.is_pile_epi(), "beta not epi for {ep:?}");
        assert!(beta.is_rigid(), "beta not rigid for {ep:?}");
    }
    println!("criterion 3: PASS: {} rigid products verified", eps.len());
}

/// Criterion 4: domination of locally solvable e-bounded problems by rigid
/// e-bounded ones, for e in {0, 1, 2}.
#[test]
fn criterion_4_domination_contract() {
    let groups = catalog::catalog_upto(8);
    let piles = deficient_pile_corpus(&groups, &["p"], 1, 120);
    let mut total = 0;
    for e in [0usize, 1, 2] {
        let eps = ebounded_ep_corpus(&piles, e, 25);
        for ep in &eps {
            assert!(ep.is_e_bounded(e) && ep.g().is_e_bounded(e));
            let d = dominate(ep, e, LIMIT).unwrap();
            assert!(verify_domination(ep, &d, e), "domination contract failed at e={e}");
            total += 1;
        }
    }
    assert!(total >= 50, "only {total} dominations");
    println!("criterion 4: PASS: {total} dominations verified across e in {{0,1,2}}");
}

/// Criterion 5: local solvability survives every quotient of B.
#[test]
fn criterion_5_quotient_preserves_ls() {
    let eps = locally_solvable_deficient_corpus(60);
    let mut quotients = 0;
    for ep in &eps {
        for n in group::normal_subgroups(ep.b().group()).unwrap() {
            let q = quotient_ep(ep, &n).unwrap();
            assert!(
                check_ls_limited(&q, LIMIT).unwrap().holds,
                "LS lost after quotient by {n:?} of {ep:?}"
            );
            quotients += 1;
        }
    }
    assert!(quotients >= 100);
    println!(
        "criterion 5: PASS: {} base problems, {quotients} quotient problems, all locally solvable",
        eps.len()
    );
}

/// Criterion 6: the compiled ring formula agrees with the inverse-system
/// semantics over F2, F3, F5 on a generated corpus (rank bounds <= 2 plus a
/// bound-3 slice), and brute agrees with guided on the F2 / bound-2 slice
/// within its capacity.
#[test]
fn criterion_6_compiler_differential() {
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    let mut corpus = Vec::new();
    while corpus.len() < 300 {
        let f = random_sentence(&mut rng, 2, 3, &[]);
        corpus.push(f);
    }
    while corpus.len() < 360 {
        let f = random_sentence(&mut rng, 3, 2, &[]);
        corpus.push(f);
    }
    let models: Vec<FiniteFieldModel> = [2u64, 3, 5]
        .iter()
        .map(|&q| FiniteFieldModel::new(q, 3).unwrap())
        .collect();
    let sys2 = frobenius_system(2);
    let sys3 = frobenius_system(3);
    let mut brute_checked = 0;
    let mut brute_skipped = 0;
    for (i, f) in corpus.iter().enumerate() {
        let bound = f.max_bound().max(1);
        let sys = if bound <= 2 { &sys2 } else { &sys3 };
        let want = cosatisfies(sys, f, &Assignment::new()).unwrap();
        let prog = compile(f, &[]).unwrap();
        for model in &models {
            let got = eval_ring(&prog, model, EvalMode::Guided).unwrap();
            assert_eq!(
                got,
                want,
                "#{i} {f} disagrees over F_{}",
                model.characteristic()
            );
        }
        if bound <= 2 {
            match eval_ring_limited(&prog, &models[0], EvalMode::Brute, 1 << 14) {
                Ok(brute) => {
                    assert_eq!(brute, want, "#{i} {f}: brute disagrees over F_2");
                    brute_checked += 1;
                }
                Err(Error::Capacity { .. }) => brute_skipped += 1,
                Err(other) => panic!("#{i} {f}: {other}"),
            }
        }
    }
    assert!(brute_checked >= 30, "brute slice too small: {brute_checked}");
    println!(
        "criterion 6: PASS: {} formulas agree over F2/F3/F5; brute slice {} checked, {} beyond capacity",
        corpus.len(),
        brute_checked,
        brute_skipped
    );
}

/// Criterion 7: exact measures of the quadratic and cubic scenarios, with
/// values confirmed by an independent tuple enumerator.
#[test]
fn criterion_7_measure_exactness() {
    // independent oracle: direct tuple enumeration against the definitions
    fn oracle(sentence: &TestSentence, sc: &GaloisScenario) -> (u64, u64) {
        let order = sc.group().order();
        let total = order.pow(sc.e() as u32);
        let mut hits = 0;
        for idx in 0..total {
            let mut tau = Vec::with_capacity(sc.e());
            let mut v = idx;
            for _ in 0..sc.e() {
                tau.push(v % order);
                v /= order;
            }
            if holds_in_fixed_field(&tau, sentence, sc) {
                hits += 1;
            }
        }
        (hits as u64, total as u64)
    }

    let f = TestSentence::exists("f");
    let quad = quadratic_scenario(1);
    assert_eq!(oracle(&f, &quad), (1, 2));
    let m = exact_measure(&f, &quad).unwrap();
    assert_eq!(m.to_string(), "1/2");

    let cubic = cubic_scenario(1);
    assert_eq!(oracle(&f, &cubic), (4, 6));
    let m = exact_measure(&f, &cubic).unwrap();
    assert_eq!(m.to_string(), "2/3");
    println!("criterion 7: PASS: quadratic 1/2 and cubic 2/3, both oracle-confirmed");
}

fn random_scenario(rng: &mut ChaCha12Rng) -> GaloisScenario {
    // a random catalog group acting on the left cosets of two random
    // subgroups; each coset space is one orbit block, so it is invariant
    // and serves as the root set of one polynomial
    let groups = catalog::catalog_upto(8);
    let g = groups[rng.gen_range(0..groups.len())].clone();
    let n = g.order();
    let subs = group::subgroups(&g).unwrap();
    let mut roots: Vec<String> = Vec::new();
    let mut action: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut polys = std::collections::BTreeMap::new();
    for (name, h) in [
        ("f", &subs[rng.gen_range(0..subs.len())]),
        ("g", &subs[rng.gen_range(0..subs.len())]),
    ] {
        // left cosets of h, indexed by discovery over ascending elements
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for x in 0..n {
            if coset_of[x] != usize::MAX {
                continue;
            }
            for &s in h.elements() {
                coset_of[g.mul(x, s)] = reps.len();
            }
            reps.push(x);
        }
        let offset = roots.len();
        let block: BTreeSet<usize> = (0..reps.len()).map(|c| offset + c).collect();
        for c in 0..reps.len() {
            roots.push(format!("{name}{c}"));
        }
        for a in 0..n {
            for c in 0..reps.len() {
                action[a].push(offset + coset_of[g.mul(a, reps[c])]);
            }
        }
        polys.insert(name.to_string(), block);
    }
    GaloisScenario::new(
        g,
        roots,
        action,
        polys,
        ["f".to_string(), "g".to_string()].into_iter().collect(),
        1 + rng.gen_range(0..2),
    )
    .unwrap()
}

fn random_test_sentence(rng: &mut ChaCha12Rng, depth: usize) -> TestSentence {
    if depth == 0 || rng.gen_bool(0.4) {
        let name = if rng.gen_bool(0.7) { "f" } else { "g" };
        return TestSentence::exists(name);
    }
    match rng.gen_range(0..3) {
        0 => random_test_sentence(rng, depth - 1).not(),
        1 => random_test_sentence(rng, depth - 1).and(random_test_sentence(rng, depth - 1)),
        _ => random_test_sentence(rng, depth - 1).or(random_test_sentence(rng, depth - 1)),
    }
}

/// Criterion 8: Monte-Carlo estimates land within four standard errors of
/// the exact value in at least 19 of 20 seeded trials.
#[test]
fn criterion_8_monte_carlo_consistency() {
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    let mut within = 0;
    let trials = 20;
    for t in 0..trials {
        let sc = random_scenario(&mut rng);
        let sentence = random_test_sentence(&mut rng, 3);
        let exact = exact_measure(&sentence, &sc).unwrap().as_f64();
        let est = monte_carlo(&sentence, &sc, 100_000, 1000 + t).unwrap();
        let tolerance = 4.0 * est.stderr;
        if (est.mean - exact).abs() <= tolerance.max(1e-12) {
            within += 1;
        }
    }
    assert!(within >= 19, "only {within}/{trials} within 4 stderr");
    println!("criterion 8: PASS: {within}/{trials} Monte-Carlo runs within 4 standard errors");
}

/// Criterion 9: the constructive generator lift satisfies both
/// postconditions on every catalog instance meeting the preconditions.
#[test]
fn criterion_9_gaschuetz_lift() {
    let mut instances = 0;
    for g in catalog::catalog_upto(12) {
        let normals = group::normal_subgroups(&g).unwrap();
        for k in &normals {
            let (h, pi) = group::quotient(&g, k).unwrap();
            for n in &normals {
                let (q, _) = group::quotient(&g, n).unwrap();
                let e = rank(&q);
                if e > 3 {
                    continue;
                }
                // h-tuple: minimal generators of H padded to length e
                let mut hs: Vec<usize> = minimal_generating_set(&h);
                if hs.len() > e {
                    continue;
                }
                while hs.len() < e {
                    hs.push(0);
                }
                let lifted = lift_generators(&pi, n, &hs).unwrap();
                // postconditions: G = <g, N> and pi(g_i) = h_i
                let mut gens = lifted.clone();
                gens.extend_from_slice(n.elements());
                assert_eq!(
                    group::generated(&g, &gens).len(),
                    g.order(),
                    "lift does not generate for {g:?}"
                );
                for (gi, hi) in lifted.iter().zip(&hs) {
                    assert_eq!(pi.apply(*gi), *hi);
                }
                instances += 1;
            }
        }
    }
    assert!(instances >= 500, "only {instances} instances");
    println!("criterion 9: PASS: {instances} lift instances, both postconditions hold");
}

/// Criterion 10: e-generatedness and e-boundedness pass to every quotient,
/// exhaustively over the catalog corpus.
#[test]
fn criterion_10_quotient_monotonicity() {
    let groups = catalog::catalog_upto(8);
    let mut piles = deficient_pile_corpus(&groups, &["p"], 2, 150);
    // include piles with nontrivial class 0 so e-boundedness is exercised
    for pile in deficient_pile_corpus(&groups, &["p"], 1, 60) {
        let grp = pile.group().clone();
        let derived = pile.derived_subgroup();
        if let Some(b0) = group::subgroups(&grp).unwrap().into_iter().find(|s| {
            s.rank_in(&grp) <= 2
                && group::generated_by_subgroups(&grp, &[s, &derived], &[]).len() == grp.order()
        }) {
            let upgraded = GroupPile::from_representatives(
                grp,
                b0,
                pile.families()
                    .iter()
                    .map(|(p, fam)| (p.clone(), fam.iter().cloned().collect::<Vec<_>>())),
            )
            .unwrap();
            piles.push(upgraded);
        }
    }
    let mut checked = 0;
    for pile in &piles {
        let flags = pile.classify(&[0, 1, 2]);
        for n in group::normal_subgroups(pile.group()).unwrap() {
            let (q, _) = pile.quotient(&n).unwrap();
            let q_flags = q.classify(&[0, 1, 2]);
            for e in [0usize, 1, 2] {
                if flags.e_generated[&e] {
                    assert!(
                        q_flags.e_generated[&e],
                        "e-generated lost at e={e}, N={n:?}, pile {pile:?}"
                    );
                }
                if flags.e_bounded[&e] {
                    assert!(
                        q_flags.e_bounded[&e],
                        "e-bounded lost at e={e}, N={n:?}, pile {pile:?}"
                    );
                }
            }
            checked += 1;
        }
    }
    assert!(checked >= 400);
    println!("criterion 10: PASS: {checked} pile/quotient pairs, monotone at e in {{0,1,2}}");
}
