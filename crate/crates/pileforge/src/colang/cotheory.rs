//! The bounded C-pile cotheory: axiom (1) instances assert that every small
//! quotient level is e-generated, axiom (2) instances assert that every
//! rigid epimorphism from a small e-generated deficient pile onto a level is
//! realized by a finer level.
//!
//! Quantification over piles "of order k" is realized finitely: one
//! cosentence per isomorphism class, matched inside the formula by pinning a
//! labeled copy of the pile (distinct elements exhausting one level, the
//! full product table, and the exact family pattern).

use super::CoFormula;
use crate::embedding::{solve_all_limited, EmbeddingProblem};
use crate::error::Result;
use crate::group::{self, Subgroup};
use crate::pile::{conjugation_closed_families, GroupPile, PileHom};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomKind {
    /// Quotients of index at most `n` are e-generated.
    EGeneratedAt { n: usize },
    /// Rigid epimorphisms from the pile class described by `b_desc` onto
    /// levels matching `a_desc` are realized by finer levels.
    RigidEpSolvableAt { n: usize, k: usize, a_desc: String, b_desc: String },
}

#[derive(Clone, Debug)]
pub struct CoTheoryAxiom {
    pub kind: AxiomKind,
    pub rendered: CoFormula,
}

fn pile_desc(pile: &GroupPile) -> String {
    format!(
        "order {} families {}",
        pile.group().order(),
        pile.families()
            .iter()
            .map(|(p, fam)| format!(
                "{p}:[{}]",
                fam.iter()
                    .map(|s| s.len().to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ))
            .collect::<Vec<_>>()
            .join(" ")
    )
}

/// All isomorphism classes of deficient piles over `labels` whose group
/// order is at most (`exact = false`) or exactly (`exact = true`) `order`,
/// in deterministic order. The family enumeration per group is capped by
/// `limit`; exceeding it is a capacity error since dropping families would
/// silently weaken the cotheory.
pub fn deficient_pile_types(
    labels: &[&str],
    order: usize,
    exact: bool,
    limit: u64,
) -> Result<Vec<GroupPile>> {
    let groups = crate::catalog::catalog_upto(order);
    let mut out: Vec<GroupPile> = Vec::new();
    for g in &groups {
        if exact && g.order() != order {
            continue;
        }
        let class_count = {
            let subs = group::subgroups(g)?;
            let mut seen: BTreeSet<Subgroup> = BTreeSet::new();
            let mut count = 0;
            for s in subs {
                if !seen.contains(&s) {
                    seen.extend(group::conjugates(g, &s));
                    count += 1;
                }
            }
            count
        };
        if (2u64.saturating_pow(class_count as u32)).saturating_pow(labels.len() as u32) > limit
        {
            return Err(crate::error::Error::capacity(
                format!(
                    "family enumeration over {} subgroup classes of a group of order {}",
                    class_count,
                    g.order()
                ),
                limit,
            ));
        }
        let families = conjugation_closed_families(g, class_count)?;
        // all assignments of a family to each label
        let mut assignments: Vec<Vec<BTreeSet<Subgroup>>> = vec![Vec::new()];
        for _ in labels {
            let mut next = Vec::new();
            for partial in &assignments {
                for fam in &families {
                    let mut ext = partial.clone();
                    ext.push(fam.clone());
                    next.push(ext);
                }
            }
            assignments = next;
        }
        for assign in assignments {
            let pile = GroupPile::new(
                g.clone(),
                std::iter::once(Subgroup::trivial()),
                labels
                    .iter()
                    .zip(&assign)
                    .map(|(p, fam)| ((*p).to_string(), fam.iter().cloned().collect::<Vec<_>>())),
            )?;
            if !out.iter().any(|q| q.is_isomorphic_to(&pile)) {
                out.push(pile);
            }
        }
    }
    Ok(out)
}

/// The labeled-copy conditions for `pile` on the variables `vars` (one per
/// group element, index-aligned), all quantified at bound `n`: pairwise
/// distinct, a single level exhausted at bound `n`, the full product table,
/// and the family pattern over every subgroup.
fn match_conditions(pile: &GroupPile, vars: &[String], n: usize) -> Result<Vec<CoFormula>> {
    let grp = pile.group();
    let m = grp.order();
    let mut parts = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            parts.push(CoFormula::Eq(vars[i].clone(), vars[j].clone()).not());
        }
    }
    for v in vars.iter().skip(1) {
        parts.push(CoFormula::Leq(vars[0].clone(), v.clone()));
        parts.push(CoFormula::Leq(v.clone(), vars[0].clone()));
    }
    for a in 0..m {
        for b in 0..m {
            parts.push(CoFormula::P(
                vars[a].clone(),
                vars[b].clone(),
                vars[grp.mul(a, b)].clone(),
            ));
        }
    }
    // level exhausted: every point at the level of vars[0] is one of them
    let w = format!("{}w", vars[0]);
    let in_level = CoFormula::Leq(w.clone(), vars[0].clone())
        .and(CoFormula::Leq(vars[0].clone(), w.clone()));
    let is_some_var = CoFormula::disj(
        vars.iter().map(|v| CoFormula::Eq(w.clone(), v.clone())).collect(),
    );
    parts.push(CoFormula::forall(w, n, in_level.implies(is_some_var)));
    // family pattern: positive atom for members, negated for the rest
    let tuple_for = |s: &Subgroup| -> Vec<String> {
        let mut args: Vec<String> =
            s.elements().iter().map(|&e| vars[e].clone()).collect();
        while args.len() < m {
            args.push(vars[s.elements()[0]].clone());
        }
        args
    };
    for s in group::subgroups(grp)? {
        for (p, fam) in pile.families() {
            let atom = CoFormula::Gpn(p.clone(), m, tuple_for(&s));
            if fam.contains(&s) {
                parts.push(atom);
            } else {
                parts.push(atom.not());
            }
        }
    }
    Ok(parts)
}

/// Renders the cotheory axioms for the bounds `n <= n_max`, `k <= k_max`
/// over the label set `labels`.
pub fn generate_tc(
    e: usize,
    n_max: usize,
    k_max: usize,
    labels: &[&str],
    limit: u64,
) -> Result<Vec<CoTheoryAxiom>> {
    let mut out = Vec::new();
    // axiom (1): every level of index <= n matches an e-generated type
    for n in 1..=n_max {
        let types: Vec<GroupPile> = deficient_pile_types(labels, n, false, limit)?
            .into_iter()
            .filter(|p| p.is_e_generated(e))
            .collect();
        let x = "x".to_string();
        let mut disjuncts = Vec::new();
        for pile in &types {
            let m = pile.group().order();
            let vars: Vec<String> = (0..m).map(|i| format!("u{i}")).collect();
            let mut parts = vec![
                CoFormula::Leq(x.clone(), vars[0].clone())
                    .and(CoFormula::Leq(vars[0].clone(), x.clone())),
            ];
            parts.extend(match_conditions(pile, &vars, n)?);
            let mut body = CoFormula::conj(parts);
            for v in vars.iter().rev() {
                body = CoFormula::exists(v.clone(), n, body);
            }
            disjuncts.push(body);
        }
        let rendered = CoFormula::forall(x, n, CoFormula::disj(disjuncts));
        out.push(CoTheoryAxiom { kind: AxiomKind::EGeneratedAt { n }, rendered });
    }
    // axiom (2): rigid epimorphisms onto levels are realized by finer levels
    for n in 1..=n_max {
        let a_types = deficient_pile_types(labels, n, false, limit)?;
        for k in 1..=k_max {
            let b_types: Vec<GroupPile> = deficient_pile_types(labels, k, true, limit)?
                .into_iter()
                .filter(|p| p.is_e_generated(e))
                .collect();
            for a_pile in &a_types {
                for b_pile in &b_types {
                    for alpha in rigid_epis_up_to_auts(b_pile, a_pile)? {
                        let rendered = render_axiom2(a_pile, b_pile, &alpha, n, k)?;
                        out.push(CoTheoryAxiom {
                            kind: AxiomKind::RigidEpSolvableAt {
                                n,
                                k,
                                a_desc: pile_desc(a_pile),
                                b_desc: pile_desc(b_pile),
                            },
                            rendered,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Rigid pile epimorphisms `B -> A`, deduplicated under pre- and
/// post-composition with pile automorphisms.
fn rigid_epis_up_to_auts(b_pile: &GroupPile, a_pile: &GroupPile) -> Result<Vec<Vec<usize>>> {
    let b_grp = b_pile.group();
    let a_grp = a_pile.group();
    if b_grp.order() % a_grp.order() != 0 {
        return Ok(Vec::new());
    }
    let mut rigid: Vec<Vec<usize>> = Vec::new();
    for f in group::epimorphisms(b_grp, a_grp)? {
        let Ok(hom) = PileHom::new(b_pile.clone(), a_pile.clone(), f.clone()) else {
            continue;
        };
        if hom.is_pile_epi() && hom.is_rigid() {
            rigid.push(f.map_table().to_vec());
        }
    }
    // automorphisms as permutations
    let auts = |pile: &GroupPile| -> Result<Vec<Vec<usize>>> {
        Ok(group::isomorphisms(pile.group(), pile.group())?
            .into_iter()
            .filter(|f| {
                PileHom::new(pile.clone(), pile.clone(), f.clone())
                    .map(|h| h.is_pile_epi())
                    .unwrap_or(false)
            })
            .map(|f| f.map_table().to_vec())
            .collect())
    };
    let a_auts = auts(a_pile)?;
    let b_auts = auts(b_pile)?;
    let mut kept: Vec<Vec<usize>> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for alpha in rigid {
        if seen.contains(&alpha) {
            continue;
        }
        for sigma in &a_auts {
            for tau in &b_auts {
                // sigma ∘ alpha ∘ tau
                let composed: Vec<usize> =
                    (0..alpha.len()).map(|x| sigma[alpha[tau[x]]]).collect();
                seen.insert(composed);
            }
        }
        kept.push(alpha);
    }
    Ok(kept)
}

fn render_axiom2(
    a_pile: &GroupPile,
    b_pile: &GroupPile,
    alpha: &[usize],
    n: usize,
    k: usize,
) -> Result<CoFormula> {
    let m_a = a_pile.group().order();
    let m_b = b_pile.group().order();
    let u: Vec<String> = (0..m_a).map(|i| format!("u{i}")).collect();
    let w: Vec<String> = (0..m_b).map(|j| format!("w{j}")).collect();
    let premise = CoFormula::conj(match_conditions(a_pile, &u, n)?);
    let mut concl_parts = match_conditions(b_pile, &w, k)?;
    for j in 0..m_b {
        concl_parts.push(CoFormula::Sqsub(w[j].clone(), u[alpha[j]].clone()));
    }
    let mut conclusion = CoFormula::conj(concl_parts);
    for v in w.iter().rev() {
        conclusion = CoFormula::exists(v.clone(), k, conclusion);
    }
    let mut rendered = premise.implies(conclusion);
    for v in u.iter().rev() {
        rendered = CoFormula::forall(v.clone(), n, rendered);
    }
    Ok(rendered)
}

/// One failure of the bounded C-pile check.
#[derive(Clone, Debug)]
pub struct CpileFailure {
    pub quotient_kernel: Subgroup,
    pub b_desc: String,
    pub alpha: Vec<usize>,
}

/// Report of [`check_cpile_bounded`].
#[derive(Clone, Debug, Default)]
pub struct CpileReport {
    pub problems_checked: usize,
    pub failures: Vec<CpileFailure>,
}

impl CpileReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CpileReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} rigid embedding problems checked, {} unsolvable",
            self.problems_checked,
            self.failures.len()
        )?;
        for fail in &self.failures {
            writeln!(
                f,
                "  kernel {:?}, B = {}, alpha = {:?}",
                fail.quotient_kernel, fail.b_desc, fail.alpha
            )?;
        }
        Ok(())
    }
}

/// Semantic bounded C-pile check: every rigid epimorphism from an
/// e-generated deficient pile of order at most `order_bound` (drawn from the
/// catalog with all family structures over the pile's labels) onto a
/// quotient of `pile` must be solvable over `pile`.
pub fn check_cpile_bounded(
    pile: &GroupPile,
    e: usize,
    order_bound: usize,
    limit: u64,
) -> Result<CpileReport> {
    if !pile.is_deficient() {
        return Err(crate::error::Error::pre("check_cpile_bounded: pile is not deficient"));
    }
    let labels: Vec<&str> = pile.labels().map(|s| s.as_str()).collect();
    let b_types: Vec<GroupPile> = deficient_pile_types(&labels, order_bound, false, limit)?
        .into_iter()
        .filter(|p| p.is_e_generated(e))
        .collect();
    let mut report = CpileReport::default();
    for n_sub in group::normal_subgroups(pile.group())? {
        let (a_pile, proj) = pile.quotient(&n_sub)?;
        for b_pile in &b_types {
            if b_pile.group().order() % a_pile.group().order() != 0 {
                continue;
            }
            for f in group::epimorphisms_limited(b_pile.group(), a_pile.group(), limit)? {
                let Ok(alpha) = PileHom::new(b_pile.clone(), a_pile.clone(), f) else {
                    continue;
                };
                if !alpha.is_pile_epi() || !alpha.is_rigid() {
                    continue;
                }
                let ep = EmbeddingProblem::new(proj.clone(), alpha.clone())?;
                report.problems_checked += 1;
                if solve_all_limited(&ep, 1, limit)?.is_empty() {
                    report.failures.push(CpileFailure {
                        quotient_kernel: n_sub.clone(),
                        b_desc: pile_desc(b_pile),
                        alpha: alpha.underlying().map_table().to_vec(),
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colang::{cosatisfies, Assignment};
    use crate::group::FiniteGroup;
    use crate::isystem::encode;

    #[test]
    fn rendered_axioms_are_cosentences() {
        for ax in generate_tc(1, 2, 2, &["p"], 1 << 20).unwrap() {
            assert!(ax.rendered.is_sentence(), "{:?}", ax.kind);
        }
    }

    #[test]
    fn axiom1_matches_classification() {
        // e = 1, n up to 4: the rendered sentence holds on encode(p) exactly
        // when every quotient of index <= n is 1-generated
        let axioms = generate_tc(1, 4, 1, &["p"], 1 << 20).unwrap();
        let piles = [
            GroupPile::bare(FiniteGroup::cyclic(4), ["p".to_string()]),
            GroupPile::bare(
                FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2)),
                ["p".to_string()],
            ),
            GroupPile::bare(FiniteGroup::cyclic(8), ["p".to_string()]),
        ];
        for pile in &piles {
            let sys = encode(pile).unwrap();
            for ax in axioms.iter().filter(|a| matches!(a.kind, AxiomKind::EGeneratedAt { .. })) {
                let AxiomKind::EGeneratedAt { n } = ax.kind else { unreachable!() };
                let expected = group::normal_subgroups(pile.group())
                    .unwrap()
                    .into_iter()
                    .filter(|nn| pile.group().order() / nn.len() <= n)
                    .all(|nn| pile.quotient(&nn).unwrap().0.is_e_generated(1));
                let got = cosatisfies(&sys, &ax.rendered, &Assignment::new()).unwrap();
                assert_eq!(got, expected, "pile {pile:?} axiom(1) at n={n}");
            }
        }
    }

    #[test]
    fn axiom1_fails_on_klein_for_e1() {
        // rank(Z2 x Z2) = 2, so the index-4 quotient is not 1-generated
        let klein = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2));
        let pile = GroupPile::bare(klein, ["p".to_string()]);
        let sys = encode(&pile).unwrap();
        let axioms = generate_tc(1, 4, 1, &["p"], 1 << 20).unwrap();
        let ax4 = axioms
            .iter()
            .find(|a| a.kind == AxiomKind::EGeneratedAt { n: 4 })
            .unwrap();
        assert!(!cosatisfies(&sys, &ax4.rendered, &Assignment::new()).unwrap());
        let ax2 = axioms
            .iter()
            .find(|a| a.kind == AxiomKind::EGeneratedAt { n: 2 })
            .unwrap();
        assert!(cosatisfies(&sys, &ax2.rendered, &Assignment::new()).unwrap());
    }

    #[test]
    fn axiom2_instance_on_z4() {
        // Z4 realizes the rigid problems with B = Z2 over A = 1 at (n,k) = (1,2)
        let pile = GroupPile::bare(FiniteGroup::cyclic(4), ["p".to_string()]);
        let sys = encode(&pile).unwrap();
        let axioms = generate_tc(1, 1, 2, &["p"], 1 << 20).unwrap();
        let ax2: Vec<_> = axioms
            .iter()
            .filter(|a| matches!(a.kind, AxiomKind::RigidEpSolvableAt { k: 2, .. }))
            .collect();
        assert!(!ax2.is_empty());
        for ax in ax2 {
            let got = cosatisfies(&sys, &ax.rendered, &Assignment::new()).unwrap();
            let AxiomKind::RigidEpSolvableAt { ref b_desc, .. } = ax.kind else {
                unreachable!()
            };
            // the only order-2 quotient level of Z4 is the bare Z2; every
            // rigid B of order 2 with a nontrivial family pattern cannot map
            // onto it, leaving the instance vacuously true; the bare B = Z2
            // is realized by the index-2 level
            assert!(got, "instance for B {b_desc}");
        }
    }

    #[test]
    fn cpile_check_trivial_and_z2() {
        let trivial = GroupPile::bare(FiniteGroup::trivial(), ["p".to_string()]);
        let report = check_cpile_bounded(&trivial, 0, 2, 100_000).unwrap();
        assert!(report.passed(), "{report}");

        // bare Z2 at e = 1, bound 4: fails at B = Z4 bare
        let z2 = GroupPile::bare(FiniteGroup::cyclic(2), ["p".to_string()]);
        let report = check_cpile_bounded(&z2, 1, 4, 100_000).unwrap();
        assert!(!report.passed());
        assert!(report.failures.iter().any(|f| f.b_desc.contains("order 4")));
    }

    #[test]
    fn cpile_check_z4_bound2() {
        // bare Z4 at e = 1, bound 2: B = Z2 over A = 1 is solvable
        let z4 = GroupPile::bare(FiniteGroup::cyclic(4), ["p".to_string()]);
        let report = check_cpile_bounded(&z4, 1, 2, 100_000).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.problems_checked > 0);
    }
}
