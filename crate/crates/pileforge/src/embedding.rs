//! Finite embedding problems for group piles: local solvability, exhaustive
//! solving, rigid products, quotient problems and domination.

use crate::error::{Error, Result};
use crate::group::{self, FiniteGroup, GroupHom, Subgroup};
use crate::pile::{GroupPile, Label, PileHom};
use std::collections::BTreeSet;

pub const DEFAULT_SEARCH_LIMIT: u64 = 2_000_000;

/// An embedding problem `(phi: G -> A, alpha: B -> A)` of pile epimorphisms.
#[derive(Clone, Debug)]
pub struct EmbeddingProblem {
    phi: PileHom,
    alpha: PileHom,
}

/// A solution: a pile epimorphism `gamma: G -> B` with `alpha ∘ gamma = phi`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub gamma: PileHom,
}

/// Witness row of the local-solvability check: one per matched item, or one
/// failing item with `matched = None`.
#[derive(Clone, Debug)]
pub struct LsWitness {
    /// "0" for the class-0 family, otherwise the prime label.
    pub label: String,
    /// Direction of the match: `true` when the source ranges over the
    /// G-side family, `false` for the B-side.
    pub from_g: bool,
    pub source: Subgroup,
    /// The matched partner and the epimorphism graph on parent elements.
    pub matched: Option<(Subgroup, Vec<(usize, usize)>)>,
}

#[derive(Clone, Debug)]
pub struct LsReport {
    pub holds: bool,
    pub witnesses: Vec<LsWitness>,
}

/// The output of [`dominate`]: a rigid e-bounded finite embedding problem
/// `(phihat, alphahat)` mapping onto the original one.
#[derive(Clone, Debug)]
pub struct Domination {
    pub ahat: GroupPile,
    pub bhat: GroupPile,
    pub phihat: PileHom,
    pub alphahat: PileHom,
    pub betahat: PileHom,
    pub beta: PileHom,
}

impl EmbeddingProblem {
    pub fn new(phi: PileHom, alpha: PileHom) -> Result<Self> {
        if phi.cod() != alpha.cod() {
            return Err(Error::InvalidInput(
                "phi and alpha must share the target pile".into(),
            ));
        }
        if !phi.is_pile_epi() {
            return Err(Error::InvalidInput("phi is not a pile epimorphism".into()));
        }
        if !alpha.is_pile_epi() {
            return Err(Error::InvalidInput("alpha is not a pile epimorphism".into()));
        }
        Ok(EmbeddingProblem { phi, alpha })
    }

    pub fn g(&self) -> &GroupPile {
        self.phi.dom()
    }

    pub fn a(&self) -> &GroupPile {
        self.phi.cod()
    }

    pub fn b(&self) -> &GroupPile {
        self.alpha.dom()
    }

    pub fn phi(&self) -> &PileHom {
        &self.phi
    }

    pub fn alpha(&self) -> &PileHom {
        &self.alpha
    }

    /// EP-level flags derive from the B pile.
    pub fn is_deficient(&self) -> bool {
        self.b().is_deficient()
    }

    pub fn is_e_generated(&self, e: usize) -> bool {
        self.b().is_e_generated(e)
    }

    pub fn is_e_bounded(&self, e: usize) -> bool {
        self.b().is_e_bounded(e)
    }

    pub fn is_rigid(&self) -> bool {
        self.alpha.is_rigid()
    }
}

/// Searches for an epimorphism `gamma: source -> target` between subgroups
/// (of the piles' groups) satisfying `alpha(gamma(x)) = phi(x)` pointwise.
/// Returns the first hit as a graph on parent elements.
fn compatible_local_epi(
    g_group: &FiniteGroup,
    b_group: &FiniteGroup,
    source: &Subgroup,
    target: &Subgroup,
    phi: &GroupHom,
    alpha: &GroupHom,
    limit: u64,
) -> Result<Option<Vec<(usize, usize)>>> {
    let (src, src_embed) = source.as_group(g_group);
    let (tgt, tgt_embed) = target.as_group(b_group);
    let found = group::homomorphisms_filtered(
        &src,
        &tgt,
        true,
        |x, y| alpha.apply(tgt_embed[y]) == phi.apply(src_embed[x]),
        limit,
    )?;
    Ok(found.first().map(|f| {
        (0..src.order())
            .map(|x| (src_embed[x], tgt_embed[f.apply(x)]))
            .collect()
    }))
}

/// Checks condition (LS): for every label (class 0 included) and in both
/// directions, each family member on one side matches a member on the other
/// side via a compatible epimorphism.
pub fn check_ls(ep: &EmbeddingProblem) -> Result<LsReport> {
    check_ls_limited(ep, DEFAULT_SEARCH_LIMIT)
}

pub fn check_ls_limited(ep: &EmbeddingProblem, limit: u64) -> Result<LsReport> {
    let g_pile = ep.g();
    let b_pile = ep.b();
    let phi = ep.phi().underlying();
    let alpha = ep.alpha().underlying();
    let mut witnesses = Vec::new();
    let mut holds = true;

    let mut run_family =
        |label: &str, g_fam: &BTreeSet<Subgroup>, b_fam: &BTreeSet<Subgroup>| -> Result<()> {
            // direction G -> B
            for gamma_sub in g_fam {
                let mut matched = None;
                for delta in b_fam {
                    if let Some(graph) = compatible_local_epi(
                        g_pile.group(),
                        b_pile.group(),
                        gamma_sub,
                        delta,
                        phi,
                        alpha,
                        limit,
                    )? {
                        matched = Some((delta.clone(), graph));
                        break;
                    }
                }
                if matched.is_none() {
                    holds = false;
                }
                witnesses.push(LsWitness {
                    label: label.to_string(),
                    from_g: true,
                    source: gamma_sub.clone(),
                    matched,
                });
            }
            // direction B -> G
            for delta in b_fam {
                let mut matched = None;
                for gamma_sub in g_fam {
                    if let Some(graph) = compatible_local_epi(
                        g_pile.group(),
                        b_pile.group(),
                        gamma_sub,
                        delta,
                        phi,
                        alpha,
                        limit,
                    )? {
                        matched = Some((gamma_sub.clone(), graph));
                        break;
                    }
                }
                if matched.is_none() {
                    holds = false;
                }
                witnesses.push(LsWitness {
                    label: label.to_string(),
                    from_g: false,
                    source: delta.clone(),
                    matched,
                });
            }
            Ok(())
        };

    run_family("0", g_pile.class0(), b_pile.class0())?;
    for (p, g_fam) in g_pile.families() {
        let b_fam = b_pile
            .family(p)
            .ok_or_else(|| Error::InvalidInput(format!("label {p} missing on B")))?;
        run_family(p, g_fam, b_fam)?;
    }
    Ok(LsReport { holds, witnesses })
}

/// First solution of the embedding problem in deterministic order, if any.
pub fn solve(ep: &EmbeddingProblem) -> Result<Option<Solution>> {
    Ok(solve_all_limited(ep, 1, DEFAULT_SEARCH_LIMIT)?.into_iter().next())
}

/// All solutions, in deterministic order (sorted by the map table of the
/// underlying group homomorphism).
pub fn solve_all(ep: &EmbeddingProblem) -> Result<Vec<Solution>> {
    solve_all_limited(ep, usize::MAX, DEFAULT_SEARCH_LIMIT)
}

pub fn solve_all_limited(
    ep: &EmbeddingProblem,
    max_solutions: usize,
    limit: u64,
) -> Result<Vec<Solution>> {
    let g_pile = ep.g();
    let b_pile = ep.b();
    let phi = ep.phi().underlying();
    let alpha = ep.alpha().underlying();
    // gamma(x) must land in the alpha-fiber of phi(x)
    let candidates = group::homomorphisms_filtered(
        g_pile.group(),
        b_pile.group(),
        true,
        |x, y| alpha.apply(y) == phi.apply(x),
        limit,
    )?;
    let mut out = Vec::new();
    for f in candidates {
        if let Ok(hom) = PileHom::new(g_pile.clone(), b_pile.clone(), f) {
            if hom.is_pile_epi() {
                debug_assert!({
                    let comp = hom.then(ep.alpha()).unwrap();
                    comp.underlying().map_table() == phi.map_table()
                });
                out.push(Solution { gamma: hom });
                if out.len() >= max_solutions {
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// The rigid product `B ×_A^rig G` of deficient piles, with the projections
/// `pi` (onto B) and `beta` (onto G).
///
/// The underlying group is the fiber product `{(b, g) : alpha(b) = phi(g)}`
/// with pairs ordered lexicographically; its prime families are the
/// subgroups projecting into both factor families with injective `beta`.
pub fn rigid_product(
    b_pile: &GroupPile,
    a_pile: &GroupPile,
    g_pile: &GroupPile,
    alpha: &PileHom,
    phi: &PileHom,
    limit: u64,
) -> Result<(GroupPile, PileHom, PileHom)> {
    for (pile, name) in [(b_pile, "B"), (a_pile, "A"), (g_pile, "G")] {
        if !pile.is_deficient() {
            return Err(Error::pre(format!("rigid_product: {name} is not deficient")));
        }
    }
    if alpha.dom() != b_pile || alpha.cod() != a_pile {
        return Err(Error::pre("rigid_product: alpha is not a map B -> A"));
    }
    if phi.dom() != g_pile || phi.cod() != a_pile {
        return Err(Error::pre("rigid_product: phi is not a map G -> A"));
    }
    let b_grp = b_pile.group();
    let g_grp = g_pile.group();
    // fiber product elements in lexicographic (b, g) order; (0,0) is first
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for b in b_grp.elements() {
        for g in g_grp.elements() {
            if alpha.apply(b) == phi.apply(g) {
                pairs.push((b, g));
            }
        }
    }
    let index_of = |b: usize, g: usize| -> usize {
        pairs.binary_search(&(b, g)).expect("closed under products")
    };
    let mul = pairs
        .iter()
        .map(|&(b1, g1)| {
            pairs
                .iter()
                .map(|&(b2, g2)| index_of(b_grp.mul(b1, b2), g_grp.mul(g1, g2)))
                .collect()
        })
        .collect();
    let h_grp = FiniteGroup::from_table(mul, None)?;
    let pi_map: Vec<usize> = pairs.iter().map(|&(b, _)| b).collect();
    let beta_map: Vec<usize> = pairs.iter().map(|&(_, g)| g).collect();
    let pi_hom = GroupHom::new(h_grp.clone(), b_grp.clone(), pi_map)?;
    let beta_hom = GroupHom::new(h_grp.clone(), g_grp.clone(), beta_map)?;

    // families: all subgroups of H filtered per the definition
    let subs = group::subgroups_limited(&h_grp, limit)?;
    let labels: Vec<Label> = b_pile.labels().cloned().collect();
    let mut families: Vec<(Label, Vec<Subgroup>)> = Vec::new();
    for p in &labels {
        let g_fam = g_pile.family(p).unwrap();
        let b_fam = b_pile.family(p).unwrap();
        let members: Vec<Subgroup> = subs
            .iter()
            .filter(|s| {
                beta_hom.restricted_injective_on(s)
                    && g_fam.contains(&beta_hom.image_of(s))
                    && b_fam.contains(&pi_hom.image_of(s))
            })
            .cloned()
            .collect();
        families.push((p.clone(), members));
    }
    let product = GroupPile::new(
        h_grp,
        std::iter::once(Subgroup::trivial()),
        families,
    )?;
    let pi = PileHom::new(product.clone(), b_pile.clone(), pi_hom)?;
    let beta = PileHom::new(product.clone(), g_pile.clone(), beta_hom)?;
    Ok((product, pi, beta))
}

/// The induced embedding problem `(G -> A/alpha(N), B/N -> A/alpha(N))`.
pub fn quotient_ep(ep: &EmbeddingProblem, n: &Subgroup) -> Result<EmbeddingProblem> {
    let alpha_n = ep.alpha().underlying().image_of(n);
    let (a_quot, a_proj) = ep.a().quotient(&alpha_n)?;
    let (b_quot, b_proj) = ep.b().quotient(n)?;
    let new_phi = ep.phi().then(&a_proj)?;
    // induced map B/N -> A/alpha(N): well-defined since alpha(N) contains
    // the image of N
    let b_q_grp = b_quot.group();
    let mut map = vec![usize::MAX; b_q_grp.order()];
    for b in ep.b().group().elements() {
        let src = b_proj.apply(b);
        let dst = a_proj.apply(ep.alpha().apply(b));
        if map[src] == usize::MAX {
            map[src] = dst;
        } else if map[src] != dst {
            return Err(Error::InvalidInput(
                "quotient map is not well-defined (alpha(N) too small)".into(),
            ));
        }
    }
    let alpha_hom = GroupHom::new(b_q_grp.clone(), a_quot.group().clone(), map)?;
    let new_alpha = PileHom::new(b_quot, a_quot, alpha_hom)?;
    EmbeddingProblem::new(new_phi, new_alpha)
}

/// Dominates a locally solvable `e`-bounded finite embedding problem (with
/// `G` itself `e`-bounded) by a rigid `e`-bounded finite one.
///
/// The dominating top is `Ahat = G` with `phihat = id` and `betahat = phi`;
/// `Bhat` is carved out of the rigid product of the deficient reducts, its
/// class 0 generated by a compatible lift of a class-0 generator system.
pub fn dominate(ep: &EmbeddingProblem, e: usize, limit: u64) -> Result<Domination> {
    if !ep.is_e_bounded(e) {
        return Err(Error::pre("dominate: B is not e-bounded"));
    }
    if !ep.g().is_e_bounded(e) {
        return Err(Error::pre("dominate: G is not e-bounded"));
    }
    let ls = check_ls_limited(ep, limit)?;
    if !ls.holds {
        return Err(Error::pre("dominate: the problem is not locally solvable"));
    }

    let g_pile = ep.g().clone();
    let ahat = g_pile.clone();
    let phihat = PileHom::identity(&g_pile);
    let betahat = ep.phi().clone();

    // rigid product of the deficient reducts: Btil = B^def x_{A^def} Ahat^def
    let b_def = ep.b().deficient_reduct();
    let a_def = ep.a().deficient_reduct();
    let ahat_def = ahat.deficient_reduct();
    let alpha_def = PileHom::new(b_def.clone(), a_def.clone(), ep.alpha().underlying().clone())?;
    let betahat_def =
        PileHom::new(ahat_def.clone(), a_def.clone(), betahat.underlying().clone())?;
    let (btil, pi_to_b, alpha_til) =
        rigid_product(&b_def, &a_def, &ahat_def, &alpha_def, &betahat_def, limit)?;

    // compatible epimorphism gamma0: Ahat0 -> B0 (exists by (LS) at label 0)
    let ahat0 = ahat.class0().iter().next().unwrap().clone();
    let mut gamma0: Option<Vec<(usize, usize)>> = None;
    for b0 in ep.b().class0() {
        if let Some(graph) = compatible_local_epi(
            ahat.group(),
            ep.b().group(),
            &ahat0,
            b0,
            betahat.underlying(),
            ep.alpha().underlying(),
            limit,
        )? {
            gamma0 = Some(graph);
            break;
        }
    }
    let gamma0 = gamma0.ok_or_else(|| {
        Error::pre("dominate: no compatible class-0 epimorphism (LS witness missing)")
    })?;

    // Btil0 = graph of gamma0 inside the fiber product
    let btil_grp = btil.group();
    let pair_index = |b: usize, g: usize| -> usize {
        btil_grp
            .elements()
            .find(|&h| pi_to_b.apply(h) == b && alpha_til.apply(h) == g)
            .expect("graph points lie in the fiber product")
    };
    let btil0_elems: Vec<usize> = gamma0.iter().map(|&(a, b)| pair_index(b, a)).collect();
    let btil0 = Subgroup::new(btil_grp, btil0_elems)?;

    // Bhat = <Btil0, Btil'>
    let btil_prime = btil.derived_subgroup();
    let bhat_sub = group::generated_by_subgroups(btil_grp, &[&btil0, &btil_prime], &[]);
    let (bhat_grp, bhat_embed) = bhat_sub.as_group(btil_grp);
    let back: std::collections::HashMap<usize, usize> =
        bhat_embed.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let transfer = |s: &Subgroup| -> Result<Subgroup> {
        Subgroup::new(&bhat_grp, s.elements().iter().map(|x| back[x]))
    };
    let bhat0 = transfer(&btil0)?;
    let families: Vec<(Label, Vec<Subgroup>)> = btil
        .families()
        .iter()
        .map(|(p, fam)| {
            let members: Result<Vec<Subgroup>> = fam.iter().map(&transfer).collect();
            Ok((p.clone(), members?))
        })
        .collect::<Result<Vec<_>>>()?;
    let bhat = GroupPile::from_representatives(bhat_grp.clone(), bhat0, families)?;

    // restrict the projections to Bhat
    let alphahat_map: Vec<usize> =
        bhat_embed.iter().map(|&x| alpha_til.apply(x)).collect();
    let beta_map: Vec<usize> = bhat_embed.iter().map(|&x| pi_to_b.apply(x)).collect();
    let alphahat = PileHom::new(
        bhat.clone(),
        ahat.clone(),
        GroupHom::new(bhat_grp.clone(), ahat.group().clone(), alphahat_map)?,
    )?;
    let beta = PileHom::new(
        bhat.clone(),
        ep.b().clone(),
        GroupHom::new(bhat_grp, ep.b().group().clone(), beta_map)?,
    )?;

    let dom = Domination { ahat, bhat, phihat, alphahat, betahat, beta };
    debug_assert!(verify_domination(ep, &dom, e));
    Ok(dom)
}

/// Checks every commuting identity and structural property promised by
/// [`dominate`].
pub fn verify_domination(ep: &EmbeddingProblem, d: &Domination, e: usize) -> bool {
    match d.phihat.then(&d.betahat) {
        Ok(h) if h.underlying().map_table() == ep.phi().underlying().map_table() => {}
        _ => return false,
    }
    let left = d.alphahat.then(&d.betahat);
    let right = d.beta.then(ep.alpha());
    match (left, right) {
        (Ok(l), Ok(r)) => {
            if l.underlying().map_table() != r.underlying().map_table() {
                return false;
            }
        }
        _ => return false,
    }
    d.alphahat.is_pile_epi()
        && d.alphahat.is_rigid()
        && d.phihat.is_pile_epi()
        && d.betahat.is_pile_epi()
        && d.beta.is_pile_epi()
        && d.bhat.is_e_bounded(e)
}

/// Deterministic corpus of embedding problems `(phi: G -> A, alpha: B -> A)`
/// built by quotienting corpus piles: for each pile B and each normal N of
/// its group, A = B/N with alpha the projection, and G = B with phi = alpha.
///
/// With `only_rigid`, keeps the problems where the projection is rigid.
pub fn quotient_ep_corpus(piles: &[GroupPile], only_rigid: bool, cap: usize) -> Vec<EmbeddingProblem> {
    let mut out = Vec::new();
    'outer: for pile in piles {
        let normals = match group::normal_subgroups(pile.group()) {
            Ok(n) => n,
            Err(_) => continue,
        };
        for n in normals {
            let Ok((quot, proj)) = pile.quotient(&n) else { continue };
            if only_rigid && !proj.is_rigid() {
                continue;
            }
            let Ok(ep) = EmbeddingProblem::new(proj.clone(), proj.clone()) else {
                continue;
            };
            out.push(ep);
            if out.len() >= cap {
                break 'outer;
            }
            // variant with G = A, phi = id
            let Ok(ep2) = EmbeddingProblem::new(PileHom::identity(&quot), proj) else {
                continue;
            };
            out.push(ep2);
            if out.len() >= cap {
                break 'outer;
            }
        }
    }
    out
}

/// Deterministic corpus of `e`-bounded locally solvable embedding problems:
/// corpus piles are upgraded with a class 0 making them `e`-bounded, then
/// quotiented.
pub fn ebounded_ep_corpus(piles: &[GroupPile], e: usize, cap: usize) -> Vec<EmbeddingProblem> {
    let mut out = Vec::new();
    'outer: for pile in piles {
        let grp = pile.group();
        let Ok(subs) = group::subgroups(grp) else { continue };
        // first subgroup of rank <= e that, with the families, generates G
        let derived = pile.derived_subgroup();
        let b0 = subs.iter().find(|s| {
            s.rank_in(grp) <= e
                && group::generated_by_subgroups(grp, &[s, &derived], &[]).len() == grp.order()
        });
        let Some(b0) = b0 else { continue };
        let Ok(upgraded) = GroupPile::from_representatives(
            grp.clone(),
            b0.clone(),
            pile.families()
                .iter()
                .map(|(p, fam)| (p.clone(), fam.iter().cloned().collect::<Vec<_>>())),
        ) else {
            continue;
        };
        if !upgraded.is_e_bounded(e) {
            continue;
        }
        let Ok(normals) = group::normal_subgroups(grp) else { continue };
        for n in normals {
            let Ok((_, proj)) = upgraded.quotient(&n) else { continue };
            let Ok(ep) = EmbeddingProblem::new(proj.clone(), proj) else { continue };
            out.push(ep);
            if out.len() >= cap {
                break 'outer;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    
    use crate::pile::deficient_pile_corpus;

    fn bare(g: FiniteGroup) -> GroupPile {
        GroupPile::bare(g, ["p".to_string()])
    }

    fn proj_hom(from: &GroupPile, n: &[usize]) -> (GroupPile, PileHom) {
        let sub = Subgroup::new(from.group(), n.iter().copied()).unwrap();
        from.quotient(&sub).unwrap()
    }

    #[test]
    fn identity_problem_solves_trivially() {
        let b = bare(FiniteGroup::cyclic(4));
        let id = PileHom::identity(&b);
        let ep = EmbeddingProblem::new(id.clone(), id).unwrap();
        let ls = check_ls(&ep).unwrap();
        assert!(ls.holds);
        let sol = solve(&ep).unwrap().unwrap();
        assert_eq!(
            sol.gamma.underlying().map_table(),
            ep.phi().underlying().map_table()
        );
    }

    #[test]
    fn rank_obstruction_yields_none() {
        // G = Z4 bare, A = Z2, B = Z2 x Z2: no epimorphism Z4 -> Z2 x Z2
        let g = bare(FiniteGroup::cyclic(4));
        let (a, phi) = proj_hom(&g, &[0, 2]);
        let klein = bare(FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2)));
        let alpha_hom = GroupHom::new(
            klein.group().clone(),
            a.group().clone(),
            vec![0, 1, 0, 1],
        )
        .unwrap();
        let alpha = PileHom::new(klein, a, alpha_hom).unwrap();
        let ep = EmbeddingProblem::new(phi, alpha).unwrap();
        assert!(solve(&ep).unwrap().is_none());
    }

    #[test]
    fn z4_over_z2_has_two_solutions() {
        let g = bare(FiniteGroup::cyclic(4));
        let (a, phi) = proj_hom(&g, &[0, 2]);
        let b = bare(FiniteGroup::cyclic(4));
        let (a2, alpha) = proj_hom(&b, &[0, 2]);
        assert_eq!(a, a2);
        let ep = EmbeddingProblem::new(phi, alpha).unwrap();
        let sols = solve_all(&ep).unwrap();
        let maps: Vec<&[usize]> = sols
            .iter()
            .map(|s| s.gamma.underlying().map_table())
            .collect();
        assert_eq!(maps, vec![&[0, 1, 2, 3][..], &[0, 3, 2, 1][..]]);
    }

    #[test]
    fn ls_failure_when_b_family_unreachable() {
        // G-side family trivial, B has a nontrivial Delta with alpha(Delta)=1:
        // no epimorphism 1 -> Delta can exist, so (LS) fails for B -> G
        let z2 = FiniteGroup::cyclic(2);
        let g = bare(FiniteGroup::trivial());
        let a = bare(FiniteGroup::trivial());
        let phi = PileHom::identity(&g);
        let b = GroupPile::deficient(
            z2.clone(),
            [("p".to_string(), vec![Subgroup::trivial(), Subgroup::full(&z2)])],
        )
        .unwrap();
        let alpha_hom = GroupHom::new(z2, FiniteGroup::trivial(), vec![0, 0]).unwrap();
        let alpha = PileHom::new(b, a.clone(), alpha_hom).unwrap();
        assert!(alpha.is_pile_epi(), "family image collapses to {{1}}");
        let ep = EmbeddingProblem::new(phi, alpha).unwrap();
        let report = check_ls(&ep).unwrap();
        assert!(!report.holds);
        let failing = report
            .witnesses
            .iter()
            .find(|w| w.matched.is_none())
            .expect("a failing witness row");
        assert!(!failing.from_g);
        assert_eq!(failing.source.len(), 2);
    }

    #[test]
    fn rigid_implies_locally_solvable_on_sample() {
        let groups = catalog::catalog_upto(8);
        let piles = deficient_pile_corpus(&groups, &["p"], 2, 60);
        let eps = quotient_ep_corpus(&piles, true, 80);
        assert!(eps.len() >= 40);
        for ep in &eps {
            assert!(ep.is_rigid());
            assert!(ep.is_deficient());
            let report = check_ls(ep).unwrap();
            assert!(report.holds);
            // rigid => (LS) holds for every prime label in both directions
            for w in &report.witnesses {
                if w.label != "0" {
                    assert!(w.matched.is_some());
                }
            }
        }
    }

    #[test]
    fn rigid_product_over_trivial_base() {
        // B = G = Z2 bare-with-full-family, A = 1: fiber product is Z2 x Z2
        let z2 = FiniteGroup::cyclic(2);
        let fam = vec![Subgroup::trivial(), Subgroup::full(&z2)];
        let b = GroupPile::deficient(z2.clone(), [("p".to_string(), fam.clone())]).unwrap();
        let g = GroupPile::deficient(z2.clone(), [("p".to_string(), fam)]).unwrap();
        let a = GroupPile::deficient(
            FiniteGroup::trivial(),
            [("p".to_string(), vec![Subgroup::trivial()])],
        )
        .unwrap();
        let to_a = |pile: &GroupPile| {
            PileHom::new(
                pile.clone(),
                a.clone(),
                GroupHom::new(pile.group().clone(), a.group().clone(), vec![0, 0]).unwrap(),
            )
            .unwrap()
        };
        let (h, pi, beta) = rigid_product(&b, &a, &g, &to_a(&b), &to_a(&g), 10_000).unwrap();
        assert_eq!(h.group().order(), 4);
        assert!(pi.is_pile_epi());
        assert!(beta.is_pile_epi());
        assert!(beta.is_rigid());
        // of the five subgroups of Z2 x Z2, exactly the trivial one, the
        // beta-factor and the diagonal survive the injectivity filter
        let fam = h.family("p").unwrap();
        assert_eq!(fam.len(), 3);
    }

    #[test]
    fn fiberproduct_contract_on_sample() {
        let groups = catalog::catalog_upto(6);
        let piles = deficient_pile_corpus(&groups, &["p"], 2, 40);
        let eps = quotient_ep_corpus(&piles, true, 40);
        for ep in &eps {
            let (_, pi, beta) = rigid_product(
                &ep.b().deficient_reduct(),
                &ep.a().deficient_reduct(),
                &ep.g().deficient_reduct(),
                &PileHom::new(
                    ep.b().deficient_reduct(),
                    ep.a().deficient_reduct(),
                    ep.alpha().underlying().clone(),
                )
                .unwrap(),
                &PileHom::new(
                    ep.g().deficient_reduct(),
                    ep.a().deficient_reduct(),
                    ep.phi().underlying().clone(),
                )
                .unwrap(),
                100_000,
            )
            .unwrap();
            assert!(pi.is_pile_epi(), "pi not epi for {ep:?}");
            assert!(beta.is_pile_epi(), "beta not epi for {ep:?}");
            assert!(beta.is_rigid(), "beta not rigid for {ep:?}");
        }
    }

    #[test]
    fn quotient_ep_preserves_ls_on_sample() {
        let groups = catalog::catalog_upto(6);
        let piles = deficient_pile_corpus(&groups, &["p"], 2, 30);
        let eps = quotient_ep_corpus(&piles, true, 20);
        for ep in &eps {
            assert!(check_ls(ep).unwrap().holds);
            for n in group::normal_subgroups(ep.b().group()).unwrap() {
                let q = quotient_ep(ep, &n).unwrap();
                assert!(check_ls(&q).unwrap().holds, "LS lost after quotient by {n:?}");
            }
        }
    }

    #[test]
    fn quotient_ep_degenerate_cases() {
        let b = bare(FiniteGroup::cyclic(4));
        let (_, proj) = proj_hom(&b, &[0, 2]);
        let ep = EmbeddingProblem::new(proj.clone(), proj).unwrap();
        // N = {1}: isomorphic problem
        let q = quotient_ep(&ep, &Subgroup::trivial()).unwrap();
        assert!(q.b().is_isomorphic_to(ep.b()));
        // N = B: both targets trivial
        let q = quotient_ep(&ep, &Subgroup::full(ep.b().group())).unwrap();
        assert_eq!(q.b().group().order(), 1);
        assert_eq!(q.a().group().order(), 1);
        assert!(check_ls(&q).unwrap().holds);
    }

    #[test]
    fn dominate_on_ebounded_sample() {
        let groups = catalog::catalog_upto(8);
        let piles = deficient_pile_corpus(&groups, &["p"], 1, 40);
        for e in [0usize, 1, 2] {
            let eps = ebounded_ep_corpus(&piles, e, 10);
            for ep in &eps {
                let d = dominate(ep, e, 200_000).unwrap();
                assert!(verify_domination(ep, &d, e));
            }
        }
    }

    #[test]
    fn dominate_rejects_unbounded() {
        let b = bare(FiniteGroup::cyclic(4));
        let (_, proj) = proj_hom(&b, &[0, 2]);
        let ep = EmbeddingProblem::new(proj.clone(), proj).unwrap();
        // bare Z4 pile has trivial class0, G' = 1, so it is not self-generated
        assert!(dominate(&ep, 1, 100_000).is_err());
    }
}
