//! Finite group piles: a group together with a distinguished conjugacy class
//! of subgroups and conjugation-invariant subgroup families indexed by a
//! finite set of opaque prime labels.
//!
//! The label set carries no arithmetic meaning at this layer. Families are
//! stored sorted and compared structurally, so every operation is
//! deterministic.

use crate::error::{Error, Result};
use crate::group::{
    self, generated_by_subgroups, quotient, rank, FiniteGroup, GroupHom, Subgroup,
};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Opaque prime label ("infty", "2", "3", ...).
pub type Label = String;

/// A finite group pile `(G, class0, families)`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupPile {
    group: FiniteGroup,
    class0: BTreeSet<Subgroup>,
    families: BTreeMap<Label, BTreeSet<Subgroup>>,
}

impl fmt::Debug for GroupPile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GroupPile({:?}, class0 x{}, families: {})",
            self.group,
            self.class0.len(),
            self.families
                .iter()
                .map(|(p, fam)| format!("{p}:{}", fam.len()))
                .collect::<Vec<_>>()
                .join(" ")
        )
    }
}

/// One validation finding: the violated clause plus a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub clause: String,
    pub witness: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.clause, self.witness)
    }
}

/// Classification flags of a pile, for the queried values of `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PileFlags {
    pub separated: bool,
    pub reduced: bool,
    pub self_generated: bool,
    pub deficient: bool,
    pub bare: bool,
    pub e_generated: BTreeMap<usize, bool>,
    pub e_bounded: BTreeMap<usize, bool>,
}

impl GroupPile {
    /// Builds a pile from explicit parts, validating all invariants.
    pub fn new(
        group: FiniteGroup,
        class0: impl IntoIterator<Item = Subgroup>,
        families: impl IntoIterator<Item = (Label, Vec<Subgroup>)>,
    ) -> Result<Self> {
        let pile = GroupPile {
            group,
            class0: class0.into_iter().collect(),
            families: families
                .into_iter()
                .map(|(p, f)| (p, f.into_iter().collect()))
                .collect(),
        };
        let diags = pile.validate();
        if let Some(d) = diags.first() {
            return Err(Error::InvalidInput(format!("invalid pile: {d}")));
        }
        Ok(pile)
    }

    /// Builds a pile from a single class-0 representative and one
    /// representative per family entry, closing everything under
    /// conjugation.
    pub fn from_representatives(
        group: FiniteGroup,
        class0_rep: Subgroup,
        family_reps: impl IntoIterator<Item = (Label, Vec<Subgroup>)>,
    ) -> Result<Self> {
        let class0 = group::conjugates(&group, &class0_rep);
        let mut families: BTreeMap<Label, BTreeSet<Subgroup>> = BTreeMap::new();
        for (p, reps) in family_reps {
            let fam = families.entry(p).or_default();
            for r in reps {
                fam.extend(group::conjugates(&group, &r));
            }
        }
        GroupPile::new(group, class0, families.into_iter().map(|(p, f)| (p, f.into_iter().collect())))
    }

    /// Deficient pile: class0 = {1}.
    pub fn deficient(
        group: FiniteGroup,
        family_reps: impl IntoIterator<Item = (Label, Vec<Subgroup>)>,
    ) -> Result<Self> {
        GroupPile::from_representatives(group, Subgroup::trivial(), family_reps)
    }

    /// Bare deficient pile over a group: class0 = {1}, all families {1}.
    pub fn bare(group: FiniteGroup, labels: impl IntoIterator<Item = Label>) -> Self {
        let families: BTreeMap<Label, BTreeSet<Subgroup>> = labels
            .into_iter()
            .map(|p| (p, std::iter::once(Subgroup::trivial()).collect()))
            .collect();
        GroupPile {
            group,
            class0: std::iter::once(Subgroup::trivial()).collect(),
            families,
        }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn class0(&self) -> &BTreeSet<Subgroup> {
        &self.class0
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.families.keys()
    }

    pub fn family(&self, label: &str) -> Option<&BTreeSet<Subgroup>> {
        self.families.get(label)
    }

    pub fn families(&self) -> &BTreeMap<Label, BTreeSet<Subgroup>> {
        &self.families
    }

    /// The union of all prime families (class0 excluded).
    pub fn family_union(&self) -> BTreeSet<Subgroup> {
        self.families.values().flatten().cloned().collect()
    }

    /// Checks every pile invariant, returning diagnostics instead of
    /// failing. Empty output means the pile is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let g = &self.group;
        let check_subgroup = |s: &Subgroup, out: &mut Vec<Diagnostic>, what: &str| {
            if Subgroup::new(g, s.elements().iter().copied()).is_err() {
                out.push(Diagnostic {
                    clause: "family member is not a subgroup".into(),
                    witness: format!("{what} contains {s:?}"),
                });
                return false;
            }
            true
        };
        if self.class0.is_empty() {
            out.push(Diagnostic {
                clause: "class0 empty".into(),
                witness: "clause (2) requires a nonempty class".into(),
            });
        }
        for s in &self.class0 {
            check_subgroup(s, &mut out, "class0");
        }
        // class0 closed under conjugation and a single conjugacy class
        if let Some(first) = self.class0.iter().next() {
            let class = group::conjugates(g, first);
            if class != self.class0 {
                if self.class0.is_subset(&class) || class.is_subset(&self.class0) {
                    let missing = class.difference(&self.class0).next();
                    if let Some(m) = missing {
                        let witness_g = g
                            .elements()
                            .find(|&x| &first.conjugate(g, x) == m)
                            .unwrap_or(0);
                        out.push(Diagnostic {
                            clause: "class0 not closed under conjugation".into(),
                            witness: format!("conjugating by g={witness_g} leaves the class"),
                        });
                    } else {
                        out.push(Diagnostic {
                            clause: "class0 not a single conjugacy class".into(),
                            witness: format!("{:?} has extra members", self.class0),
                        });
                    }
                } else {
                    out.push(Diagnostic {
                        clause: "class0 not a single conjugacy class".into(),
                        witness: format!(
                            "{first:?} and {:?} are not conjugate",
                            self.class0
                                .iter()
                                .find(|s| !class.contains(*s))
                                .unwrap()
                        ),
                    });
                }
            }
        }
        for (p, fam) in &self.families {
            for s in fam {
                if !check_subgroup(s, &mut out, &format!("family {p}")) {
                    continue;
                }
                for x in g.elements() {
                    let conj = s.conjugate(g, x);
                    if !fam.contains(&conj) {
                        out.push(Diagnostic {
                            clause: format!("family {p} not closed under conjugation"),
                            witness: format!("{s:?} conjugated by g={x} is missing"),
                        });
                        break;
                    }
                }
            }
        }
        out
    }

    /// Computes all classification flags for the queried `e` values.
    pub fn classify(&self, e_values: &[usize]) -> PileFlags {
        let g = &self.group;
        let union = self.family_union();
        let bare = union.iter().all(|s| s.is_trivial());
        let deficient =
            self.class0.len() == 1 && self.class0.iter().next().unwrap().is_trivial();
        // separated: the sets for 0 and each prime are pairwise disjoint
        let mut sets: Vec<&BTreeSet<Subgroup>> = vec![&self.class0];
        sets.extend(self.families.values());
        let mut separated = true;
        'sep: for i in 0..sets.len() {
            for j in (i + 1)..sets.len() {
                if sets[i].intersection(sets[j]).next().is_some() {
                    separated = false;
                    break 'sep;
                }
            }
        }
        // reduced: no proper inclusions among the elements of the union
        let members: Vec<&Subgroup> = union.iter().collect();
        let mut reduced = true;
        'red: for a in &members {
            for b in &members {
                if a != b && a.is_subset_of(b) {
                    reduced = false;
                    break 'red;
                }
            }
        }
        let derived_sub = self.derived_subgroup();
        let self_generated = self.class0.iter().next().map_or(false, |g0| {
            generated_by_subgroups(g, &[g0, &derived_sub], &[]).len() == g.order()
        });
        let (bar, _) = self.bar_pile();
        let bar_rank = rank(bar.group());
        let class0_rank = self
            .class0
            .iter()
            .next()
            .map(|g0| g0.rank_in(g))
            .unwrap_or(0);
        let mut e_generated = BTreeMap::new();
        let mut e_bounded = BTreeMap::new();
        for &e in e_values {
            e_generated.insert(e, bar_rank <= e);
            e_bounded.insert(e, self_generated && class0_rank <= e);
        }
        PileFlags {
            separated,
            reduced,
            self_generated,
            deficient,
            bare,
            e_generated,
            e_bounded,
        }
    }

    pub fn is_deficient(&self) -> bool {
        self.class0.len() == 1 && self.class0.iter().next().unwrap().is_trivial()
    }

    pub fn is_bare(&self) -> bool {
        self.family_union().iter().all(|s| s.is_trivial())
    }

    pub fn is_self_generated(&self) -> bool {
        let derived_sub = self.derived_subgroup();
        self.class0.iter().next().map_or(false, |g0| {
            generated_by_subgroups(&self.group, &[g0, &derived_sub], &[]).len()
                == self.group.order()
        })
    }

    pub fn is_e_generated(&self, e: usize) -> bool {
        let (bar, _) = self.bar_pile();
        rank(bar.group()) <= e
    }

    pub fn is_e_bounded(&self, e: usize) -> bool {
        self.is_self_generated()
            && self
                .class0
                .iter()
                .next()
                .map_or(false, |g0| g0.rank_in(&self.group) <= e)
    }

    /// The subgroup `G' = <union of all prime families>`.
    pub fn derived_subgroup(&self) -> Subgroup {
        let union = self.family_union();
        let refs: Vec<&Subgroup> = union.iter().collect();
        generated_by_subgroups(&self.group, &refs, &[])
    }

    /// The deficient reduct: same group and families, class0 = {1}.
    pub fn deficient_reduct(&self) -> GroupPile {
        GroupPile {
            group: self.group.clone(),
            class0: std::iter::once(Subgroup::trivial()).collect(),
            families: self.families.clone(),
        }
    }

    /// The derived pile `G' = (G', families)` living on the subgroup `G'`,
    /// together with `G'` itself inside the parent.
    ///
    /// Every family member generates into `G'`, so the families transfer to
    /// the subgroup's own element indexing unchanged.
    pub fn derived_pile(&self) -> (GroupPile, Subgroup) {
        let sub = self.derived_subgroup();
        let (sub_group, embed) = sub.as_group(&self.group);
        let back: BTreeMap<usize, usize> =
            embed.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let transfer = |s: &Subgroup| -> Subgroup {
            Subgroup::new(&sub_group, s.elements().iter().map(|e| back[e]))
                .expect("family members lie inside G'")
        };
        let families: BTreeMap<Label, BTreeSet<Subgroup>> = self
            .families
            .iter()
            .map(|(p, fam)| (p.clone(), fam.iter().map(&transfer).collect()))
            .collect();
        let pile = GroupPile {
            group: sub_group,
            class0: std::iter::once(Subgroup::trivial()).collect(),
            families,
        };
        (pile, sub)
    }

    /// The bare quotient pile `Ḡ = G/G'` with its quotient map.
    pub fn bar_pile(&self) -> (GroupPile, PileHom) {
        self.quotient(&self.derived_subgroup())
            .expect("G' is normal: the family union is conjugation-invariant")
    }

    /// Quotient pile `G/N` with the projection as a pile epimorphism.
    pub fn quotient(&self, n: &Subgroup) -> Result<(GroupPile, PileHom)> {
        let (q, proj) = quotient(&self.group, n)?;
        let push = |fam: &BTreeSet<Subgroup>| -> BTreeSet<Subgroup> {
            fam.iter().map(|s| proj.image_of(s)).collect()
        };
        let pile = GroupPile {
            group: q,
            class0: push(&self.class0),
            families: self
                .families
                .iter()
                .map(|(p, fam)| (p.clone(), push(fam)))
                .collect(),
        };
        let hom = PileHom::new(self.clone(), pile.clone(), proj)?;
        debug_assert!(hom.is_pile_epi());
        Ok((pile, hom))
    }

    /// Structural pile isomorphism test (brute force over group
    /// isomorphisms).
    pub fn is_isomorphic_to(&self, other: &GroupPile) -> bool {
        self.isomorphism_to(other).is_some()
    }

    pub fn isomorphism_to(&self, other: &GroupPile) -> Option<PileHom> {
        if self.group.order() != other.group.order() {
            return None;
        }
        let self_labels: Vec<&Label> = self.families.keys().collect();
        let other_labels: Vec<&Label> = other.families.keys().collect();
        if self_labels != other_labels {
            return None;
        }
        let isos = group::isomorphisms(&self.group, &other.group).ok()?;
        for f in isos {
            let push = |fam: &BTreeSet<Subgroup>| -> BTreeSet<Subgroup> {
                fam.iter().map(|s| f.image_of(s)).collect()
            };
            if push(&self.class0) != other.class0 {
                continue;
            }
            if self
                .families
                .iter()
                .all(|(p, fam)| &push(fam) == other.families.get(p).unwrap())
            {
                let hom = PileHom {
                    underlying: f,
                    dom: Box::new(self.clone()),
                    cod: Box::new(other.clone()),
                };
                return Some(hom);
            }
        }
        None
    }
}

/// A homomorphism of group piles: a group homomorphism mapping each family
/// into the corresponding target family (class0 included).
#[derive(Clone, PartialEq, Eq)]
pub struct PileHom {
    underlying: GroupHom,
    dom: Box<GroupPile>,
    cod: Box<GroupPile>,
}

impl fmt::Debug for PileHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PileHom({:?})", self.underlying.map_table())
    }
}

impl PileHom {
    pub fn new(dom: GroupPile, cod: GroupPile, underlying: GroupHom) -> Result<Self> {
        if underlying.dom() != dom.group() || underlying.cod() != cod.group() {
            return Err(Error::InvalidInput(
                "pile hom group map does not match the piles".into(),
            ));
        }
        let dom_labels: Vec<&Label> = dom.families.keys().collect();
        let cod_labels: Vec<&Label> = cod.families.keys().collect();
        if dom_labels != cod_labels {
            return Err(Error::InvalidInput("pile hom label sets differ".into()));
        }
        for s in &dom.class0 {
            if !cod.class0.contains(&underlying.image_of(s)) {
                return Err(Error::InvalidInput(format!(
                    "image of class0 member {s:?} is outside the target class0"
                )));
            }
        }
        for (p, fam) in &dom.families {
            let target = &cod.families[p];
            for s in fam {
                if !target.contains(&underlying.image_of(s)) {
                    return Err(Error::InvalidInput(format!(
                        "image of {s:?} is outside the target family {p}"
                    )));
                }
            }
        }
        Ok(PileHom { underlying, dom: Box::new(dom), cod: Box::new(cod) })
    }

    pub fn identity(pile: &GroupPile) -> Self {
        PileHom {
            underlying: GroupHom::identity(pile.group()),
            dom: Box::new(pile.clone()),
            cod: Box::new(pile.clone()),
        }
    }

    pub fn dom(&self) -> &GroupPile {
        &self.dom
    }

    pub fn cod(&self) -> &GroupPile {
        &self.cod
    }

    pub fn underlying(&self) -> &GroupHom {
        &self.underlying
    }

    pub fn apply(&self, a: usize) -> usize {
        self.underlying.apply(a)
    }

    /// Epimorphism of piles: surjective with image families equal to the
    /// target families (class0 included).
    pub fn is_pile_epi(&self) -> bool {
        if !self.underlying.is_surjective() {
            return false;
        }
        let push = |fam: &BTreeSet<Subgroup>| -> BTreeSet<Subgroup> {
            fam.iter().map(|s| self.underlying.image_of(s)).collect()
        };
        if push(&self.dom.class0) != self.cod.class0 {
            return false;
        }
        self.dom
            .families
            .iter()
            .all(|(p, fam)| push(fam) == self.cod.families[p])
    }

    /// Rigid: injective on every member of the prime-family union.
    pub fn is_rigid(&self) -> bool {
        self.dom
            .family_union()
            .iter()
            .all(|s| self.underlying.restricted_injective_on(s))
    }

    pub fn then(&self, other: &PileHom) -> Result<PileHom> {
        if self.cod.as_ref() != other.dom.as_ref() {
            return Err(Error::InvalidInput("pile hom composition mismatch".into()));
        }
        Ok(PileHom {
            underlying: self.underlying.then(&other.underlying)?,
            dom: self.dom.clone(),
            cod: other.cod.clone(),
        })
    }
}

/// Realizes the Gaschütz pile-structure lift: given an `e`-bounded
/// self-generated pile `a`, an `e`-generated deficient pile `btil`, and an
/// epimorphism `pi: btil -> a.deficient_reduct()`, produces the `e`-bounded
/// pile `B` on the same group as `btil` with `B^def = btil` such that `pi`
/// becomes a pile epimorphism onto `a`.
pub fn lift_pile_structure(
    a: &GroupPile,
    btil: &GroupPile,
    pi: &PileHom,
    e: usize,
) -> Result<GroupPile> {
    if !a.is_e_bounded(e) || !a.is_self_generated() {
        return Err(Error::pre("lift_pile_structure: A is not e-bounded self-generated"));
    }
    if !btil.is_deficient() {
        return Err(Error::pre("lift_pile_structure: Btil is not deficient"));
    }
    if !btil.is_e_generated(e) {
        return Err(Error::pre("lift_pile_structure: Btil is not e-generated"));
    }
    if pi.dom() != btil || pi.cod() != &a.deficient_reduct() {
        return Err(Error::pre(
            "lift_pile_structure: pi is not a map Btil -> A^def",
        ));
    }
    if !pi.is_pile_epi() {
        return Err(Error::pre("lift_pile_structure: pi is not a pile epimorphism"));
    }
    // choose A0 and e generators of it (pad with the identity)
    let a0 = a.class0().iter().next().unwrap();
    let (a0_group, a0_embed) = a0.as_group(a.group());
    let mut gens: Vec<usize> = group::minimal_generating_set(&a0_group)
        .into_iter()
        .map(|i| a0_embed[i])
        .collect();
    while gens.len() < e {
        gens.push(0);
    }
    // B' is normal in B and pi(B') = A'; Gaschütz gives the lift
    let b_prime = btil.derived_subgroup();
    let lifted = group::lift_generators(pi.underlying(), &b_prime, &gens)?;
    let b0 = group::generated(btil.group(), &lifted);
    let out = GroupPile::from_representatives(
        btil.group().clone(),
        b0,
        btil.families
            .iter()
            .map(|(p, fam)| (p.clone(), fam.iter().cloned().collect())),
    )?;
    debug_assert!(out.is_e_bounded(e));
    Ok(out)
}

/// Enumerates conjugation-closed families over the subgroup conjugacy
/// classes of a group, in deterministic order. Each family is a union of
/// classes; `max_classes` caps how many classes a single family may join.
pub fn conjugation_closed_families(
    group: &FiniteGroup,
    max_classes: usize,
) -> Result<Vec<BTreeSet<Subgroup>>> {
    let subs = group::subgroups(group)?;
    // conjugacy classes of subgroups, deduplicated
    let mut classes: Vec<BTreeSet<Subgroup>> = Vec::new();
    let mut seen: BTreeSet<Subgroup> = BTreeSet::new();
    for s in subs {
        if seen.contains(&s) {
            continue;
        }
        let class = group::conjugates(group, &s);
        seen.extend(class.iter().cloned());
        classes.push(class);
    }
    // unions of up to max_classes classes, smallest selections first
    let mut out: Vec<BTreeSet<Subgroup>> = vec![BTreeSet::new()];
    let mut layer: Vec<(usize, BTreeSet<Subgroup>)> =
        vec![(0, BTreeSet::new())]; // (next class index, union so far)
    for _ in 0..max_classes {
        let mut next_layer = Vec::new();
        for (start, union) in &layer {
            for i in *start..classes.len() {
                let mut u = union.clone();
                u.extend(classes[i].iter().cloned());
                out.push(u.clone());
                next_layer.push((i + 1, u));
            }
        }
        layer = next_layer;
    }
    Ok(out)
}

/// Deterministic corpus of deficient piles over a list of groups: for each
/// group, conjugation-closed families over the given labels, capped at
/// `cap` piles overall.
pub fn deficient_pile_corpus(
    groups: &[FiniteGroup],
    labels: &[&str],
    max_classes: usize,
    cap: usize,
) -> Vec<GroupPile> {
    let mut out = Vec::new();
    'outer: for g in groups {
        let families = match conjugation_closed_families(g, max_classes) {
            Ok(f) => f,
            Err(_) => continue,
        };
        // one label: each family; two labels: pair families diagonally and
        // with an offset so both single- and mixed-label piles appear.
        match labels {
            [] => {
                let pile = GroupPile::bare(g.clone(), std::iter::empty());
                out.push(pile);
                if out.len() >= cap {
                    break 'outer;
                }
            }
            [p] => {
                for fam in &families {
                    let pile = GroupPile {
                        group: g.clone(),
                        class0: std::iter::once(Subgroup::trivial()).collect(),
                        families: std::iter::once(((*p).to_string(), fam.clone())).collect(),
                    };
                    out.push(pile);
                    if out.len() >= cap {
                        break 'outer;
                    }
                }
            }
            [p, q, ..] => {
                let n = families.len();
                for (i, fam) in families.iter().enumerate() {
                    let other = &families[(i + 1) % n];
                    let pile = GroupPile {
                        group: g.clone(),
                        class0: std::iter::once(Subgroup::trivial()).collect(),
                        families: [
                            ((*p).to_string(), fam.clone()),
                            ((*q).to_string(), other.clone()),
                        ]
                        .into_iter()
                        .collect(),
                    };
                    out.push(pile);
                    if out.len() >= cap {
                        break 'outer;
                    }
                }
            }
        }
    }
    out
}
