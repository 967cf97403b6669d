//! The inverse-system encoding of deficient group piles: points are cosets
//! of normal subgroups, related by level comparison, coset containment, the
//! partial product and the family relations. Finite systems validate against
//! the nine inverse-system axioms and decode back to piles.

use crate::error::{Error, Result};
use crate::group::{self, FiniteGroup, GroupHom, Subgroup};
use crate::pile::{GroupPile, Label, PileHom};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// A finite structure in the co-language: points with the relations
/// `leq`, `sqsub` (dense boolean matrices), the partial product `P`, an
/// optional explicit `Gn` table, and per-label family sets.
///
/// Families are stored canonically: for each label, member sets of points
/// (each inside a single level). The n-ary tuple relation is derived: a
/// tuple is in the relation for label `p` and arity `n` exactly when all its
/// entries share a level of size at most `n` and the entry set is a stored
/// member set.
#[derive(Clone, PartialEq, Eq)]
pub struct InverseSystem {
    n_points: usize,
    leq: Vec<bool>,
    sqsub: Vec<bool>,
    prod: BTreeSet<(usize, usize, usize)>,
    /// Explicit Gn sets, validated against the derived semantics.
    gn_given: BTreeMap<usize, BTreeSet<usize>>,
    families: BTreeMap<Label, Vec<BTreeSet<usize>>>,
}

impl fmt::Debug for InverseSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InverseSystem({} points, {} levels)", self.n_points, self.levels().len())
    }
}

impl InverseSystem {
    pub fn from_parts(
        n_points: usize,
        leq_pairs: impl IntoIterator<Item = (usize, usize)>,
        sqsub_pairs: impl IntoIterator<Item = (usize, usize)>,
        prod: impl IntoIterator<Item = (usize, usize, usize)>,
        gn_given: BTreeMap<usize, BTreeSet<usize>>,
        families: BTreeMap<Label, Vec<BTreeSet<usize>>>,
    ) -> Result<Self> {
        let mut leq = vec![false; n_points * n_points];
        let mut sqsub = vec![false; n_points * n_points];
        let check = |x: usize| -> Result<usize> {
            if x >= n_points {
                Err(Error::InvalidInput(format!("point {x} out of range")))
            } else {
                Ok(x)
            }
        };
        for (a, b) in leq_pairs {
            leq[check(a)? * n_points + check(b)?] = true;
        }
        for (a, b) in sqsub_pairs {
            sqsub[check(a)? * n_points + check(b)?] = true;
        }
        let mut prod_set = BTreeSet::new();
        for (a, b, c) in prod {
            prod_set.insert((check(a)?, check(b)?, check(c)?));
        }
        for set in families.values().flatten() {
            for &x in set {
                check(x)?;
            }
        }
        for set in gn_given.values() {
            for &x in set {
                check(x)?;
            }
        }
        Ok(InverseSystem {
            n_points,
            leq,
            sqsub,
            prod: prod_set,
            gn_given,
            families,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.n_points + b]
    }

    #[inline]
    pub fn sqsub(&self, a: usize, b: usize) -> bool {
        self.sqsub[a * self.n_points + b]
    }

    #[inline]
    pub fn p(&self, a: usize, b: usize, c: usize) -> bool {
        self.prod.contains(&(a, b, c))
    }

    pub fn families(&self) -> &BTreeMap<Label, Vec<BTreeSet<usize>>> {
        &self.families
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.families.keys()
    }

    /// Equivalence classes of mutual `leq`, each sorted, ordered by their
    /// minimal point.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n_points];
        let mut out = Vec::new();
        for x in 0..self.n_points {
            if seen[x] {
                continue;
            }
            let class: Vec<usize> = (0..self.n_points)
                .filter(|&y| self.leq(x, y) && self.leq(y, x))
                .collect();
            for &y in &class {
                seen[y] = true;
            }
            out.push(class);
        }
        out
    }

    pub fn level_of(&self, x: usize) -> Vec<usize> {
        (0..self.n_points)
            .filter(|&y| self.leq(x, y) && self.leq(y, x))
            .collect()
    }

    /// Derived Gn relation: `|[x]| <= n`.
    pub fn gn_holds(&self, n: usize, x: usize) -> bool {
        self.level_of(x).len() <= n
    }

    /// Derived family tuple relation for a label at arity `n`.
    pub fn gpn_holds(&self, label: &str, n: usize, args: &[usize]) -> bool {
        if args.len() != n || args.is_empty() {
            return false;
        }
        let level = self.level_of(args[0]);
        if level.len() > n {
            return false;
        }
        if !args.iter().all(|&a| level.contains(&a)) {
            return false;
        }
        let set: BTreeSet<usize> = args.iter().copied().collect();
        self.families
            .get(label)
            .map_or(false, |fam| fam.iter().any(|member| member == &set))
    }

    /// Checks the nine inverse-system axioms, returning (axiom index,
    /// witness) findings. Empty output means the system is valid.
    pub fn validate_axioms(&self) -> Vec<(usize, String)> {
        let mut out = Vec::new();
        let n = self.n_points;
        // (1) preorder with a unique largest element
        for x in 0..n {
            if !self.leq(x, x) {
                out.push((1, format!("leq not reflexive at {x}")));
            }
        }
        'trans: for x in 0..n {
            for y in 0..n {
                if !self.leq(x, y) {
                    continue;
                }
                for z in 0..n {
                    if self.leq(y, z) && !self.leq(x, z) {
                        out.push((1, format!("leq not transitive at ({x},{y},{z})")));
                        break 'trans;
                    }
                }
            }
        }
        let largest: Vec<usize> =
            (0..n).filter(|&m| (0..n).all(|x| self.leq(x, m))).collect();
        if largest.len() != 1 {
            out.push((1, format!("{} largest elements, expected exactly one", largest.len())));
        }
        if !out.is_empty() {
            // levels are meaningless without a preorder
            return out;
        }
        let levels = self.levels();
        let level_idx: HashMap<usize, usize> = levels
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().map(move |&x| (x, i)))
            .collect();
        let level_le = |i: usize, j: usize| self.leq(levels[i][0], levels[j][0]);
        // (2) directed downwards
        for i in 0..levels.len() {
            for j in (i + 1)..levels.len() {
                if !(0..levels.len()).any(|k| level_le(k, i) && level_le(k, j)) {
                    out.push((2, format!("levels of {} and {} have no common lower bound", levels[i][0], levels[j][0])));
                }
            }
        }
        // (3) explicit Gn sets must match the derived semantics
        for (&bound, set) in &self.gn_given {
            let derived: BTreeSet<usize> =
                (0..n).filter(|&x| levels[level_idx[&x]].len() <= bound).collect();
            if set != &derived {
                out.push((3, format!("G{bound} differs from {{x : |[x]| <= {bound}}}")));
            }
        }
        // (4) P stays within levels and restricts to a group on each level
        for &(a, b, c) in &self.prod {
            if level_idx[&a] != level_idx[&b] || level_idx[&b] != level_idx[&c] {
                out.push((4, format!("P({a},{b},{c}) crosses levels")));
            }
        }
        let mut level_groups: Vec<Option<(FiniteGroup, Vec<usize>)>> = Vec::new();
        for level in &levels {
            match self.level_group(level) {
                Ok(pair) => level_groups.push(Some(pair)),
                Err(witness) => {
                    out.push((4, witness));
                    level_groups.push(None);
                }
            }
        }
        // (5) families: members are subgroups, conjugation-closed per level
        for (p, fam) in &self.families {
            for member in fam {
                let Some(&first) = member.iter().next() else {
                    out.push((5, format!("family {p} has an empty member")));
                    continue;
                };
                let li = level_idx[&first];
                if !member.iter().all(|&x| level_idx[&x] == li) {
                    out.push((5, format!("family {p} member {member:?} crosses levels")));
                    continue;
                }
                let Some((grp, points)) = &level_groups[li] else { continue };
                let to_local: HashMap<usize, usize> =
                    points.iter().enumerate().map(|(i, &x)| (x, i)).collect();
                let local: Vec<usize> = member.iter().map(|x| to_local[x]).collect();
                match Subgroup::new(grp, local.iter().copied()) {
                    Ok(sub) => {
                        for g in grp.elements() {
                            let conj = sub.conjugate(grp, g);
                            let conj_points: BTreeSet<usize> =
                                conj.elements().iter().map(|&i| points[i]).collect();
                            if !fam.iter().any(|m| m == &conj_points) {
                                out.push((5, format!(
                                    "family {p} member {member:?} misses its conjugate under local element {g}"
                                )));
                                break;
                            }
                        }
                    }
                    Err(_) => {
                        out.push((5, format!("family {p} member {member:?} is not a subgroup of its level")));
                    }
                }
            }
        }
        // (6) sqsub implies leq; defines pile epimorphisms between levels
        for a in 0..n {
            for b in 0..n {
                if self.sqsub(a, b) && !self.leq(a, b) {
                    out.push((6, format!("{a} sqsub {b} without {a} leq {b}")));
                }
            }
        }
        let mut proj: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for i in 0..levels.len() {
            for j in 0..levels.len() {
                if !level_le(i, j) {
                    continue;
                }
                let mut map = Vec::with_capacity(levels[i].len());
                let mut ok = true;
                for &u in &levels[i] {
                    let images: Vec<usize> =
                        levels[j].iter().copied().filter(|&v| self.sqsub(u, v)).collect();
                    if images.len() != 1 {
                        out.push((6, format!(
                            "point {u} has {} sqsub-images in the level of {}",
                            images.len(),
                            levels[j][0]
                        )));
                        ok = false;
                        break;
                    }
                    map.push(images[0]);
                }
                if !ok {
                    continue;
                }
                // group homomorphism + pile epimorphism between the levels
                if let (Some((gi, pi)), Some((gj, pj))) = (&level_groups[i], &level_groups[j]) {
                    let to_local_j: HashMap<usize, usize> =
                        pj.iter().enumerate().map(|(k, &x)| (x, k)).collect();
                    let local_map: Vec<usize> =
                        map.iter().map(|&v| to_local_j[&v]).collect();
                    // reorder from level order to group element order
                    let to_local_i: HashMap<usize, usize> =
                        pi.iter().enumerate().map(|(k, &x)| (x, k)).collect();
                    let mut elem_map = vec![0usize; gi.order()];
                    for (pos, &u) in levels[i].iter().enumerate() {
                        elem_map[to_local_i[&u]] = local_map[pos];
                    }
                    match GroupHom::new(gi.clone(), gj.clone(), elem_map) {
                        Ok(hom) => {
                            if !hom.is_surjective() {
                                out.push((6, format!(
                                    "projection from the level of {} to the level of {} is not surjective",
                                    levels[i][0], levels[j][0]
                                )));
                            } else {
                                // family surjectivity
                                for (p, fam) in &self.families {
                                    let fam_i: Vec<BTreeSet<usize>> = fam
                                        .iter()
                                        .filter(|m| m.iter().all(|x| levels[i].contains(x)))
                                        .cloned()
                                        .collect();
                                    let fam_j: BTreeSet<BTreeSet<usize>> = fam
                                        .iter()
                                        .filter(|m| m.iter().all(|x| levels[j].contains(x)))
                                        .cloned()
                                        .collect();
                                    let pushed: BTreeSet<BTreeSet<usize>> = fam_i
                                        .iter()
                                        .map(|m| {
                                            m.iter()
                                                .map(|&u| {
                                                    let pos = levels[i].iter().position(|&w| w == u).unwrap();
                                                    map[pos]
                                                })
                                                .collect()
                                        })
                                        .collect();
                                    if pushed != fam_j {
                                        out.push((6, format!(
                                            "family {p} does not push onto the level of {}",
                                            levels[j][0]
                                        )));
                                    }
                                }
                            }
                        }
                        Err(_) => out.push((6, format!(
                            "projection from the level of {} to the level of {} is not a homomorphism",
                            levels[i][0], levels[j][0]
                        ))),
                    }
                }
                proj.insert((i, j), map);
            }
        }
        // (7) identity and composition of the projections
        for (i, level) in levels.iter().enumerate() {
            if let Some(map) = proj.get(&(i, i)) {
                if map != level {
                    out.push((7, format!("projection on the level of {} is not the identity", level[0])));
                }
            }
        }
        for i in 0..levels.len() {
            for j in 0..levels.len() {
                for k in 0..levels.len() {
                    if level_le(i, j) && level_le(j, k) {
                        let (Some(pij), Some(pjk), Some(pik)) =
                            (proj.get(&(i, j)), proj.get(&(j, k)), proj.get(&(i, k)))
                        else {
                            continue;
                        };
                        let composed: Vec<usize> = pij
                            .iter()
                            .map(|&v| {
                                let pos = levels[j].iter().position(|&w| w == v).unwrap();
                                pjk[pos]
                            })
                            .collect();
                        if &composed != pik {
                            out.push((7, format!(
                                "projections do not compose between the levels of {}, {}, {}",
                                levels[i][0], levels[j][0], levels[k][0]
                            )));
                        }
                    }
                }
            }
        }
        // (8) every normal subgroup of a level is a unique projection kernel
        for (i, level) in levels.iter().enumerate() {
            let Some((grp, points)) = &level_groups[i] else { continue };
            let Ok(normals) = group::normal_subgroups(grp) else { continue };
            for nsub in normals {
                let kernel_points: BTreeSet<usize> =
                    nsub.elements().iter().map(|&e| points[e]).collect();
                let mut hits = 0;
                for j in 0..levels.len() {
                    if let Some(map) = proj.get(&(i, j)) {
                        // kernel = points of [x] mapping to the image of the
                        // local identity
                        let id_local = points[0]; // points[0] is the identity by level_group
                        let pos = level.iter().position(|&w| w == id_local).unwrap();
                        let id_img = map[pos];
                        let ker: BTreeSet<usize> = level
                            .iter()
                            .enumerate()
                            .filter(|&(pos, _)| map[pos] == id_img)
                            .map(|(_, &u)| u)
                            .collect();
                        if ker == kernel_points {
                            hits += 1;
                        }
                    }
                }
                if hits != 1 {
                    out.push((8, format!(
                        "normal subgroup {kernel_points:?} of the level of {} is the kernel of {hits} projections, expected exactly one",
                        level[0]
                    )));
                }
            }
        }
        // (9) S = union of the Gn: automatic for finite systems with the
        // derived semantics; recorded here for completeness.
        out
    }

    /// The group structure on a level: returns the group together with the
    /// points reordered so the identity sits first (index 0), remaining
    /// points in ascending order. The witness string names the failure.
    fn level_group(&self, level: &[usize]) -> std::result::Result<(FiniteGroup, Vec<usize>), String> {
        let k = level.len();
        let pos: HashMap<usize, usize> = level.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut table = vec![vec![usize::MAX; k]; k];
        for &(a, b, c) in &self.prod {
            if let (Some(&ia), Some(&ib), Some(&ic)) = (pos.get(&a), pos.get(&b), pos.get(&c)) {
                if table[ia][ib] != usize::MAX {
                    return Err(format!("P is multivalued at ({a},{b})"));
                }
                table[ia][ib] = ic;
            }
        }
        for (ia, row) in table.iter().enumerate() {
            for (ib, &c) in row.iter().enumerate() {
                if c == usize::MAX {
                    return Err(format!(
                        "P is undefined at ({},{})",
                        level[ia], level[ib]
                    ));
                }
            }
        }
        // locate the identity: the unique idempotent
        let ids: Vec<usize> = (0..k).filter(|&i| table[i][i] == i).collect();
        let id = match ids.as_slice() {
            [only] => *only,
            _ => {
                // a group has exactly one idempotent; pick the two-sided
                // identity if present
                match (0..k).find(|&i| (0..k).all(|j| table[i][j] == j && table[j][i] == j)) {
                    Some(i) => i,
                    None => return Err(format!("the level of {} has no identity", level[0])),
                }
            }
        };
        // reorder: identity first
        let mut order: Vec<usize> = (0..k).collect();
        order.retain(|&i| i != id);
        order.insert(0, id);
        let back: HashMap<usize, usize> =
            order.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let mul: Vec<Vec<usize>> = order
            .iter()
            .map(|&a| order.iter().map(|&b| back[&table[a][b]]).collect())
            .collect();
        let grp = FiniteGroup::from_table(mul, None)
            .map_err(|e| format!("the level of {} is not a group: {e}", level[0]))?;
        let points: Vec<usize> = order.iter().map(|&i| level[i]).collect();
        Ok((grp, points))
    }

    /// Reconstructs the pile of the unique minimal level.
    pub fn decode(&self) -> Result<GroupPile> {
        let diags = self.validate_axioms();
        if let Some((axiom, witness)) = diags.into_iter().next() {
            return Err(Error::AxiomViolation { axiom, witness });
        }
        let levels = self.levels();
        let minimal: Vec<usize> = (0..levels.len())
            .filter(|&i| (0..levels.len()).all(|j| self.leq(levels[i][0], levels[j][0])))
            .collect();
        let &[min_idx] = minimal.as_slice() else {
            return Err(Error::AxiomViolation {
                axiom: 2,
                witness: format!("{} minimal levels, expected exactly one", minimal.len()),
            });
        };
        let (grp, points) = self
            .level_group(&levels[min_idx])
            .map_err(|witness| Error::AxiomViolation { axiom: 4, witness })?;
        let to_local: HashMap<usize, usize> =
            points.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut families: Vec<(Label, Vec<Subgroup>)> = Vec::new();
        for (p, fam) in &self.families {
            let mut members = Vec::new();
            for m in fam {
                if m.iter().all(|x| to_local.contains_key(x)) {
                    members.push(Subgroup::new(&grp, m.iter().map(|x| to_local[x]))?);
                }
            }
            families.push((p.clone(), members));
        }
        GroupPile::deficient(grp, families)
    }
}

/// Encodes a finite deficient pile as its inverse system.
///
/// Levels are the normal subgroups of the group sorted by (size, elements);
/// within a level, cosets are ordered by their minimal element. The coset of
/// the identity modulo the trivial subgroup therefore gets point 0, and on
/// encodings the decoded pile is literally the original.
pub fn encode(pile: &GroupPile) -> Result<InverseSystem> {
    encode_levels(pile, None)
}

/// Truncated encoding keeping only the levels of index at most `bound`.
///
/// Truncations are meant for bounded cosatisfaction against large groups;
/// they need not satisfy the directedness and completeness axioms.
pub fn encode_upto(pile: &GroupPile, bound: usize) -> Result<InverseSystem> {
    encode_levels(pile, Some(bound))
}

fn encode_levels(pile: &GroupPile, bound: Option<usize>) -> Result<InverseSystem> {
    if !pile.is_deficient() {
        return Err(Error::pre("encode: the pile is not deficient"));
    }
    let grp = pile.group();
    let mut normals = group::normal_subgroups(grp)?;
    if let Some(b) = bound {
        normals.retain(|n| grp.order() / n.len() <= b);
    }
    // normals are sorted by (size, elements); the trivial subgroup is first
    struct Level {
        index: usize,               // (G : N)
        cosets: Vec<Vec<usize>>,    // each sorted; ordered by minimal element
        point0: usize,              // id of the first coset point
        coset_of: Vec<usize>,       // element -> coset position
        sub: Subgroup,
    }
    let mut levels: Vec<Level> = Vec::new();
    let mut next_point = 0usize;
    for n in &normals {
        let mut coset_of = vec![usize::MAX; grp.order()];
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        for e in grp.elements() {
            if coset_of[e] != usize::MAX {
                continue;
            }
            let mut coset: Vec<usize> =
                n.elements().iter().map(|&h| grp.mul(e, h)).collect();
            coset.sort_unstable();
            let idx = cosets.len();
            for &x in &coset {
                coset_of[x] = idx;
            }
            cosets.push(coset);
        }
        // cosets are discovered in order of minimal element because elements
        // are scanned ascending
        levels.push(Level {
            index: grp.order() / n.len(),
            cosets,
            point0: next_point,
            coset_of,
            sub: n.clone(),
        });
        next_point += grp.order() / n.len();
    }
    let n_points = next_point;
    let mut leq_pairs = Vec::new();
    let mut sqsub_pairs = Vec::new();
    let mut prod = Vec::new();
    for (i, li) in levels.iter().enumerate() {
        for (j, lj) in levels.iter().enumerate() {
            if !li.sub.is_subset_of(&lj.sub) {
                continue;
            }
            for (a, coset_a) in li.cosets.iter().enumerate() {
                let pa = li.point0 + a;
                // the unique coset of lj containing coset_a
                let target = lj.coset_of[coset_a[0]];
                for b in 0..lj.cosets.len() {
                    let pb = lj.point0 + b;
                    leq_pairs.push((pa, pb));
                    if b == target {
                        sqsub_pairs.push((pa, pb));
                    }
                }
            }
            let _ = (i, j);
        }
    }
    for li in &levels {
        for (a, coset_a) in li.cosets.iter().enumerate() {
            for (b, coset_b) in li.cosets.iter().enumerate() {
                let c = li.coset_of[grp.mul(coset_a[0], coset_b[0])];
                prod.push((li.point0 + a, li.point0 + b, li.point0 + c));
            }
        }
    }
    let mut gn_given: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let indices: BTreeSet<usize> = levels.iter().map(|l| l.index).collect();
    for &n in &indices {
        let set: BTreeSet<usize> = levels
            .iter()
            .filter(|l| l.index <= n)
            .flat_map(|l| (0..l.cosets.len()).map(move |c| l.point0 + c))
            .collect();
        gn_given.insert(n, set);
    }
    let mut families: BTreeMap<Label, Vec<BTreeSet<usize>>> = BTreeMap::new();
    for (p, fam) in pile.families() {
        let mut sets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        for gamma in fam {
            for level in &levels {
                let image: BTreeSet<usize> = gamma
                    .elements()
                    .iter()
                    .map(|&x| level.point0 + level.coset_of[x])
                    .collect();
                sets.insert(image);
            }
        }
        families.insert(p.clone(), sets.into_iter().collect());
    }
    InverseSystem::from_parts(n_points, leq_pairs, sqsub_pairs, prod, gn_given, families)
}

/// An injective point map preserving all relations in both directions.
#[derive(Clone, Debug)]
pub struct SystemEmbedding {
    pub dom: InverseSystem,
    pub cod: InverseSystem,
    pub map: Vec<usize>,
}

impl SystemEmbedding {
    pub fn new(dom: InverseSystem, cod: InverseSystem, map: Vec<usize>) -> Result<Self> {
        let emb = SystemEmbedding { dom, cod, map };
        emb.validate()?;
        Ok(emb)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.dom;
        let c = &self.cod;
        if self.map.len() != d.n_points() {
            return Err(Error::InvalidInput("embedding map has the wrong length".into()));
        }
        let mut seen = BTreeSet::new();
        for &y in &self.map {
            if y >= c.n_points() || !seen.insert(y) {
                return Err(Error::InvalidInput("embedding map is not injective".into()));
            }
        }
        for a in 0..d.n_points() {
            for b in 0..d.n_points() {
                if d.leq(a, b) != c.leq(self.map[a], self.map[b]) {
                    return Err(Error::InvalidInput(format!(
                        "embedding does not preserve leq at ({a},{b})"
                    )));
                }
                if d.sqsub(a, b) != c.sqsub(self.map[a], self.map[b]) {
                    return Err(Error::InvalidInput(format!(
                        "embedding does not preserve sqsub at ({a},{b})"
                    )));
                }
            }
        }
        // P both ways within mapped levels
        for a in 0..d.n_points() {
            let level = d.level_of(a);
            if c.level_of(self.map[a]).len() != level.len() {
                return Err(Error::InvalidInput(format!(
                    "embedding changes the level size at {a}"
                )));
            }
            for &b in &level {
                for &e in &level {
                    let fwd = d.p(a, b, e);
                    let img = c.p(self.map[a], self.map[b], self.map[e]);
                    if fwd != img {
                        return Err(Error::InvalidInput(format!(
                            "embedding does not preserve P at ({a},{b},{e})"
                        )));
                    }
                }
            }
        }
        // families both ways, level by level
        let d_levels = d.levels();
        for (p, fam_d) in d.families() {
            let fam_c = c
                .families()
                .get(p)
                .ok_or_else(|| Error::InvalidInput(format!("label {p} missing on target")))?;
            for level in &d_levels {
                let img_level: BTreeSet<usize> = level.iter().map(|&x| self.map[x]).collect();
                let from_d: BTreeSet<BTreeSet<usize>> = fam_d
                    .iter()
                    .filter(|m| m.iter().all(|x| level.contains(x)))
                    .map(|m| m.iter().map(|&x| self.map[x]).collect())
                    .collect();
                let in_c: BTreeSet<BTreeSet<usize>> = fam_c
                    .iter()
                    .filter(|m| m.iter().all(|x| img_level.contains(x)))
                    .cloned()
                    .collect();
                if from_d != in_c {
                    return Err(Error::InvalidInput(format!(
                        "embedding does not preserve the family {p} on the level of {}",
                        level[0]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The dual of a pile epimorphism `f: G -> H` between deficient piles: the
/// embedding of `S(H)` into `S(G)` sending the coset `hN` to `g f^{-1}(N)`.
pub fn dual_epi(f: &PileHom) -> Result<SystemEmbedding> {
    if !f.is_pile_epi() {
        return Err(Error::pre("dual_epi: f is not a pile epimorphism"));
    }
    if !f.dom().is_deficient() || !f.cod().is_deficient() {
        return Err(Error::pre("dual_epi: both piles must be deficient"));
    }
    let s_h = encode(f.cod())?;
    let s_g = encode(f.dom())?;
    let g_grp = f.dom().group();
    let h_grp = f.cod().group();
    // point layout of an encoding mirrors encode_levels: rebuild it
    let h_normals = group::normal_subgroups(h_grp)?;
    let g_normals = group::normal_subgroups(g_grp)?;
    let g_level_start: Vec<usize> = {
        let mut acc = 0;
        g_normals
            .iter()
            .map(|n| {
                let s = acc;
                acc += g_grp.order() / n.len();
                s
            })
            .collect()
    };
    let mut map = Vec::new();
    for n in &h_normals {
        let preimage = f.underlying().preimage_of(n);
        let g_level = g_normals
            .iter()
            .position(|m| m == &preimage)
            .expect("preimages of normal subgroups are normal");
        // coset ids in both levels are ordered by minimal element
        let mut h_coset_of = vec![usize::MAX; h_grp.order()];
        let mut h_cosets = 0usize;
        let mut h_coset_ids = vec![usize::MAX; h_grp.order()];
        for e in h_grp.elements() {
            if h_coset_of[e] != usize::MAX {
                continue;
            }
            for &x in n.elements() {
                h_coset_of[h_grp.mul(e, x)] = h_cosets;
            }
            h_coset_ids[e] = h_cosets;
            h_cosets += 1;
        }
        let mut g_coset_of = vec![usize::MAX; g_grp.order()];
        let mut g_cosets = 0usize;
        for e in g_grp.elements() {
            if g_coset_of[e] != usize::MAX {
                continue;
            }
            for &x in preimage.elements() {
                g_coset_of[g_grp.mul(e, x)] = g_cosets;
            }
            g_cosets += 1;
        }
        // for each H-coset (ordered by minimal element) pick any preimage
        for coset in 0..h_cosets {
            let h_rep = h_grp.elements().find(|&e| h_coset_of[e] == coset).unwrap();
            let g_rep = g_grp
                .elements()
                .find(|&g| f.apply(g) == h_rep)
                .expect("f is surjective");
            map.push(g_level_start[g_level] + g_coset_of[g_rep]);
        }
    }
    SystemEmbedding::new(s_h, s_g, map)
}

/// The dual of a system embedding `psi: T -> S`: the pile epimorphism
/// `G(S) -> G(T)` obtained by projecting the minimal level of `S` onto the
/// image of the minimal level of `T` and transporting back along `psi`.
pub fn dual_embedding(psi: &SystemEmbedding) -> Result<PileHom> {
    let g_s = psi.cod.decode()?;
    let g_t = psi.dom.decode()?;
    let s = &psi.cod;
    let t = &psi.dom;
    let s_levels = s.levels();
    let t_levels = t.levels();
    let min_of = |sys: &InverseSystem, levels: &[Vec<usize>]| -> Result<usize> {
        (0..levels.len())
            .find(|&i| (0..levels.len()).all(|j| sys.leq(levels[i][0], levels[j][0])))
            .ok_or_else(|| Error::AxiomViolation {
                axiom: 2,
                witness: "no minimal level".into(),
            })
    };
    let s_min = min_of(s, &s_levels)?;
    let t_min = min_of(t, &t_levels)?;
    // decoded element order: identity first, then ascending point id
    let s_points = level_points_in_group_order(s, &s_levels[s_min])?;
    let t_points = level_points_in_group_order(t, &t_levels[t_min])?;
    // project the minimal S level onto the psi-image of the minimal T level
    let image_level: Vec<usize> = t_levels[t_min].iter().map(|&x| psi.map[x]).collect();
    let mut map = Vec::with_capacity(s_points.len());
    for &u in &s_points {
        let v = image_level
            .iter()
            .copied()
            .find(|&v| s.sqsub(u, v))
            .ok_or_else(|| Error::AxiomViolation {
                axiom: 6,
                witness: format!("point {u} has no projection onto the image level"),
            })?;
        // pull back along psi, then locate in the decoded T group
        let t_point = t_levels[t_min][image_level.iter().position(|&w| w == v).unwrap()];
        let idx = t_points.iter().position(|&w| w == t_point).unwrap();
        map.push(idx);
    }
    let hom = GroupHom::new(g_s.group().clone(), g_t.group().clone(), map)?;
    let pile_hom = PileHom::new(g_s, g_t, hom)?;
    if !pile_hom.is_pile_epi() {
        return Err(Error::pre("dual_embedding: the dual map is not a pile epimorphism"));
    }
    Ok(pile_hom)
}

fn level_points_in_group_order(sys: &InverseSystem, level: &[usize]) -> Result<Vec<usize>> {
    // identity = unique idempotent of the level
    let id = level
        .iter()
        .copied()
        .find(|&u| sys.p(u, u, u))
        .ok_or_else(|| Error::AxiomViolation {
            axiom: 4,
            witness: format!("the level of {} has no identity", level[0]),
        })?;
    let mut pts: Vec<usize> = level.iter().copied().filter(|&u| u != id).collect();
    pts.sort_unstable();
    pts.insert(0, id);
    Ok(pts)
}

/// The truncated inverse system of the absolute Galois group of a finite
/// field: one level `Z/d` for every `d <= max_index`, with the canonical
/// projections. Level `d` point `r` stands for the Frobenius power `r`
/// modulo `d`.
///
/// Truncations at `max_index > 1` are not directed (two levels can lack a
/// common refinement below the cut-off), so this is for bounded evaluation
/// only, not for [`InverseSystem::decode`].
pub fn frobenius_system(max_index: usize) -> InverseSystem {
    let mut offsets = Vec::new();
    let mut acc = 0usize;
    for d in 1..=max_index {
        offsets.push(acc);
        acc += d;
    }
    let point = |d: usize, r: usize| offsets[d - 1] + r;
    let mut leq = Vec::new();
    let mut sqsub = Vec::new();
    let mut prod = Vec::new();
    for d in 1..=max_index {
        for dd in 1..=max_index {
            if d % dd != 0 {
                continue;
            }
            for r in 0..d {
                for rr in 0..dd {
                    leq.push((point(d, r), point(dd, rr)));
                    if r % dd == rr {
                        sqsub.push((point(d, r), point(dd, rr)));
                    }
                }
            }
        }
        for a in 0..d {
            for b in 0..d {
                prod.push((point(d, a), point(d, b), point(d, (a + b) % d)));
            }
        }
    }
    InverseSystem::from_parts(acc, leq, sqsub, prod, BTreeMap::new(), BTreeMap::new())
        .expect("frobenius system construction is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    use crate::group::generated;
    use crate::pile::deficient_pile_corpus;

    fn bare(g: FiniteGroup) -> GroupPile {
        GroupPile::bare(g, ["p".to_string()])
    }

    #[test]
    fn point_counts() {
        // trivial pile: one point
        let s = encode(&bare(FiniteGroup::trivial())).unwrap();
        assert_eq!(s.n_points(), 1);
        // Z2: levels {1}, Z2 -> 2 + 1 = 3 points
        let s = encode(&bare(FiniteGroup::cyclic(2))).unwrap();
        assert_eq!(s.n_points(), 3);
        // Z4: 4 + 2 + 1 = 7 points
        let s = encode(&bare(FiniteGroup::cyclic(4))).unwrap();
        assert_eq!(s.n_points(), 7);
    }

    #[test]
    fn encode_passes_axioms() {
        for g in [
            FiniteGroup::trivial(),
            FiniteGroup::cyclic(4),
            FiniteGroup::symmetric(3),
            FiniteGroup::dicyclic(2),
        ] {
            let s = encode(&bare(g)).unwrap();
            let diags = s.validate_axioms();
            assert!(diags.is_empty(), "{diags:?}");
        }
    }

    #[test]
    fn decode_roundtrip_exact() {
        let s3 = FiniteGroup::symmetric(3);
        let t = s3.elements().find(|&e| s3.element_order(e) == 2).unwrap();
        let h = generated(&s3, &[t]);
        let pile = GroupPile::deficient(s3, [("p".to_string(), vec![h])]).unwrap();
        let decoded = encode(&pile).unwrap().decode().unwrap();
        // with the canonical point ordering the round trip is literal
        assert_eq!(decoded.group().mul_rows(), pile.group().mul_rows());
        assert_eq!(decoded.families(), pile.families());
    }

    #[test]
    fn decode_handbuilt_z2() {
        // three points: level {0} (two cosets: points 0, 1), level Z2 (point 2)
        let sys = InverseSystem::from_parts(
            3,
            vec![(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (1, 2), (2, 2)],
            vec![(0, 0), (1, 1), (0, 2), (1, 2), (2, 2)],
            vec![
                (0, 0, 0),
                (0, 1, 1),
                (1, 0, 1),
                (1, 1, 0),
                (2, 2, 2),
            ],
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        assert!(sys.validate_axioms().is_empty());
        let pile = sys.decode().unwrap();
        assert_eq!(pile.group().order(), 2);
    }

    #[test]
    fn mutated_system_fails_axiom4() {
        let s = encode(&bare(FiniteGroup::cyclic(2))).unwrap();
        // break P on the bottom level: make 1*1 = 1 (idempotent non-identity)
        let mut prod = s.prod.clone();
        prod.remove(&(1, 1, 0));
        prod.insert((1, 1, 1));
        let broken = InverseSystem { prod, ..s };
        let diags = broken.validate_axioms();
        assert!(diags.iter().any(|(a, _)| *a == 4), "{diags:?}");
    }

    #[test]
    fn truncation_at_top_is_the_quotient_system() {
        // keeping only the levels of index <= 2 of Z4 yields the encoding of
        // the order-2 quotient, still a valid system
        let pile = bare(FiniteGroup::cyclic(4));
        let s = encode_upto(&pile, 2).unwrap();
        assert_eq!(s.n_points(), 3);
        assert!(s.validate_axioms().is_empty());
    }

    #[test]
    fn deleted_middle_level_fails_axiom8() {
        // drop the index-2 level of Z4 (points 4, 5 of the full encoding):
        // the bottom level keeps a normal subgroup with no kernel witness
        let pile = bare(FiniteGroup::cyclic(4));
        let s = encode(&pile).unwrap();
        assert_eq!(s.n_points(), 7);
        let keep = [0usize, 1, 2, 3, 6];
        let renum = |x: usize| keep.iter().position(|&k| k == x);
        let filter_pairs = |m: &dyn Fn(usize, usize) -> bool| {
            let mut out = Vec::new();
            for &a in &keep {
                for &b in &keep {
                    if m(a, b) {
                        out.push((renum(a).unwrap(), renum(b).unwrap()));
                    }
                }
            }
            out
        };
        let leq = filter_pairs(&|a, b| s.leq(a, b));
        let sq = filter_pairs(&|a, b| s.sqsub(a, b));
        let mut prod = Vec::new();
        for &a in &keep {
            for &b in &keep {
                for &c in &keep {
                    if s.p(a, b, c) {
                        prod.push((
                            renum(a).unwrap(),
                            renum(b).unwrap(),
                            renum(c).unwrap(),
                        ));
                    }
                }
            }
        }
        let broken =
            InverseSystem::from_parts(5, leq, sq, prod, BTreeMap::new(), BTreeMap::new())
                .unwrap();
        let diags = broken.validate_axioms();
        assert!(diags.iter().any(|(a, _)| *a == 8), "{diags:?}");
    }

    #[test]
    fn roundtrip_over_corpus() {
        // every catalog group up to order 16 contributes piles
        let mut corpus = Vec::new();
        for g in catalog::catalog_upto(16) {
            corpus.extend(deficient_pile_corpus(&[g], &["p"], 1, 3));
        }
        assert!(corpus.len() >= 42 * 2);
        for pile in &corpus {
            let decoded = encode(pile).unwrap().decode().unwrap();
            assert!(decoded.is_isomorphic_to(pile), "{pile:?}");
        }
    }

    #[test]
    fn dual_epi_z4_to_z2() {
        let z4 = bare(FiniteGroup::cyclic(4));
        let n = Subgroup::new(z4.group(), [0, 2]).unwrap();
        let (_, hom) = z4.quotient(&n).unwrap();
        let emb = dual_epi(&hom).unwrap();
        assert_eq!(emb.dom.n_points(), 3);
        assert_eq!(emb.cod.n_points(), 7);
        emb.validate().unwrap();
    }

    #[test]
    fn dual_of_identity_is_identity() {
        let pile = bare(FiniteGroup::symmetric(3));
        let emb = dual_epi(&crate::pile::PileHom::identity(&pile)).unwrap();
        let expected: Vec<usize> = (0..emb.dom.n_points()).collect();
        assert_eq!(emb.map, expected);
    }

    #[test]
    fn dual_embedding_inverts_dual_epi() {
        let groups = catalog::catalog_upto(12);
        let piles = deficient_pile_corpus(&groups, &["p"], 1, 40);
        let mut checked = 0;
        for pile in &piles {
            for n in group::normal_subgroups(pile.group()).unwrap() {
                let (_, hom) = pile.quotient(&n).unwrap();
                let emb = dual_epi(&hom).unwrap();
                let back = dual_embedding(&emb).unwrap();
                assert_eq!(
                    back.underlying().map_table(),
                    hom.underlying().map_table(),
                    "pile {pile:?} N {n:?}"
                );
                checked += 1;
            }
        }
        assert!(checked > 30);
    }

    #[test]
    fn dual_epi_functorial() {
        // f: Z8 -> Z4, g: Z4 -> Z2; (f then g)* = g* then f*
        let z8 = bare(FiniteGroup::cyclic(8));
        let n1 = Subgroup::new(z8.group(), [0, 4]).unwrap();
        let (q1, f) = z8.quotient(&n1).unwrap();
        let n2 = Subgroup::new(q1.group(), [0, 2]).unwrap();
        let (_, g) = q1.quotient(&n2).unwrap();
        let fg = f.then(&g).unwrap();
        let dual_fg = dual_epi(&fg).unwrap();
        let dual_f = dual_epi(&f).unwrap();
        let dual_g = dual_epi(&g).unwrap();
        let composed: Vec<usize> = dual_g.map.iter().map(|&x| dual_f.map[x]).collect();
        assert_eq!(dual_fg.map, composed);
    }

    #[test]
    fn frobenius_levels() {
        let s = frobenius_system(3);
        assert_eq!(s.n_points(), 6);
        // point (2, 1) sqsub (1, 0); (2,1) and (3,1) unrelated
        assert!(s.sqsub(1 + 1, 0));
        assert!(!s.leq(1 + 1, 3 + 1));
        // P on level 3: 1 + 2 = 0 mod 3
        assert!(s.p(3 + 1, 3 + 2, 3));
    }
}
