//! Finite groups given by full Cayley tables, their subgroups, quotients and
//! homomorphisms.
//!
//! Element indices are canonical: `0` is the identity, and the ordering is
//! part of the value: two groups with permuted tables are distinct values,
//! isomorphic only via explicit maps. All values are immutable after
//! construction and every operation is a pure function.

use crate::error::{Error, Result};
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

/// Default cap on group order for Cayley-table storage.
pub const MAX_ORDER: usize = 255;

/// Default cap on enumerated subgroups.
pub const DEFAULT_SUBGROUP_LIMIT: u64 = 1_000_000;

#[derive(PartialEq, Eq, Hash)]
struct GroupData {
    order: usize,
    /// Flattened `order x order` multiplication table, `mul[a*order+b] = a·b`.
    mul: Vec<usize>,
    inv: Vec<usize>,
}

/// A finite group with identity fixed at element index 0.
///
/// Cheap to clone (shared table). Equality is structural on the table; the
/// optional name is metadata only.
#[derive(Clone)]
pub struct FiniteGroup {
    data: Arc<GroupData>,
    name: Option<Arc<str>>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}
impl Eq for FiniteGroup {}

impl std::hash::Hash for FiniteGroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.data.hash(state);
    }
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name().unwrap_or("?"), self.order())
    }
}

impl FiniteGroup {
    /// Builds a group from a multiplication table, validating all axioms.
    ///
    /// The table must be in element indices `0..order` with 0 the two-sided
    /// identity. Rejection diagnostics name the failed axiom and a witness.
    pub fn from_table(mul: Vec<Vec<usize>>, name: Option<String>) -> Result<Self> {
        let order = mul.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if order > MAX_ORDER {
            return Err(Error::InvalidGroup(format!(
                "order {order} exceeds the table cap {MAX_ORDER}"
            )));
        }
        let mut flat = Vec::with_capacity(order * order);
        for (a, row) in mul.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidGroup(format!(
                    "row {a} has length {} but order is {order}",
                    row.len()
                )));
            }
            for (b, &c) in row.iter().enumerate() {
                if c >= order {
                    return Err(Error::InvalidGroup(format!(
                        "entry mul[{a}][{b}] = {c} is out of range"
                    )));
                }
                flat.push(c);
            }
        }
        // identity axiom
        for a in 0..order {
            if flat[a] != a {
                return Err(Error::InvalidGroup(format!(
                    "0 is not a left identity: 0·{a} = {}",
                    flat[a]
                )));
            }
            if flat[a * order] != a {
                return Err(Error::InvalidGroup(format!(
                    "0 is not a right identity: {a}·0 = {}",
                    flat[a * order]
                )));
            }
        }
        // inverses (solve a·x = 0; then check two-sidedness)
        let mut inv = vec![usize::MAX; order];
        for a in 0..order {
            match (0..order).find(|&x| flat[a * order + x] == 0) {
                Some(x) => {
                    if flat[x * order + a] != 0 {
                        return Err(Error::InvalidGroup(format!(
                            "inverse of {a} is one-sided: {a}·{x} = 0 but {x}·{a} = {}",
                            flat[x * order + a]
                        )));
                    }
                    inv[a] = x;
                }
                None => {
                    return Err(Error::InvalidGroup(format!("element {a} has no inverse")))
                }
            }
        }
        // associativity, all triples
        for a in 0..order {
            for b in 0..order {
                let ab = flat[a * order + b];
                for c in 0..order {
                    let bc = flat[b * order + c];
                    if flat[ab * order + c] != flat[a * order + bc] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at triple ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            data: Arc::new(GroupData { order, mul: flat, inv }),
            name: name.map(|n| n.into()),
        })
    }

    /// Builds a group from permutation generators on `degree` points.
    ///
    /// The group is the closure of the generators under composition; the
    /// identity permutation gets index 0 and the remaining elements are
    /// ordered by first discovery in a breadth-first closure, which is
    /// deterministic in the generator list.
    pub fn from_permutations(degree: usize, gens: &[Vec<usize>], name: Option<String>) -> Result<Self> {
        for (i, g) in gens.iter().enumerate() {
            if g.len() != degree {
                return Err(Error::InvalidGroup(format!(
                    "generator {i} has length {} but degree is {degree}",
                    g.len()
                )));
            }
            let mut seen = vec![false; degree];
            for &x in g {
                if x >= degree || seen[x] {
                    return Err(Error::InvalidGroup(format!(
                        "generator {i} is not a permutation of 0..{degree}"
                    )));
                }
                seen[x] = true;
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elems: Vec<Vec<usize>> = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(id, 0);
        let mut frontier = 0;
        while frontier < elems.len() {
            let cur = elems[frontier].clone();
            for g in gens {
                // cur followed by g
                let next: Vec<usize> = cur.iter().map(|&x| g[x]).collect();
                if !index.contains_key(&next) {
                    if elems.len() >= MAX_ORDER {
                        return Err(Error::InvalidGroup(format!(
                            "permutation closure exceeds the order cap {MAX_ORDER}"
                        )));
                    }
                    index.insert(next.clone(), elems.len());
                    elems.push(next);
                }
            }
            frontier += 1;
        }
        let order = elems.len();
        let mut mul = vec![vec![0usize; order]; order];
        for a in 0..order {
            for b in 0..order {
                let prod: Vec<usize> = elems[b].iter().map(|&x| elems[a][x]).collect();
                mul[a][b] = index[&prod];
            }
        }
        FiniteGroup::from_table(mul, name)
    }

    pub fn order(&self) -> usize {
        self.data.order
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into().into());
        self
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.data.mul[a * self.data.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.data.inv[a]
    }

    #[inline]
    pub fn conj(&self, a: usize, g: usize) -> usize {
        // a^g = g a g^{-1}
        self.mul(self.mul(g, a), self.inv(g))
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.data.order
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn mul_rows(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        (0..n)
            .map(|a| (0..n).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    /// The trivial group.
    pub fn trivial() -> Self {
        FiniteGroup::from_table(vec![vec![0]], Some("1".into())).unwrap()
    }

    /// Cyclic group of order `n` with generator 1.
    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::from_table(mul, Some(format!("Z{n}"))).unwrap()
    }

    /// Dihedral group of order `2n` (symmetries of the regular n-gon), n >= 1.
    pub fn dihedral(n: usize) -> Self {
        // elements: rotation by i (indices 2i ... no; use permutation model on n points)
        let rot: Vec<usize> = (0..n).map(|x| (x + 1) % n).collect();
        let refl: Vec<usize> = (0..n).map(|x| (n - x) % n).collect();
        if n <= 2 {
            // the permutation model is not faithful for n <= 2; build directly
            let m = 2 * n;
            let mul = (0..m)
                .map(|a| {
                    (0..m)
                        .map(|b| {
                            let (i, s) = (a % n, a / n);
                            let (j, t) = (b % n, b / n);
                            let k = if s == 0 { (i + j) % n } else { (i + n - j) % n };
                            k + n * ((s + t) % 2)
                        })
                        .collect()
                })
                .collect();
            return FiniteGroup::from_table(mul, Some(format!("D{}", 2 * n))).unwrap();
        }
        FiniteGroup::from_permutations(n, &[rot, refl], Some(format!("D{}", 2 * n))).unwrap()
    }

    /// Symmetric group on `n` points.
    pub fn symmetric(n: usize) -> Self {
        if n <= 1 {
            return FiniteGroup::trivial().with_name(format!("S{n}"));
        }
        let transp: Vec<usize> = (0..n).map(|x| match x {
            0 => 1,
            1 => 0,
            i => i,
        }).collect();
        let cycle: Vec<usize> = (0..n).map(|x| (x + 1) % n).collect();
        FiniteGroup::from_permutations(n, &[transp, cycle], Some(format!("S{n}"))).unwrap()
    }

    /// Alternating group on `n` points.
    pub fn alternating(n: usize) -> Self {
        if n <= 2 {
            return FiniteGroup::trivial().with_name(format!("A{n}"));
        }
        let mut gens = Vec::new();
        // 3-cycles (0 1 i) generate A_n
        for i in 2..n {
            let mut g: Vec<usize> = (0..n).collect();
            g[0] = 1;
            g[1] = i;
            g[i] = 0;
            gens.push(g);
        }
        FiniteGroup::from_permutations(n, &gens, Some(format!("A{n}"))).unwrap()
    }

    /// Dicyclic group of order `4n` (n >= 1); `n = 2` is the quaternion group Q8.
    pub fn dicyclic(n: usize) -> Self {
        // elements a^i b^j with 0 <= i < 2n, j in {0,1};
        // relations: a^{2n} = 1, b^2 = a^n, b a b^{-1} = a^{-1}.
        let m = 4 * n;
        let two_n = 2 * n;
        let idx = |i: usize, j: usize| j * two_n + i;
        let mul = (0..m)
            .map(|x| {
                let (i1, j1) = (x % two_n, x / two_n);
                (0..m)
                    .map(|y| {
                        let (i2, j2) = (y % two_n, y / two_n);
                        // (a^i1 b^j1)(a^i2 b^j2)
                        let i2e = if j1 == 1 { (two_n - i2) % two_n } else { i2 };
                        let mut i = (i1 + i2e) % two_n;
                        let mut j = j1 + j2;
                        if j == 2 {
                            i = (i + n) % two_n;
                            j = 0;
                        }
                        idx(i, j)
                    })
                    .collect()
            })
            .collect();
        let name = if n == 2 { "Q8".to_string() } else { format!("Dic{n}") };
        FiniteGroup::from_table(mul, Some(name)).unwrap()
    }

    /// Direct product with pair ordering `(a, b) -> a*|H| + b`.
    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (self.order(), other.order());
        let mul = (0..n * m)
            .map(|x| {
                let (a1, b1) = (x / m, x % m);
                (0..n * m)
                    .map(|y| {
                        let (a2, b2) = (y / m, y % m);
                        self.mul(a1, a2) * m + other.mul(b1, b2)
                    })
                    .collect()
            })
            .collect();
        let name = match (self.name(), other.name()) {
            (Some(a), Some(b)) => Some(format!("{a}x{b}")),
            _ => None,
        };
        FiniteGroup::from_table(mul, name).unwrap()
    }

    /// Semidirect product `N ⋊ H` for an action of `H` on `N` by automorphisms.
    ///
    /// `action(h)` must return the automorphism of `N` induced by `h` as an
    /// element table; pair ordering is `(n, h) -> n*|H| + h` with product
    /// `(n1,h1)(n2,h2) = (n1·φ_{h1}(n2), h1 h2)`.
    pub fn semidirect_product(
        n_grp: &FiniteGroup,
        h_grp: &FiniteGroup,
        action: impl Fn(usize) -> Vec<usize>,
        name: Option<String>,
    ) -> Result<FiniteGroup> {
        let (n, m) = (n_grp.order(), h_grp.order());
        let acts: Vec<Vec<usize>> = (0..m).map(&action).collect();
        let mul = (0..n * m)
            .map(|x| {
                let (n1, h1) = (x / m, x % m);
                (0..n * m)
                    .map(|y| {
                        let (n2, h2) = (y / m, y % m);
                        n_grp.mul(n1, acts[h1][n2]) * m + h_grp.mul(h1, h2)
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(mul, name)
    }
}

/// A subgroup, stored as the sorted set of its element indices.
///
/// A `Subgroup` value is always created against a parent group and is
/// guaranteed closed under multiplication and inverse, containing 0.
/// Ordering is by (size, lexicographic element list).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.elements.len(), &self.elements).cmp(&(other.elements.len(), &other.elements))
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.elements.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
    }
}

impl Subgroup {
    /// Validates closure and returns the subgroup.
    pub fn new(group: &FiniteGroup, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = elements.into_iter().collect();
        if set.iter().any(|&e| e >= group.order()) {
            return Err(Error::InvalidInput("subgroup element out of range".into()));
        }
        if !set.contains(&0) {
            return Err(Error::InvalidInput("subgroup does not contain the identity".into()));
        }
        for &a in &set {
            if !set.contains(&group.inv(a)) {
                return Err(Error::InvalidInput(format!(
                    "subgroup not closed under inverse at {a}"
                )));
            }
            for &b in &set {
                if !set.contains(&group.mul(a, b)) {
                    return Err(Error::InvalidInput(format!(
                        "subgroup not closed under product at ({a},{b})"
                    )));
                }
            }
        }
        Ok(Subgroup { elements: set.into_iter().collect() })
    }

    pub fn trivial() -> Self {
        Subgroup { elements: vec![0] }
    }

    pub fn full(group: &FiniteGroup) -> Self {
        Subgroup { elements: (0..group.order()).collect() }
    }

    fn from_sorted(elements: Vec<usize>) -> Self {
        Subgroup { elements }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn contains(&self, e: usize) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&e| other.contains(e))
    }

    pub fn is_normal(&self, group: &FiniteGroup) -> bool {
        self.normality_witness(group).is_none()
    }

    /// Returns a conjugating element g with H^g != H, if one exists.
    pub fn normality_witness(&self, group: &FiniteGroup) -> Option<usize> {
        (0..group.order()).find(|&g| {
            self.elements.iter().any(|&a| !self.contains(group.conj(a, g)))
        })
    }

    /// Conjugate subgroup H^g = { g a g^{-1} : a in H }.
    pub fn conjugate(&self, group: &FiniteGroup, g: usize) -> Subgroup {
        let mut elems: Vec<usize> = self.elements.iter().map(|&a| group.conj(a, g)).collect();
        elems.sort_unstable();
        Subgroup::from_sorted(elems)
    }

    /// Materializes the subgroup as a group of its own.
    ///
    /// Returns the new group together with the embedding table sending the
    /// new indices back to parent element indices. The identity keeps index
    /// 0 and the remaining elements keep their sorted order.
    pub fn as_group(&self, group: &FiniteGroup) -> (FiniteGroup, Vec<usize>) {
        let embed = self.elements.clone();
        let back: HashMap<usize, usize> =
            embed.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mul = embed
            .iter()
            .map(|&a| embed.iter().map(|&b| back[&group.mul(a, b)]).collect())
            .collect();
        (FiniteGroup::from_table(mul, None).unwrap(), embed)
    }

    /// The rank of the subgroup as a group of its own.
    pub fn rank_in(&self, group: &FiniteGroup) -> usize {
        let (sub, _) = self.as_group(group);
        rank(&sub)
    }
}

/// A total homomorphism between finite groups, stored as an image table.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupHom {
    dom: FiniteGroup,
    cod: FiniteGroup,
    map: Vec<usize>,
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupHom({:?})", self.map)
    }
}

impl GroupHom {
    /// Validates the homomorphism property on all pairs.
    pub fn new(dom: FiniteGroup, cod: FiniteGroup, map: Vec<usize>) -> Result<Self> {
        if map.len() != dom.order() {
            return Err(Error::InvalidInput(format!(
                "map has length {} but the domain has order {}",
                map.len(),
                dom.order()
            )));
        }
        if map.iter().any(|&y| y >= cod.order()) {
            return Err(Error::InvalidInput("map value out of range".into()));
        }
        if map[0] != 0 {
            return Err(Error::InvalidInput("map does not send identity to identity".into()));
        }
        for a in 0..dom.order() {
            for b in 0..dom.order() {
                if map[dom.mul(a, b)] != cod.mul(map[a], map[b]) {
                    return Err(Error::InvalidInput(format!(
                        "not a homomorphism at pair ({a},{b})"
                    )));
                }
            }
        }
        Ok(GroupHom { dom, cod, map })
    }

    pub fn identity(group: &FiniteGroup) -> Self {
        GroupHom {
            dom: group.clone(),
            cod: group.clone(),
            map: (0..group.order()).collect(),
        }
    }

    pub fn dom(&self) -> &FiniteGroup {
        &self.dom
    }

    pub fn cod(&self) -> &FiniteGroup {
        &self.cod
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn map_table(&self) -> &[usize] {
        &self.map
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.cod.order()];
        for &y in &self.map {
            hit[y] = true;
        }
        hit.iter().all(|&h| h)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.order()];
        for &y in &self.map {
            if seen[y] {
                return false;
            }
            seen[y] = true;
        }
        true
    }

    pub fn is_bijective(&self) -> bool {
        self.dom.order() == self.cod.order() && self.is_injective()
    }

    pub fn kernel(&self) -> Subgroup {
        let elems: Vec<usize> = (0..self.dom.order()).filter(|&a| self.map[a] == 0).collect();
        Subgroup::from_sorted(elems)
    }

    pub fn image(&self) -> Subgroup {
        let set: BTreeSet<usize> = self.map.iter().copied().collect();
        Subgroup::from_sorted(set.into_iter().collect())
    }

    /// Pointwise image of a subgroup of the domain.
    pub fn image_of(&self, sub: &Subgroup) -> Subgroup {
        let set: BTreeSet<usize> = sub.elements().iter().map(|&a| self.map[a]).collect();
        Subgroup::from_sorted(set.into_iter().collect())
    }

    /// Full preimage of a subgroup of the codomain.
    pub fn preimage_of(&self, sub: &Subgroup) -> Subgroup {
        let elems: Vec<usize> =
            (0..self.dom.order()).filter(|&a| sub.contains(self.map[a])).collect();
        Subgroup::from_sorted(elems)
    }

    pub fn restricted_injective_on(&self, sub: &Subgroup) -> bool {
        let mut seen = HashSet::new();
        sub.elements().iter().all(|&a| seen.insert(self.map[a]))
    }

    /// `other` after `self` (so `self.then(other) = other ∘ self`).
    pub fn then(&self, other: &GroupHom) -> Result<GroupHom> {
        if self.cod != other.dom {
            return Err(Error::InvalidInput("composition domain mismatch".into()));
        }
        Ok(GroupHom {
            dom: self.dom.clone(),
            cod: other.cod.clone(),
            map: self.map.iter().map(|&a| other.map[a]).collect(),
        })
    }

    /// Inverse of a bijective homomorphism.
    pub fn inverse(&self) -> Result<GroupHom> {
        if !self.is_bijective() {
            return Err(Error::pre("inverse of a non-bijective homomorphism"));
        }
        let mut inv = vec![0usize; self.map.len()];
        for (a, &y) in self.map.iter().enumerate() {
            inv[y] = a;
        }
        Ok(GroupHom { dom: self.cod.clone(), cod: self.dom.clone(), map: inv })
    }
}

/// The smallest subgroup of `group` containing `gens`.
pub fn generated(group: &FiniteGroup, gens: &[usize]) -> Subgroup {
    let mut in_set = vec![false; group.order()];
    in_set[0] = true;
    let mut worklist: Vec<usize> = vec![0];
    for &g in gens {
        if !in_set[g] {
            in_set[g] = true;
            worklist.push(g);
        }
    }
    // close under products; inverses follow in a finite group
    let mut i = 0;
    while i < worklist.len() {
        let a = worklist[i];
        i += 1;
        for j in 0..worklist.len() {
            let b = worklist[j];
            for c in [group.mul(a, b), group.mul(b, a)] {
                if !in_set[c] {
                    in_set[c] = true;
                    worklist.push(c);
                }
            }
        }
    }
    let mut elems: Vec<usize> = (0..group.order()).filter(|&e| in_set[e]).collect();
    elems.sort_unstable();
    Subgroup::from_sorted(elems)
}

/// Like [`generated`], with sets of seed elements given as subgroups.
pub fn generated_by_subgroups(group: &FiniteGroup, subs: &[&Subgroup], extra: &[usize]) -> Subgroup {
    let mut gens: Vec<usize> = extra.to_vec();
    for s in subs {
        gens.extend_from_slice(s.elements());
    }
    generated(group, &gens)
}

/// All subgroups of `group`, each once, sorted by (size, element list).
///
/// Cyclic subgroups seed the enumeration and pairwise joins close it.
pub fn subgroups(group: &FiniteGroup) -> Result<Vec<Subgroup>> {
    subgroups_limited(group, DEFAULT_SUBGROUP_LIMIT)
}

pub fn subgroups_limited(group: &FiniteGroup, limit: u64) -> Result<Vec<Subgroup>> {
    let mut found: BTreeSet<Subgroup> = BTreeSet::new();
    found.insert(Subgroup::trivial());
    for a in group.elements() {
        found.insert(generated(group, &[a]));
    }
    // join-closure: repeatedly adjoin <A, B> for found pairs
    loop {
        let snapshot: Vec<Subgroup> = found.iter().cloned().collect();
        let mut grew = false;
        for i in 0..snapshot.len() {
            for j in (i + 1)..snapshot.len() {
                if snapshot[i].is_subset_of(&snapshot[j])
                    || snapshot[j].is_subset_of(&snapshot[i])
                {
                    continue;
                }
                let join = generated_by_subgroups(group, &[&snapshot[i], &snapshot[j]], &[]);
                if !found.contains(&join) {
                    found.insert(join);
                    grew = true;
                    if found.len() as u64 > limit {
                        return Err(Error::capacity("subgroup enumeration", limit));
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    Ok(found.into_iter().collect())
}

/// All normal subgroups, sorted.
pub fn normal_subgroups(group: &FiniteGroup) -> Result<Vec<Subgroup>> {
    Ok(subgroups(group)?
        .into_iter()
        .filter(|s| s.is_normal(group))
        .collect())
}

/// Minimal cardinality of a generating set (0 for the trivial group).
pub fn rank(group: &FiniteGroup) -> usize {
    let n = group.order();
    if n == 1 {
        return 0;
    }
    // exhaustive search over generating sets of increasing size
    for size in 1..=n {
        let mut combo: Vec<usize> = (1..=size).collect();
        loop {
            if generated(group, &combo).len() == n {
                return size;
            }
            // next combination of {1..n-1} choose size
            let mut i = size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if combo[i] < n - (size - i) {
                    combo[i] += 1;
                    for j in (i + 1)..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    // exhausted
                    combo.clear();
                    break;
                }
            }
            if combo.is_empty() {
                break;
            }
        }
    }
    unreachable!("every finite group is generated by all its elements")
}

/// A minimal generating set found by the same search order as [`rank`].
pub fn minimal_generating_set(group: &FiniteGroup) -> Vec<usize> {
    let n = group.order();
    if n == 1 {
        return Vec::new();
    }
    for size in 1..=n {
        let mut combo: Vec<usize> = (1..=size).collect();
        loop {
            if generated(group, &combo).len() == n {
                return combo;
            }
            let mut advanced = false;
            let mut i = size;
            while i > 0 {
                i -= 1;
                if combo[i] < n - (size - i) {
                    combo[i] += 1;
                    for j in (i + 1)..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    unreachable!()
}

/// Quotient of `group` by a normal subgroup, with canonical coset ordering.
///
/// Cosets are ordered by their minimal element; the coset of the identity is
/// therefore index 0. Returns the quotient group and the projection.
pub fn quotient(group: &FiniteGroup, n: &Subgroup) -> Result<(FiniteGroup, GroupHom)> {
    if let Some(g) = n.normality_witness(group) {
        return Err(Error::NotNormal(format!("{n:?}"), g));
    }
    let order = group.order();
    let mut coset_of = vec![usize::MAX; order];
    let mut reps: Vec<usize> = Vec::new();
    for e in 0..order {
        if coset_of[e] != usize::MAX {
            continue;
        }
        let idx = reps.len();
        reps.push(e);
        for &h in n.elements() {
            coset_of[group.mul(e, h)] = idx;
        }
    }
    let q_order = reps.len();
    let mul = (0..q_order)
        .map(|a| {
            (0..q_order)
                .map(|b| coset_of[group.mul(reps[a], reps[b])])
                .collect()
        })
        .collect();
    let q = FiniteGroup::from_table(mul, None)?;
    let proj = GroupHom { dom: group.clone(), cod: q.clone(), map: coset_of };
    Ok((q, proj))
}

/// The conjugacy class `H^G` of a subgroup.
pub fn conjugates(group: &FiniteGroup, h: &Subgroup) -> BTreeSet<Subgroup> {
    group.elements().map(|g| h.conjugate(group, g)).collect()
}

/// All homomorphisms `dom -> cod` whose element images satisfy `allowed`,
/// optionally required to be surjective, in deterministic order (sorted by
/// image table).
///
/// The search assigns images to a minimal generating set of `dom` and
/// extends by closure, pruning briskly; `allowed(x, y)` restricts candidate
/// images of the generators and is checked on every element of the closure.
pub fn homomorphisms_filtered(
    dom: &FiniteGroup,
    cod: &FiniteGroup,
    surjective: bool,
    allowed: impl Fn(usize, usize) -> bool,
    limit: u64,
) -> Result<Vec<GroupHom>> {
    let gens = minimal_generating_set(dom);
    if gens.is_empty() {
        let map = vec![0usize];
        let hom = GroupHom { dom: dom.clone(), cod: cod.clone(), map };
        if (!surjective || cod.order() == 1) && allowed(0, 0) {
            return Ok(vec![hom]);
        }
        return Ok(Vec::new());
    }
    // words expressing every element of dom in terms of the generators:
    // discovery order via closure, remembering (parent element, generator).
    let n = dom.order();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut disc: Vec<usize> = vec![0];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut i = 0;
    while i < disc.len() {
        let a = disc[i];
        i += 1;
        for (gi, &g) in gens.iter().enumerate() {
            let b = dom.mul(a, g);
            if !seen[b] {
                seen[b] = true;
                parent[b] = Some((a, gi));
                disc.push(b);
            }
        }
    }
    debug_assert_eq!(disc.len(), n);

    let mut results: Vec<GroupHom> = Vec::new();
    let mut images = vec![0usize; gens.len()];
    let mut explored: u64 = 0;

    fn rec(
        dom: &FiniteGroup,
        cod: &FiniteGroup,
        gens: &[usize],
        disc: &[usize],
        parent: &[Option<(usize, usize)>],
        surjective: bool,
        allowed: &impl Fn(usize, usize) -> bool,
        images: &mut Vec<usize>,
        pos: usize,
        results: &mut Vec<GroupHom>,
        explored: &mut u64,
        limit: u64,
    ) -> Result<()> {
        if pos == gens.len() {
            *explored += 1;
            if *explored > limit {
                return Err(Error::capacity("homomorphism search", limit));
            }
            // extend to a full map by the discovery order
            let n = dom.order();
            let mut map = vec![usize::MAX; n];
            map[0] = 0;
            for &b in disc.iter().skip(1) {
                let (a, gi) = parent[b].unwrap();
                map[b] = cod.mul(map[a], images[gi]);
            }
            // verify hom property and filter
            for a in 0..n {
                if !allowed(a, map[a]) {
                    return Ok(());
                }
                for b in 0..n {
                    if map[dom.mul(a, b)] != cod.mul(map[a], map[b]) {
                        return Ok(());
                    }
                }
            }
            if surjective {
                let mut hit = vec![false; cod.order()];
                for &y in &map {
                    hit[y] = true;
                }
                if !hit.iter().all(|&h| h) {
                    return Ok(());
                }
            }
            results.push(GroupHom { dom: dom.clone(), cod: cod.clone(), map });
            return Ok(());
        }
        let g = gens[pos];
        let g_ord = dom.element_order(g);
        for y in 0..cod.order() {
            if !allowed(g, y) {
                continue;
            }
            // order of image must divide order of generator
            if g_ord % cod.element_order(y) != 0 {
                continue;
            }
            images[pos] = y;
            rec(
                dom, cod, gens, disc, parent, surjective, allowed, images, pos + 1, results,
                explored, limit,
            )?;
        }
        Ok(())
    }

    rec(
        dom,
        cod,
        &gens,
        &disc,
        &parent,
        surjective,
        &allowed,
        &mut images,
        0,
        &mut results,
        &mut explored,
        limit,
    )?;
    results.sort_by(|a, b| a.map.cmp(&b.map));
    Ok(results)
}

/// All surjective homomorphisms `dom -> cod`, sorted by image table.
pub fn epimorphisms(dom: &FiniteGroup, cod: &FiniteGroup) -> Result<Vec<GroupHom>> {
    epimorphisms_limited(dom, cod, DEFAULT_SUBGROUP_LIMIT)
}

pub fn epimorphisms_limited(dom: &FiniteGroup, cod: &FiniteGroup, limit: u64) -> Result<Vec<GroupHom>> {
    if cod.order() > dom.order() || dom.order() % cod.order() != 0 {
        return Ok(Vec::new());
    }
    homomorphisms_filtered(dom, cod, true, |_, _| true, limit)
}

/// All isomorphisms `dom -> cod` (empty when none exist).
pub fn isomorphisms(dom: &FiniteGroup, cod: &FiniteGroup) -> Result<Vec<GroupHom>> {
    if dom.order() != cod.order() {
        return Ok(Vec::new());
    }
    Ok(epimorphisms(dom, cod)?
        .into_iter()
        .filter(|f| f.is_injective())
        .collect())
}

pub fn are_isomorphic(a: &FiniteGroup, b: &FiniteGroup) -> bool {
    if a.order() != b.order() {
        return false;
    }
    // cheap invariants before the search
    let profile = |g: &FiniteGroup| {
        let mut orders: Vec<usize> = g.elements().map(|e| g.element_order(e)).collect();
        orders.sort_unstable();
        orders
    };
    if profile(a) != profile(b) || a.is_abelian() != b.is_abelian() {
        return false;
    }
    first_isomorphism(a, b).is_some()
}

/// First isomorphism in the deterministic search order, if any.
pub fn first_isomorphism(a: &FiniteGroup, b: &FiniteGroup) -> Option<GroupHom> {
    if a.order() != b.order() {
        return None;
    }
    // reuse the filtered search but stop at the first injective hit
    let all = homomorphisms_filtered(a, b, true, |_, _| true, DEFAULT_SUBGROUP_LIMIT).ok()?;
    all.into_iter().find(|f| f.is_injective())
}

/// Constructive Gaschütz lift.
///
/// Given an epimorphism `pi: G -> H`, a normal subgroup `N` of `G` with
/// `rank(G/N) <= e`, and elements `h_1..h_e` of `H` with
/// `H = <h_1..h_e, pi(N)>`, produces `g_1..g_e` in `G` with
/// `G = <g_1..g_e, N>` and `pi(g_i) = h_i`. Both preconditions are checked;
/// existence is then guaranteed, and the search scans the preimage fibers in
/// deterministic odometer order.
pub fn lift_generators(pi: &GroupHom, n: &Subgroup, h: &[usize]) -> Result<Vec<usize>> {
    let g_grp = pi.dom();
    let h_grp = pi.cod();
    if !pi.is_surjective() {
        return Err(Error::pre("lift_generators: pi is not surjective"));
    }
    if let Some(w) = n.normality_witness(g_grp) {
        return Err(Error::NotNormal(format!("{n:?}"), w));
    }
    let e = h.len();
    let (q, _) = quotient(g_grp, n)?;
    if rank(&q) > e {
        return Err(Error::pre(format!(
            "lift_generators: rank(G/N) = {} exceeds e = {e}",
            rank(&q)
        )));
    }
    let pin = pi.image_of(n);
    let mut seed: Vec<usize> = h.to_vec();
    seed.extend_from_slice(pin.elements());
    if generated(h_grp, &seed).len() != h_grp.order() {
        return Err(Error::pre("lift_generators: H is not generated by h and pi(N)"));
    }
    if e == 0 {
        // rank(G/N) = 0 means N = G
        return Ok(Vec::new());
    }
    // fibers pi^{-1}(h_i)
    let fibers: Vec<Vec<usize>> = h
        .iter()
        .map(|&hi| g_grp.elements().filter(|&g| pi.apply(g) == hi).collect())
        .collect();
    let mut idx = vec![0usize; e];
    loop {
        let cand: Vec<usize> = idx.iter().enumerate().map(|(i, &j)| fibers[i][j]).collect();
        let mut gens = cand.clone();
        gens.extend_from_slice(n.elements());
        if generated(g_grp, &gens).len() == g_grp.order() {
            return Ok(cand);
        }
        // odometer
        let mut i = e;
        loop {
            if i == 0 {
                return Err(Error::pre(
                    "lift_generators: no lift found (preconditions violated?)",
                ));
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < fibers[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: all subgroups by brute-force subset filtering.
    /// Only usable for tiny groups.
    fn subgroups_bruteforce(g: &FiniteGroup) -> Vec<Vec<usize>> {
        let n = g.order();
        assert!(n <= 8, "oracle only for tiny groups");
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask & 1 == 0 {
                continue;
            }
            let elems: Vec<usize> = (0..n).filter(|&e| mask >> e & 1 == 1).collect();
            let closed = elems.iter().all(|&a| {
                elems.contains(&g.inv(a)) && elems.iter().all(|&b| elems.contains(&g.mul(a, b)))
            });
            if closed {
                out.push(elems);
            }
        }
        out
    }

    #[test]
    fn trivial_group_has_one_subgroup() {
        let g = FiniteGroup::trivial();
        let subs = subgroups(&g).unwrap();
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].elements(), &[0]);
    }

    #[test]
    fn cyclic4_subgroups_match_bruteforce() {
        let g = FiniteGroup::cyclic(4);
        let expected = subgroups_bruteforce(&g);
        assert_eq!(expected.len(), 3);
        let subs = subgroups(&g).unwrap();
        assert_eq!(subs.len(), 3);
        let got: Vec<Vec<usize>> = subs.iter().map(|s| s.elements().to_vec()).collect();
        for e in &expected {
            assert!(got.contains(e));
        }
    }

    #[test]
    fn s3_subgroups_match_bruteforce() {
        let g = FiniteGroup::symmetric(3);
        let expected = subgroups_bruteforce(&g);
        assert_eq!(expected.len(), 6);
        assert_eq!(subgroups(&g).unwrap().len(), 6);
    }

    #[test]
    fn generated_empty_is_trivial() {
        let g = FiniteGroup::cyclic(6);
        assert_eq!(generated(&g, &[]).elements(), &[0]);
    }

    #[test]
    fn generated_in_z6() {
        let g = FiniteGroup::cyclic(6);
        assert_eq!(generated(&g, &[2]).elements(), &[0, 2, 4]);
    }

    #[test]
    fn generated_all_of_s3() {
        let g = FiniteGroup::symmetric(3);
        // any transposition and any 3-cycle generate S3
        let transp = g.elements().find(|&e| g.element_order(e) == 2).unwrap();
        let cycle = g.elements().find(|&e| g.element_order(e) == 3).unwrap();
        assert_eq!(generated(&g, &[transp, cycle]).len(), 6);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&FiniteGroup::trivial()), 0);
        let klein = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2));
        assert_eq!(rank(&klein), 2);
        assert_eq!(rank(&FiniteGroup::symmetric(3)), 2);
        assert_eq!(rank(&FiniteGroup::cyclic(12)), 1);
    }

    #[test]
    fn quotient_by_trivial_and_full() {
        let g = FiniteGroup::cyclic(4);
        let (q, proj) = quotient(&g, &Subgroup::trivial()).unwrap();
        assert_eq!(q.order(), 4);
        assert!(proj.is_bijective());
        let (q, _) = quotient(&g, &Subgroup::full(&g)).unwrap();
        assert_eq!(q.order(), 1);
    }

    #[test]
    fn quotient_z4_by_z2() {
        let g = FiniteGroup::cyclic(4);
        let n = Subgroup::new(&g, [0, 2]).unwrap();
        let (q, proj) = quotient(&g, &n).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(proj.kernel(), n);
    }

    #[test]
    fn quotient_rejects_non_normal() {
        let g = FiniteGroup::symmetric(3);
        let transp = g.elements().find(|&e| g.element_order(e) == 2).unwrap();
        let h = generated(&g, &[transp]);
        assert!(matches!(quotient(&g, &h), Err(Error::NotNormal(_, _))));
    }

    #[test]
    fn epimorphism_counts() {
        let z2 = FiniteGroup::cyclic(2);
        let z3 = FiniteGroup::cyclic(3);
        let z4 = FiniteGroup::cyclic(4);
        let s3 = FiniteGroup::symmetric(3);
        assert!(epimorphisms(&z2, &z3).unwrap().is_empty());
        assert_eq!(epimorphisms(&z4, &z2).unwrap().len(), 1);
        assert_eq!(epimorphisms(&s3, &z2).unwrap().len(), 1);
        // every returned hom is onto
        for f in epimorphisms(&s3, &z2).unwrap() {
            assert_eq!(f.image().len(), 2);
        }
    }

    #[test]
    fn conjugates_of_transposition_in_s3() {
        let g = FiniteGroup::symmetric(3);
        let transp = g.elements().find(|&e| g.element_order(e) == 2).unwrap();
        let h = generated(&g, &[transp]);
        assert_eq!(conjugates(&g, &h).len(), 3);
        // a normal subgroup is its own class
        let a3 = g.elements().filter(|&e| g.element_order(e) != 2).collect::<Vec<_>>();
        let n = Subgroup::new(&g, a3).unwrap();
        assert_eq!(conjugates(&g, &n).len(), 1);
        assert_eq!(conjugates(&g, &Subgroup::full(&g)).len(), 1);
    }

    #[test]
    fn lift_identity_case() {
        let g = FiniteGroup::symmetric(3);
        let pi = GroupHom::identity(&g);
        let gens = minimal_generating_set(&g);
        let lifted = lift_generators(&pi, &Subgroup::trivial(), &gens).unwrap();
        assert_eq!(lifted, gens);
    }

    #[test]
    fn lift_z4_over_z2() {
        let g = FiniteGroup::cyclic(4);
        let h = FiniteGroup::cyclic(2);
        let n = Subgroup::new(&g, [0, 2]).unwrap();
        let pi = GroupHom::new(g.clone(), h.clone(), vec![0, 1, 0, 1]).unwrap();
        let lifted = lift_generators(&pi, &n, &[1]).unwrap();
        assert_eq!(lifted.len(), 1);
        assert!(lifted[0] == 1 || lifted[0] == 3);
        assert_eq!(pi.apply(lifted[0]), 1);
    }

    #[test]
    fn lift_klein_over_z2() {
        let g = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2));
        let h = FiniteGroup::cyclic(2);
        // first projection: (a,b) with index a*2+b maps to a
        let pi = GroupHom::new(g.clone(), h.clone(), vec![0, 0, 1, 1]).unwrap();
        let n = Subgroup::new(&g, [0, 1]).unwrap(); // {0} x Z2
        let lifted = lift_generators(&pi, &n, &[1]).unwrap();
        assert!(lifted[0] == 2 || lifted[0] == 3);
        let mut gens = lifted.clone();
        gens.extend_from_slice(n.elements());
        assert_eq!(generated(&g, &gens).len(), 4);
    }

    #[test]
    fn lift_rejects_bad_preconditions() {
        let g = FiniteGroup::cyclic(4);
        let pi = GroupHom::identity(&g);
        // rank(G/{0}) = 1 > 0
        assert!(lift_generators(&pi, &Subgroup::trivial(), &[]).is_err());
    }

    #[test]
    fn permutation_group_expansion() {
        let a4 = FiniteGroup::alternating(4);
        assert_eq!(a4.order(), 12);
        let q8 = FiniteGroup::dicyclic(2);
        assert_eq!(q8.order(), 8);
        // Q8 has a unique element of order 2
        let count = q8.elements().filter(|&e| q8.element_order(e) == 2).count();
        assert_eq!(count, 1);
    }

    #[test]
    fn invalid_tables_are_rejected() {
        // non-associative magma on 3 elements with identity
        let t = vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 1]];
        let err = FiniteGroup::from_table(t, None).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("associativity") || msg.contains("inverse"), "{msg}");
    }

    #[test]
    fn quotient_kernel_recovery_over_catalog() {
        for g in crate::catalog::catalog_upto(12) {
            for n in normal_subgroups(&g).unwrap() {
                let (_, proj) = quotient(&g, &n).unwrap();
                assert_eq!(proj.kernel(), n, "kernel recovery failed in {g:?}");
            }
        }
    }

    #[test]
    fn epimorphism_images_are_onto() {
        let s3 = FiniteGroup::symmetric(3);
        let q8 = FiniteGroup::dicyclic(2);
        for (dom, cod) in [
            (s3.clone(), FiniteGroup::cyclic(2)),
            (q8.clone(), FiniteGroup::cyclic(2)),
            (q8, FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2))),
        ] {
            for f in epimorphisms(&dom, &cod).unwrap() {
                assert_eq!(f.image().len(), cod.order());
            }
        }
    }

    #[test]
    fn quotient_rank_never_grows() {
        for g in crate::catalog::test_universe(24) {
            let r = rank(&g);
            for n in normal_subgroups(&g).unwrap() {
                let (q, _) = quotient(&g, &n).unwrap();
                assert!(rank(&q) <= r, "rank grew under quotient of {g:?} by {n:?}");
            }
        }
    }

    #[test]
    fn hom_composition_and_kernel() {
        let z4 = FiniteGroup::cyclic(4);
        let z2 = FiniteGroup::cyclic(2);
        let f = GroupHom::new(z4.clone(), z2.clone(), vec![0, 1, 0, 1]).unwrap();
        assert_eq!(f.kernel().elements(), &[0, 2]);
        let g = GroupHom::identity(&z2);
        assert_eq!(f.then(&g).unwrap(), f);
    }
}
