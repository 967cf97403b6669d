//! Bundled small-group catalog: every group of order <= 16 up to isomorphism
//! (42 groups), plus a handful of larger groups up to order 24 used by the
//! property suites. Groups are constructed from structured models (cyclic
//! arithmetic, dihedral/dicyclic presentations, direct and semidirect
//! products) and validated by the Cayley-table loader on construction.

use crate::group::FiniteGroup;

fn z(n: usize) -> FiniteGroup {
    FiniteGroup::cyclic(n)
}

/// Central product D8 ∘ Z4 (the Pauli group), built as a quotient of D8 x Z4
/// by the diagonal central involution.
fn pauli16() -> FiniteGroup {
    let d8 = FiniteGroup::dihedral(4);
    let z4 = z(4);
    let prod = d8.direct_product(&z4);
    // the non-identity central element of D8
    let c = d8
        .elements()
        .find(|&a| a != 0 && d8.elements().all(|b| d8.mul(a, b) == d8.mul(b, a)))
        .expect("D8 has a central involution");
    // diagonal subgroup <(c, 2)>
    let diag = crate::group::generated(&prod, &[c * 4 + 2]);
    let (q, _) = crate::group::quotient(&prod, &diag).expect("central subgroups are normal");
    q.with_name("D8oZ4")
}

/// Z8 ⋊ Z2 with the action x -> x^k.
fn z8_semi(k: usize, name: &str) -> FiniteGroup {
    FiniteGroup::semidirect_product(
        &z(8),
        &z(2),
        |h| {
            (0..8)
                .map(|i| if h == 0 { i } else { (i * k) % 8 })
                .collect()
        },
        Some(name.to_string()),
    )
    .expect("x -> x^k is an automorphism of Z8 for odd k")
}

/// Z4 ⋊ Z4 with b a b^-1 = a^-1.
fn z4_semi_z4() -> FiniteGroup {
    FiniteGroup::semidirect_product(
        &z(4),
        &z(4),
        |h| (0..4).map(|i| if h % 2 == 1 { (4 - i) % 4 } else { i }).collect(),
        Some("Z4sZ4".to_string()),
    )
    .unwrap()
}

/// (Z2 x Z2) ⋊ Z4 with the generator of Z4 swapping the two factors.
fn g16_3() -> FiniteGroup {
    let n = z(2).direct_product(&z(2));
    FiniteGroup::semidirect_product(
        &n,
        &z(4),
        |h| {
            (0..4)
                .map(|x| {
                    let (i, j) = (x / 2, x % 2);
                    if h % 2 == 0 {
                        x
                    } else {
                        j * 2 + i
                    }
                })
                .collect()
        },
        Some("(Z2xZ2)sZ4".to_string()),
    )
    .unwrap()
}

/// All groups of order <= 16 up to isomorphism, in (order, name) order.
pub fn catalog() -> Vec<FiniteGroup> {
    let mut groups = vec![
        FiniteGroup::trivial(),
        z(2),
        z(3),
        z(4),
        z(2).direct_product(&z(2)).with_name("Z2xZ2"),
        z(5),
        z(6),
        FiniteGroup::symmetric(3),
        z(7),
        z(8),
        z(4).direct_product(&z(2)).with_name("Z4xZ2"),
        z(2).direct_product(&z(2)).direct_product(&z(2)).with_name("Z2^3"),
        FiniteGroup::dihedral(4),
        FiniteGroup::dicyclic(2),
        z(9),
        z(3).direct_product(&z(3)).with_name("Z3xZ3"),
        z(10),
        FiniteGroup::dihedral(5),
        z(11),
        z(12),
        z(6).direct_product(&z(2)).with_name("Z6xZ2"),
        FiniteGroup::dihedral(6),
        FiniteGroup::alternating(4),
        FiniteGroup::dicyclic(3),
        z(13),
        z(14),
        FiniteGroup::dihedral(7),
        z(15),
        z(16),
        z(4).direct_product(&z(4)).with_name("Z4xZ4"),
        g16_3(),
        z4_semi_z4(),
        z(8).direct_product(&z(2)).with_name("Z8xZ2"),
        z8_semi(5, "M16"),
        FiniteGroup::dihedral(8),
        z8_semi(3, "SD16"),
        FiniteGroup::dicyclic(4),
        z(4).direct_product(&z(2)).direct_product(&z(2)).with_name("Z4xZ2xZ2"),
        FiniteGroup::dihedral(4).direct_product(&z(2)).with_name("D8xZ2"),
        FiniteGroup::dicyclic(2).direct_product(&z(2)).with_name("Q8xZ2"),
        pauli16(),
        z(2)
            .direct_product(&z(2))
            .direct_product(&z(2))
            .direct_product(&z(2))
            .with_name("Z2^4"),
    ];
    groups.sort_by_key(|g| g.order());
    groups
}

/// Catalog groups of order at most `max_order`.
pub fn catalog_upto(max_order: usize) -> Vec<FiniteGroup> {
    catalog().into_iter().filter(|g| g.order() <= max_order).collect()
}

/// Extra groups of order 17..=24 for the wider property suites. Not a
/// complete classification at those orders.
pub fn extras_to_24() -> Vec<FiniteGroup> {
    vec![
        z(17),
        z(18),
        FiniteGroup::dihedral(9),
        z(19),
        z(20),
        FiniteGroup::dihedral(10),
        FiniteGroup::dicyclic(5),
        z(21),
        z(22),
        z(23),
        z(24),
        FiniteGroup::symmetric(4),
        FiniteGroup::dihedral(12),
        FiniteGroup::alternating(4).direct_product(&z(2)).with_name("A4xZ2"),
    ]
}

/// Catalog plus extras, everything of order at most `max_order`.
pub fn test_universe(max_order: usize) -> Vec<FiniteGroup> {
    let mut all = catalog();
    all.extend(extras_to_24());
    all.retain(|g| g.order() <= max_order);
    all.sort_by_key(|g| g.order());
    all
}

/// Looks a catalog or extra group up by name.
pub fn by_name(name: &str) -> Option<FiniteGroup> {
    test_universe(usize::MAX).into_iter().find(|g| g.name() == Some(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::are_isomorphic;

    #[test]
    fn counts_per_order() {
        let groups = catalog();
        assert_eq!(groups.len(), 42);
        let count = |n: usize| groups.iter().filter(|g| g.order() == n).count();
        let expected = [1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(count(i + 1), e, "order {}", i + 1);
        }
    }

    #[test]
    fn pairwise_non_isomorphic() {
        let groups = catalog();
        for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                if groups[i].order() != groups[j].order() {
                    continue;
                }
                assert!(
                    !are_isomorphic(&groups[i], &groups[j]),
                    "{:?} and {:?} are isomorphic",
                    groups[i],
                    groups[j]
                );
            }
        }
    }

    #[test]
    fn order16_sanity() {
        // Q16 has a unique involution, D16 has nine
        let q16 = by_name("Dic4").unwrap();
        assert_eq!(q16.elements().filter(|&e| q16.element_order(e) == 2).count(), 1);
        let d16 = by_name("D16").unwrap();
        assert_eq!(d16.elements().filter(|&e| d16.element_order(e) == 2).count(), 9);
        let pauli = by_name("D8oZ4").unwrap();
        assert_eq!(pauli.order(), 16);
    }
}
