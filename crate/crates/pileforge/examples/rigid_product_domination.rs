//! The rigid product of deficient piles and the domination of a locally
//! solvable e-bounded problem by a rigid e-bounded one.
//!
//! Run with `cargo run --example rigid_product_domination`.

use pileforge::embedding::{
    dominate, ebounded_ep_corpus, rigid_product, verify_domination, EmbeddingProblem,
};
use pileforge::pile::deficient_pile_corpus;
use pileforge::{catalog, FiniteGroup, GroupHom, GroupPile, PileHom, Subgroup};

fn main() -> pileforge::Result<()> {
    // rigid product of two Z2 piles over the trivial pile
    let z2 = FiniteGroup::cyclic(2);
    let fam = vec![Subgroup::trivial(), Subgroup::full(&z2)];
    let b = GroupPile::deficient(z2.clone(), [("p".to_string(), fam.clone())])?;
    let g = GroupPile::deficient(z2.clone(), [("p".to_string(), fam)])?;
    let a = GroupPile::deficient(
        FiniteGroup::trivial(),
        [("p".to_string(), vec![Subgroup::trivial()])],
    )?;
    let to_a = |pile: &GroupPile| -> pileforge::Result<PileHom> {
        PileHom::new(
            pile.clone(),
            a.clone(),
            GroupHom::new(pile.group().clone(), a.group().clone(), vec![0, 0])?,
        )
    };
    let (h, pi, beta) = rigid_product(&b, &a, &g, &to_a(&b)?, &to_a(&g)?, 100_000)?;
    println!(
        "rigid product: order {}, family sizes {:?}",
        h.group().order(),
        h.families().iter().map(|(p, f)| (p.clone(), f.len())).collect::<Vec<_>>()
    );
    println!(
        "pi epi: {}, beta epi: {}, beta rigid: {}",
        pi.is_pile_epi(),
        beta.is_pile_epi(),
        beta.is_rigid()
    );

    // dominate an e-bounded locally solvable problem from the corpus
    let piles = deficient_pile_corpus(&catalog::catalog_upto(8), &["p"], 1, 30);
    for e in [0usize, 1] {
        let eps: Vec<EmbeddingProblem> = ebounded_ep_corpus(&piles, e, 3);
        for ep in &eps {
            let d = dominate(ep, e, 200_000)?;
            println!(
                "e = {e}: dominated B (order {}) by Bhat (order {}), contracts hold: {}",
                ep.b().group().order(),
                d.bhat.group().order(),
                verify_domination(ep, &d, e)
            );
        }
    }
    Ok(())
}
