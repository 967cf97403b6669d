//! Embedding problems: local solvability with witness tables, exhaustive
//! solving, and quotient problems.
//!
//! Run with `cargo run --example embedding_solve`.

use pileforge::embedding::{check_ls, quotient_ep, solve, solve_all, EmbeddingProblem};
use pileforge::{FiniteGroup, GroupPile, Subgroup};

fn main() -> pileforge::Result<()> {
    // (phi: Z4 -> Z2, alpha: Z4 -> Z2), both the canonical projections
    let b = GroupPile::bare(FiniteGroup::cyclic(4), ["p".to_string()]);
    let n = Subgroup::new(b.group(), [0, 2])?;
    let (_, alpha) = b.quotient(&n)?;
    let ep = EmbeddingProblem::new(alpha.clone(), alpha)?;

    let report = check_ls(&ep)?;
    println!("locally solvable: {}", report.holds);
    for w in &report.witnesses {
        let dir = if w.from_g { "G->B" } else { "B->G" };
        println!(
            "  [{}] {dir} {:?} matched: {}",
            w.label,
            w.source.elements(),
            w.matched.is_some()
        );
    }

    let sols = solve_all(&ep)?;
    println!("solutions ({}):", sols.len());
    for s in &sols {
        println!("  {:?}", s.gamma.underlying().map_table());
    }

    // a rank obstruction: no epimorphism Z4 -> Z2 x Z2 exists
    let g = GroupPile::bare(FiniteGroup::cyclic(4), ["p".to_string()]);
    let (a, phi) = {
        let n = Subgroup::new(g.group(), [0, 2])?;
        g.quotient(&n)?
    };
    let klein = GroupPile::bare(
        FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2)),
        ["p".to_string()],
    );
    let alpha_hom = pileforge::GroupHom::new(
        klein.group().clone(),
        a.group().clone(),
        vec![0, 1, 0, 1],
    )?;
    let alpha = pileforge::PileHom::new(klein, a, alpha_hom)?;
    let blocked = EmbeddingProblem::new(phi, alpha)?;
    println!("rank-obstructed problem solvable: {}", solve(&blocked)?.is_some());

    // quotient problems stay locally solvable
    let q = quotient_ep(&ep, &Subgroup::new(ep.b().group(), [0, 2])?)?;
    println!(
        "quotient problem (B of order {}): locally solvable = {}",
        q.b().group().order(),
        check_ls(&q)?.holds
    );
    Ok(())
}
