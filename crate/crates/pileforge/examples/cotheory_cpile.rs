//! The bounded cotheory: axiom generation per isomorphism class, evaluation
//! against encoded piles, and the semantic bounded C-pile check.
//!
//! Run with `cargo run --example cotheory_cpile`.

use pileforge::colang::{check_cpile_bounded, cosatisfies, generate_tc, Assignment, AxiomKind};
use pileforge::isystem::encode;
use pileforge::{FiniteGroup, GroupPile};

fn main() -> pileforge::Result<()> {
    let axioms = generate_tc(1, 2, 2, &["p"], 1 << 20)?;
    println!("cotheory axioms at e = 1, n <= 2, k <= 2: {}", axioms.len());
    for ax in axioms.iter().take(3) {
        println!("  {:?}", ax.kind);
    }

    // the first-kind axioms hold on a pile exactly when its small quotients
    // are 1-generated
    let z4 = GroupPile::bare(FiniteGroup::cyclic(4), ["p".to_string()]);
    let klein = GroupPile::bare(
        FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2)),
        ["p".to_string()],
    );
    let axioms = generate_tc(1, 4, 1, &["p"], 1 << 20)?;
    for (name, pile) in [("Z4", &z4), ("Z2xZ2", &klein)] {
        let sys = encode(pile)?;
        for ax in &axioms {
            if let AxiomKind::EGeneratedAt { n } = ax.kind {
                let holds = cosatisfies(&sys, &ax.rendered, &Assignment::new())?;
                println!("{name}: quotients of index <= {n} are 1-generated: {holds}");
            }
        }
    }

    // semantic check: the bare Z2 pile is not a 1-free C-pile at bound 4
    // (the order-4 cyclic problem has no solution), while Z4 passes at
    // bound 2
    let z2 = GroupPile::bare(FiniteGroup::cyclic(2), ["p".to_string()]);
    let report = check_cpile_bounded(&z2, 1, 4, 200_000)?;
    println!("bare Z2 at bound 4:\n{report}");
    let report = check_cpile_bounded(&z4, 1, 2, 200_000)?;
    println!("bare Z4 at bound 2:\n{report}");
    Ok(())
}
