//! The inverse-system encoding: points are cosets of normal subgroups,
//! encode/decode round-trips, axioms catch mutations, and pile
//! epimorphisms dualize to system embeddings and back.
//!
//! Run with `cargo run --example inverse_system_roundtrip`.

use pileforge::group::generated;
use pileforge::isystem::{dual_embedding, dual_epi, encode, encode_upto};
use pileforge::{FiniteGroup, GroupPile, Subgroup};

fn main() -> pileforge::Result<()> {
    let s3 = FiniteGroup::symmetric(3);
    let t = s3.elements().find(|&e| s3.element_order(e) == 2).unwrap();
    let h = generated(&s3, &[t]);
    let pile = GroupPile::deficient(s3, [("p".into(), vec![h])])?;

    let sys = encode(&pile)?;
    println!("S3 pile encodes to {} points over {} levels", sys.n_points(), sys.levels().len());
    println!("axiom violations: {:?}", sys.validate_axioms());

    let decoded = sys.decode()?;
    println!("decoded pile isomorphic to the original: {}", decoded.is_isomorphic_to(&pile));

    // truncation keeps only the small-index levels
    let trunc = encode_upto(&pile, 2)?;
    println!("truncated at index 2: {} points", trunc.n_points());

    // dual maps: a quotient of Z4 gives an embedding of the small system
    let z4 = GroupPile::bare(FiniteGroup::cyclic(4), ["p".to_string()]);
    let n = Subgroup::new(z4.group(), [0, 2])?;
    let (_, hom) = z4.quotient(&n)?;
    let emb = dual_epi(&hom)?;
    println!(
        "dual of Z4 -> Z2: embeds {} points into {}",
        emb.dom.n_points(),
        emb.cod.n_points()
    );
    let back = dual_embedding(&emb)?;
    println!(
        "dual of the dual recovers the map: {}",
        back.underlying().map_table() == hom.underlying().map_table()
    );
    Ok(())
}
