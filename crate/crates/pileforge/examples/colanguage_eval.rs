//! The bounded co-language: parsing, pretty-printing, Tarskian evaluation
//! over inverse systems, and family-relation queries.
//!
//! Run with `cargo run --example colanguage_eval`.

use pileforge::colang::{cosatisfies, parse, Assignment};
use pileforge::group::generated;
use pileforge::isystem::encode;
use pileforge::{FiniteGroup, GroupPile};

fn main() -> pileforge::Result<()> {
    let z2 = GroupPile::bare(FiniteGroup::cyclic(2), ["p".to_string()]);
    let sys = encode(&z2)?;

    for text in [
        "forall v in G1 . v = v",
        "exists v in G2 . not P(v,v,v)",
        "forall v in G2 . forall w in G2 . v <= w | w <= v",
    ] {
        let f = parse(text)?;
        let value = cosatisfies(&sys, &f, &Assignment::new())?;
        println!("{f}  =>  {value}");
    }

    // family atoms on the S3 pile with the transposition class
    let s3 = FiniteGroup::symmetric(3);
    let t = s3.elements().find(|&e| s3.element_order(e) == 2).unwrap();
    let h = generated(&s3, &[t]);
    let pile = GroupPile::deficient(s3, [("p".into(), vec![h])])?;
    let sys = encode(&pile)?;
    let f = parse("exists v0 in G6 . exists v1 in G6 . not v0 = v1 & Gp(p,2)(v0,v1)")?;
    println!("{f}  =>  {}", cosatisfies(&sys, &f, &Assignment::new())?);

    // the pretty-printer and parser agree
    let f = parse("not v0 = v0 -> exists w in G3 . w [= w & G2(w)");
    match f {
        Ok(f) => {
            let printed = f.to_string();
            println!("canonical: {printed}");
            assert_eq!(parse(&printed)?, f);
        }
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
