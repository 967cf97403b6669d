//! Finite groups from tables and permutations: subgroups, rank, quotients,
//! epimorphisms and conjugacy classes.
//!
//! Run with `cargo run --example group_basics`.

use pileforge::group::{conjugates, epimorphisms, generated, quotient, rank, subgroups};
use pileforge::{FiniteGroup, Subgroup};

fn main() -> pileforge::Result<()> {
    let s3 = FiniteGroup::symmetric(3);
    println!("S3 has order {}", s3.order());

    let subs = subgroups(&s3)?;
    println!("subgroups of S3: {}", subs.len());
    for s in &subs {
        println!("  {:?} (order {})", s.elements(), s.len());
    }

    println!("rank(S3) = {}", rank(&s3));
    let klein = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2));
    println!("rank(Z2 x Z2) = {}", rank(&klein));

    // the alternating subgroup and the sign quotient
    let a3_elems: Vec<usize> = s3.elements().filter(|&e| s3.element_order(e) != 2).collect();
    let a3 = Subgroup::new(&s3, a3_elems)?;
    let (q, proj) = quotient(&s3, &a3)?;
    println!("S3 / A3 has order {}; projection {:?}", q.order(), proj.map_table());

    let epis = epimorphisms(&s3, &FiniteGroup::cyclic(2))?;
    println!("epimorphisms S3 -> Z2: {} (the sign map)", epis.len());

    // conjugates of a transposition subgroup
    let t = s3.elements().find(|&e| s3.element_order(e) == 2).unwrap();
    let h = generated(&s3, &[t]);
    println!(
        "a transposition generates {:?}; its conjugacy class has {} members",
        h.elements(),
        conjugates(&s3, &h).len()
    );
    Ok(())
}
