//! Group piles: building from representatives, validation diagnostics,
//! classification flags, the derived pile and the bar quotient.
//!
//! Run with `cargo run --example pile_classify`.

use pileforge::group::generated;
use pileforge::pile::lift_pile_structure;
use pileforge::{FiniteGroup, GroupHom, GroupPile, PileHom, Subgroup};

fn main() -> pileforge::Result<()> {
    // S3 with the conjugacy class of a transposition subgroup as one family
    let s3 = FiniteGroup::symmetric(3);
    let t = s3.elements().find(|&e| s3.element_order(e) == 2).unwrap();
    let pile = GroupPile::deficient(s3.clone(), [("p".into(), vec![generated(&s3, &[t])])])?;
    println!("pile: {pile:?}");
    println!("diagnostics: {:?}", pile.validate());

    let flags = pile.classify(&[0, 1, 2]);
    println!(
        "separated {} / reduced {} / self-generated {} / deficient {} / bare {}",
        flags.separated, flags.reduced, flags.self_generated, flags.deficient, flags.bare
    );
    println!("e-generated: {:?}", flags.e_generated);

    let (derived, sub) = pile.derived_pile();
    let (bar, _) = pile.bar_pile();
    println!(
        "G' = {:?} (order {}), bar group order {}",
        sub.elements(),
        derived.group().order(),
        bar.group().order()
    );

    // quotient pile by A3
    let a3_elems: Vec<usize> = s3.elements().filter(|&e| s3.element_order(e) != 2).collect();
    let a3 = Subgroup::new(&s3, a3_elems)?;
    let (q, hom) = pile.quotient(&a3)?;
    println!(
        "quotient by A3: order {}, epi {}, rigid {}",
        q.group().order(),
        hom.is_pile_epi(),
        hom.is_rigid()
    );

    // lifting pile structure along an epimorphism: give bare Z4 a class 0
    // making it 1-bounded over the full Z2 target
    let z2 = FiniteGroup::cyclic(2);
    let a = GroupPile::from_representatives(
        z2.clone(),
        Subgroup::full(&z2),
        [("p".to_string(), vec![Subgroup::trivial()])],
    )?;
    let btil = GroupPile::bare(FiniteGroup::cyclic(4), ["p".to_string()]);
    let proj = GroupHom::new(btil.group().clone(), z2, vec![0, 1, 0, 1])?;
    let pi = PileHom::new(btil.clone(), a.deficient_reduct(), proj)?;
    let lifted = lift_pile_structure(&a, &btil, &pi, 1)?;
    println!(
        "lifted pile structure: class0 representative {:?}, 1-bounded: {}",
        lifted.class0().iter().next().unwrap().elements(),
        lifted.is_e_bounded(1)
    );
    Ok(())
}
