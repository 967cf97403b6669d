//! Constructive generator lifting along an epimorphism: given
//! `pi: G -> H`, a normal `N` with small quotient rank, and generators
//! `h_i` of `H` modulo `pi(N)`, find `g_i` over them generating `G` with
//! `N`.
//!
//! Run with `cargo run --example gaschuetz_lift`.

use pileforge::group::{generated, lift_generators};
use pileforge::{FiniteGroup, GroupHom, Subgroup};

fn main() -> pileforge::Result<()> {
    // G = Z4 over H = Z2 with N the order-2 subgroup
    let g = FiniteGroup::cyclic(4);
    let h = FiniteGroup::cyclic(2);
    let n = Subgroup::new(&g, [0, 2])?;
    let pi = GroupHom::new(g.clone(), h.clone(), vec![0, 1, 0, 1])?;

    let lifted = lift_generators(&pi, &n, &[1])?;
    println!("lift of (1 mod 2) with N = {{0,2}}: g = {:?}", lifted);

    let mut gens = lifted.clone();
    gens.extend_from_slice(n.elements());
    println!(
        "check: <g, N> has order {} and pi(g) = {}",
        generated(&g, &gens).len(),
        pi.apply(lifted[0])
    );

    // Klein four over Z2 via the first projection
    let klein = FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2));
    let pi = GroupHom::new(klein.clone(), h, vec![0, 0, 1, 1])?;
    let n = Subgroup::new(&klein, [0, 1])?;
    let lifted = lift_generators(&pi, &n, &[1])?;
    println!("lift in Z2 x Z2: g = {:?} (either preimage of 1 works)", lifted);
    Ok(())
}
