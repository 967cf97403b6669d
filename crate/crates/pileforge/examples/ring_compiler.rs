//! Compiling coformulas to ring formulas and evaluating them over finite
//! fields, both against the canonical tower (guided) and by exhaustive
//! tuple search (brute), cross-checked against the inverse-system
//! semantics.
//!
//! Run with `cargo run --example ring_compiler`.

use pileforge::colang::{cosatisfies, parse, Assignment};
use pileforge::isystem::frobenius_system;
use pileforge::ringc::{
    compile, emit_admissibility, emit_talg, eval_ring, EvalMode, FiniteFieldModel, Polynomial,
};
use std::collections::BTreeMap;

fn main() -> pileforge::Result<()> {
    let texts = [
        "exists v in G2 . not P(v,v,v)",
        "forall v in G2 . exists w in G2 . P(v,w,v)",
        "exists v in G3 . not G2(v)",
    ];
    for text in texts {
        let f = parse(text)?;
        let bound = f.max_bound().max(1);
        let prog = compile(&f, &[])?;
        let system = frobenius_system(bound);
        let want = cosatisfies(&system, &f, &Assignment::new())?;
        print!("{text}\n  system: {want}");
        for q in [2u64, 3, 5] {
            let model = FiniteFieldModel::new(q, bound)?;
            let got = eval_ring(&prog, &model, EvalMode::Guided)?;
            print!("  F{q}: {got}");
        }
        println!();
    }

    // brute agrees with guided where the search space is tiny
    let f = parse("exists v in G2 . not P(v,v,v)")?;
    let prog = compile(&f, &[])?;
    let model = FiniteFieldModel::new(2, 2)?;
    println!(
        "brute = {} / guided = {} over F2",
        eval_ring(&prog, &model, EvalMode::Brute)?,
        eval_ring(&prog, &model, EvalMode::Guided)?
    );

    // the standalone admissibility formula
    let alpha = emit_admissibility(1, &[2])?;
    println!(
        "alpha for one block of degree <= 2: {} variables, {} nodes",
        alpha.n_vars,
        alpha.formula.size()
    );
    let alpha2 = emit_admissibility(2, &[2, 2])?;
    println!(
        "alpha for two blocks: {} variables (includes a cross embedding)",
        alpha2.n_vars
    );

    // no-root axioms from explicit polynomial lists
    let sentences = emit_talg(
        &[Polynomial::new(vec![1, 0, 1])],
        &BTreeMap::from([("2".to_string(), vec![Polynomial::new(vec![2, 0, 1])])]),
    );
    for s in &sentences {
        println!("{s}");
    }
    Ok(())
}
