//! Exact Haar measures of test sentences over finite Galois data, with the
//! Monte-Carlo cross-check.
//!
//! Run with `cargo run --example haar_measure`.

use pileforge::measure::{
    cubic_scenario, exact_measure, monte_carlo, quadratic_scenario, TestSentence,
};

fn main() -> pileforge::Result<()> {
    // Z2 swapping the two roots of a quadratic, one tuple coordinate
    let quad = quadratic_scenario(1);
    let f = TestSentence::exists("f");
    println!("quadratic, mu(Exists f) = {}", exact_measure(&f, &quad)?);

    // S3 on the three roots of a cubic
    let cubic = cubic_scenario(1);
    println!("cubic, mu(Exists f) = {}", exact_measure(&f, &cubic)?);

    // Boolean structure
    let s = TestSentence::parse("Exists(f) | !Exists(f)")?;
    println!("tautology: {}", exact_measure(&s, &cubic)?);
    let s = TestSentence::parse("!Exists(f)")?;
    println!("complement: {}", exact_measure(&s, &cubic)?);

    // Monte-Carlo cross-check, deterministic under the seed
    let est = monte_carlo(&f, &cubic, 100_000, 7)?;
    let exact = exact_measure(&f, &cubic)?;
    println!("MC: {est}");
    println!(
        "|MC - exact| = {:.6} (4 stderr = {:.6})",
        (est.mean - exact.as_f64()).abs(),
        4.0 * est.stderr
    );
    Ok(())
}
