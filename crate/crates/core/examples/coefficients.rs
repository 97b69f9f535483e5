//! Atoms and weights of the standard and Lagrange families.

use rug::Rational;
use superosc::families::{equispaced_frequencies, lagrange_weights_exact, standard_measure};
use superosc::numerics::format::decimal;
use superosc::numerics::PrecisionPolicy;

fn main() -> superosc::Result<()> {
    let policy = PrecisionPolicy::default();
    let m = standard_measure(2.0, 4, &policy)?;
    println!("standard a=2 n=4");
    for at in m.as_discrete().expect("discrete").atoms() {
        println!("  k = {:>5}  C = {}", decimal(&at.location), decimal(at.weight.real()));
    }

    let freqs = equispaced_frequencies(4);
    let w = lagrange_weights_exact(&freqs, &Rational::from(2))?;
    println!("lagrange equispaced a=2 n=4");
    for (k, c) in freqs.iter().zip(&w) {
        println!("  k = {k:>5}  C = {c}");
    }
    Ok(())
}
