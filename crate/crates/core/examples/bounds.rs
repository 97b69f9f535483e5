//! Coefficient growth, frequency separation and the explicit error bound
//! for equispaced Lagrange families.

use rug::{Complex, Rational};
use superosc::families::{equispaced_frequencies, lagrange_family, lagrange_weights_exact};
use superosc::metrics::{equispaced_separation, growth_error_bound};
use superosc::numerics::format::decimal_with_digits;
use superosc::numerics::PrecisionPolicy;

fn main() -> superosc::Result<()> {
    let a = Rational::from(2);
    for n in [4u32, 8, 12] {
        let freqs = equispaced_frequencies(n);
        let w = lagrange_weights_exact(&freqs, &a)?;
        let k2 = w.iter().map(|c| c.clone().abs().to_f64()).fold(0.0, f64::max);
        let m = lagrange_family(&freqs, &a, 1.0, &PrecisionPolicy::default())?;
        let z = Complex::with_val(m.precision(), (1.0, 0.5));
        let err = Complex::with_val(m.precision(), m.eval_transform(&z)? - (Complex::with_val(m.precision(), (0, 2)) * &z).exp());
        let bound = growth_error_bound(1.0, k2, n, 2.0, &z)?;
        println!("n={n:>2} max|C_j|={k2:.3e} error {:.3e} <= bound {}", err.abs().real().to_f64(), decimal_with_digits(&bound, 4));
    }
    println!("separation constant up to n=30: {:.4}", equispaced_separation(30)?);
    Ok(())
}
