//! Coefficients solving the moment system for a constant weight.

use rug::Complex;
use superosc::families::moment_family;
use superosc::measures::{BorelMeasure, Density, DensityMeasure, QuadratureSpec};
use superosc::numerics::PrecisionPolicy;

fn main() -> superosc::Result<()> {
    let policy = PrecisionPolicy::default();
    let h = BorelMeasure::Density(DensityMeasure::new(
        (-1.0, 1.0),
        Density::Constant(0.5),
        QuadratureSpec::default(),
        1.0,
        policy.base_bits,
    )?);
    for n in 1..=4 {
        let mf = moment_family(&h, n, 2.0, &policy)?;
        match &mf.exact {
            Some(c) => println!("n={n}: {:?}", c.iter().map(|(r, i)| format!("{r}{:+}i", i.to_f64())).collect::<Vec<_>>()),
            None => println!("n={n}: cond {:?}", mf.condition),
        }
        let f0 = mf.eval(&Complex::with_val(128, 0))?;
        println!("      F(0) = {:.15}", f0.real().to_f64());
    }
    Ok(())
}
