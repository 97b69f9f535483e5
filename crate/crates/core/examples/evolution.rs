//! Free Schrodinger evolution of a superoscillating datum and the two
//! derived families.

use rug::Complex;
use superosc::evolution::{family_two_sequence, pde_residual, propagate};
use superosc::families::{standard_family, standard_measure, EntireSymbol, Index};
use superosc::metrics::{convergence_report, ReportOptions};
use superosc::numerics::PrecisionPolicy;

fn main() -> superosc::Result<()> {
    let policy = PrecisionPolicy::default();
    let m = standard_measure(2.0, 8, &policy)?;
    let h = EntireSymbol::square();
    let z = Complex::with_val(128, (0.3, 0));
    for t in [0.0, 0.05, 0.1] {
        let u = propagate(&m, &h, &Complex::with_val(128, t))?;
        let v = u.eval(&z)?;
        println!("t={t:<5} Psi(0.3) = {:.6}{:+.6}i", v.real().to_f64(), v.imag().to_f64());
    }
    for step in [1e-2, 5e-3, 2.5e-3] {
        println!("residual at step {step}: {:.3e}", pde_residual(&m, &h, 0.1, &z, step)?.to_f64());
    }

    let h2 = EntireSymbol::square().with_image_bound(1.0)?;
    let two = family_two_sequence(&standard_family(2.0)?, &h2)?;
    println!("second family: band {} target {}", two.band(), two.target());
    let r = convergence_report(&two, &[4, 8, 16].map(Index::N), 8.0, &ReportOptions::default())?;
    println!("  verdict {:?} sups {:?}", r.verdict, r.sup_values());
    Ok(())
}
