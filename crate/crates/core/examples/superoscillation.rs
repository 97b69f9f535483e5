//! Samples a standard-family member on the real line and prints where the
//! local wavenumber leaves the band [-1, 1].

use rug::Complex;
use superosc::families::{standard_family, Index};
use superosc::metrics::local_wavenumber;
use superosc::Error;

fn main() -> superosc::Result<()> {
    let a = 2.0;
    let n = 20;
    let fam = standard_family(a)?;
    let f = fam.evaluator(Index::N(n))?;
    let prec = 128;
    let h = 1e-4;
    println!("{:>6} {:>12} {:>10}", "x", "|F(x)|", "k_local");
    for i in 0..=20 {
        let x = -2.0 + 0.2 * i as f64;
        let v = f(&Complex::with_val(prec, (x, 0)))?;
        let k = match local_wavenumber(f.as_ref(), x, h, prec) {
            Ok(k) => format!("{k:.4}"),
            Err(Error::NearZeroSignal(_)) => "node".into(),
            Err(e) => return Err(e),
        };
        println!("{x:>6.2} {:>12.6} {k:>10}", v.abs().real().to_f64());
    }
    Ok(())
}
