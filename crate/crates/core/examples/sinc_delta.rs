//! The sinc family in closed form and as a Bessel-kernel density.

use rug::Complex;
use superosc::families::{sinc_delta_closed_form, sinc_delta_measure};
use superosc::numerics::{rel_diff, PrecisionPolicy};

fn main() -> superosc::Result<()> {
    let policy = PrecisionPolicy::default();
    let a = 1.5;
    for delta in [1.0, 0.5] {
        let m = sinc_delta_measure(a, delta, &policy)?;
        for (re, im) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (2.0, 1.0)] {
            let z = Complex::with_val(m.precision(), (re, im));
            let closed = sinc_delta_closed_form(a, delta, &z)?;
            let quad = m.eval_transform(&z)?;
            println!("delta={delta} z={re}+{im}i  rel diff {:.2e}", rel_diff(&closed, &quad));
        }
    }
    Ok(())
}
