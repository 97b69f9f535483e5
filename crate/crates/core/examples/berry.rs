//! Berry's integral construction for each builtin frequency map.

use rug::{Complex, Float};
use superosc::families::{berry_eval, BerrySpec};

fn main() -> superosc::Result<()> {
    for name in ["k1", "k2", "k3", "k4", "k5"] {
        let spec = BerrySpec::with_builtin(name, 1.0)?;
        let f0 = berry_eval(&spec, 0.5, &Complex::with_val(128, 0))?;
        let kia = spec.k().value_at_ia(&Float::with_val(128, spec.a()));
        println!(
            "{name}: F(0) = {:.12}  k(ia) = {:.12}{:+.12}i  target {}",
            f0.real().to_f64(),
            kia.real().to_f64(),
            kia.imag().to_f64(),
            spec.target()
        );
    }
    Ok(())
}
