//! Cancellation in a high-index standard member: the escalated precision
//! recovers F(0) = 1, a pinned 53-bit sum does not.

use rug::Complex;
use superosc::families::standard_measure;
use superosc::numerics::PrecisionPolicy;

fn main() -> superosc::Result<()> {
    let z = Complex::with_val(53, 0);
    for (label, policy) in [("escalating", PrecisionPolicy::default()), ("fixed 53-bit", PrecisionPolicy::fixed(53)?)] {
        let m = standard_measure(2.0, 30, &policy)?;
        let v = m.eval_transform(&z)?;
        println!("{label:>13}: {} bits, F(0) - 1 = {:.3e}", m.precision(), v.real().to_f64() - 1.0);
    }
    Ok(())
}
