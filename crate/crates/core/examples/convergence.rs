//! Weighted sup-distance to the plane wave for three families.

use superosc::families::{berry_family, sinc_delta_family, standard_family, BerrySpec, Index};
use superosc::metrics::{convergence_report, ReportOptions};

fn main() -> superosc::Result<()> {
    let opts = ReportOptions::default();
    let runs = [
        (standard_family(2.0)?, [2u32, 4, 8, 16].map(Index::N).to_vec(), 6.0),
        (sinc_delta_family(1.5)?, [1.0, 0.5, 0.25, 0.125].map(Index::Delta).to_vec(), 4.0),
        (berry_family(BerrySpec::with_builtin("k2", 1.0)?)?, [0.8, 0.4, 0.2].map(Index::Delta).to_vec(), 3.0),
    ];
    for (fam, idx, b) in &runs {
        let r = convergence_report(fam, idx, *b, &opts)?;
        println!("{} B={b}: {:?}", r.family, r.verdict);
        for (i, s) in r.indices.iter().zip(r.sup_values()) {
            println!("  {i:>6}  {s:.3e}");
        }
    }
    Ok(())
}
