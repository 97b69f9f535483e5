//! Runs the four identity and inequality suites at reduced sample counts.

use superosc::metrics::{run_identity, IdentityConfig, IdentityName};

fn main() -> superosc::Result<()> {
    let cfg = IdentityConfig { samples: 2000, validation_samples: 200, ..IdentityConfig::default() };
    for name in [IdentityName::LemmaA1, IdentityName::LemmaA2, IdentityName::Lemma31, IdentityName::Cor33] {
        let r = run_identity(name, &cfg)?;
        println!("{name}: {}", if r.passed { "ok" } else { "FAILED" });
        for c in &r.cases {
            println!("  {:<24} max err {:.2e} (tol {:.0e})", c.case, c.max_error, c.tolerance);
        }
    }
    Ok(())
}
