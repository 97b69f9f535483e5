//! Acceptance run: twelve criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line is printed on a normal
//! `cargo test`; the process exits non-zero if any criterion fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float, Rational};

use superosc::evolution::{family_two_sequence, pde_residual, propagate};
use superosc::families::{
    berry_eval, berry_family, builtin_symbol, equispaced_frequencies, lagrange_family, lagrange_weights_exact,
    moment_family, sinc_delta_closed_form, sinc_delta_family, sinc_delta_measure, standard_family, standard_measure,
    BerrySpec, EntireSymbol, Index,
};
use superosc::measures::{BorelMeasure, Density, DensityMeasure, QuadratureSpec};
use superosc::metrics::{
    convergence_report, equispaced_separation, run_identity, taylor_defect, taylor_defect_exact, growth_error_bound,
    IdentityConfig, IdentityName, ReportOptions, Verdict,
};
use superosc::numerics::{rel_diff, PrecisionPolicy};
use superosc::Result;

const P: u32 = 128;

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::default()
}

fn c(re: f64, im: f64) -> Complex {
    Complex::with_val(P, (re, im))
}

fn plane_wave(a: f64, z: &Complex) -> Complex {
    let p = z.prec().0;
    Complex::with_val(p, z * Complex::with_val(p, (0, a))).exp()
}

fn taylor_exactness() -> Result<Outcome> {
    let start = Instant::now();
    let a = Rational::from(2);
    let mut bad = Vec::new();
    for n in 1..=12u32 {
        let m = lagrange_family(&equispaced_frequencies(n), &a, 1.0, &policy())?;
        for l in 0..=n {
            match taylor_defect_exact(&m, &a, l) {
                Some((re, im)) if re == 0 && im == 0 => {}
                other => bad.push(format!("n={n} l={l}: {other:?}")),
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(bad.is_empty() && secs < 5.0, format!("78 exact zero defects, {secs:.2}s {bad:?}"))
}

fn standard_defect() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for a in [1.5, 2.0, 3.0] {
        for n in [2u32, 4, 8, 16] {
            let d = taylor_defect(&standard_measure(a, n, &policy())?, a, 2)?;
            let want = (a * a - 1.0) / n as f64;
            let err = Complex::with_val(P, &d - want).abs().real().to_f64() / want;
            worst = worst.max(err);
        }
    }
    outcome(worst <= 1e-12, format!("max rel err {worst:.2e} vs (a^2-1)/n"))
}

fn explicit_bound() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let a = Rational::from(2);
    let mut violations = 0;
    let mut checked = 0;
    for n in [4u32, 8, 12] {
        let freqs = equispaced_frequencies(n);
        let k2 = lagrange_weights_exact(&freqs, &a)?
            .into_iter()
            .map(|w| w.abs().to_f64())
            .fold(0.0, f64::max);
        let m = lagrange_family(&freqs, &a, 1.0, &policy())?;
        let prec = m.precision();
        for _ in 0..100 {
            let r = 2.0 * rng.gen::<f64>().sqrt();
            let th = rng.gen::<f64>() * std::f64::consts::TAU;
            let z = Complex::with_val(prec, (r * th.cos(), r * th.sin()));
            let err = Complex::with_val(prec, m.eval_transform(&z)? - plane_wave(2.0, &z)).abs().real().clone();
            if err > growth_error_bound(1.0, k2, n, 2.0, &z)? {
                violations += 1;
            }
            checked += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations in {checked} samples"))
}

fn a1_decrease() -> Result<Outcome> {
    let opts = ReportOptions::default();
    let runs = [
        (standard_family(2.0)?, [2u32, 4, 8, 16].map(Index::N).to_vec(), 6.0),
        (sinc_delta_family(1.5)?, [1.0, 0.5, 0.25, 0.125].map(Index::Delta).to_vec(), 4.0),
        (berry_family(BerrySpec::with_builtin("k2", 1.0)?)?, [0.8, 0.4, 0.2].map(Index::Delta).to_vec(), 3.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (fam, idx, b) in &runs {
        let r = convergence_report(fam, idx, *b, &opts)?;
        let sups = r.sup_values();
        let strict = sups.windows(2).all(|w| w[1] < w[0]);
        pass &= r.verdict == Verdict::Decreasing && strict;
        parts.push(format!("{}: {:?}", r.family, r.verdict));
    }
    outcome(pass, parts.join("; "))
}

fn sinc_closed_form() -> Result<Outcome> {
    let a = 1.5;
    let mut worst: f64 = 0.0;
    let mut worst0: f64 = 0.0;
    for delta in [1.0, 0.5] {
        let m = sinc_delta_measure(a, delta, &policy())?;
        for (re, im) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (2.0, 1.0)] {
            let z = c(re, im);
            worst = worst.max(rel_diff(&sinc_delta_closed_form(a, delta, &z)?, &m.eval_transform(&z)?));
        }
        let want = 1 - (Float::with_val(P, -2) / delta).exp();
        let got = m.eval_transform(&c(0.0, 0.0))?;
        worst0 = worst0.max(Complex::with_val(P, got - &want).abs().real().to_f64());
    }
    outcome(
        worst <= 1e-8 && worst0 <= 1e-12,
        format!("closed form vs measure {worst:.2e}; F(0) vs 1-e^(-2/delta) {worst0:.2e}"),
    )
}

fn bessel_identity() -> Result<Outcome> {
    let r = run_identity(IdentityName::LemmaA2, &IdentityConfig { prec: P, ..IdentityConfig::default() })?;
    let points: usize = r.cases.iter().map(|c| c.samples).sum();
    let worst = r.cases.iter().map(|c| c.max_error).fold(0.0, f64::max);
    outcome(r.passed && worst <= 1e-8 && points == 12, format!("max rel err {worst:.2e} over {points} points"))
}

fn inequality_suites() -> Result<Outcome> {
    let cfg = IdentityConfig { samples: 10_000, validation_samples: 1000, ..IdentityConfig::default() };
    let a1 = run_identity(IdentityName::LemmaA1, &cfg)?;
    let l31 = run_identity(IdentityName::Lemma31, &cfg)?;
    let v1: usize = a1.cases.iter().map(|c| c.violations).sum();
    let n1: usize = a1.cases.iter().map(|c| c.samples).sum();
    let v31: usize = l31.cases.iter().map(|c| c.violations).sum();
    let n31: usize = l31.cases.iter().map(|c| c.samples).sum();
    outcome(
        a1.passed && l31.passed && v1 == 0 && v31 == 0 && n1 >= 10_000 && n31 >= 3000,
        format!("pair inequality {v1}/{n1} violations; fitted exponential bound {v31}/{n31} violations"),
    )
}

fn berry_normalization() -> Result<Outcome> {
    let mut worst_norm: f64 = 0.0;
    for name in ["k1", "k2", "k3", "k4", "k5"] {
        let spec = BerrySpec::with_builtin(name, 1.0)?;
        let f0 = berry_eval(&spec, 0.5, &c(0.0, 0.0))?;
        worst_norm = worst_norm.max(Complex::with_val(P, f0 - 1u32).abs().real().to_f64());
    }
    // k(ia) written out by hand, compared with the library's closed forms
    // and with direct evaluation of k at ia.
    let hp = 256;
    let by_hand = |name: &str, a: &Float| -> Float {
        let a2 = Float::with_val(hp, a.square_ref());
        match name {
            "k1" => (1u32 - a2 / 2u32).recip(),
            "k2" => a.clone().cos().recip(),
            "k3" => (a2 / 2u32).exp(),
            _ => a.clone().cosh(),
        }
    };
    let mut worst_ia: f64 = 0.0;
    for (name, a) in [("k1", 0.5), ("k1", 1.2), ("k2", 0.7), ("k2", 1.5), ("k3", 1.0), ("k3", 3.0), ("k4", 2.0), ("k4", 0.1)] {
        let k = builtin_symbol(name)?;
        let af = Float::with_val(hp, a);
        let closed = k.value_at_ia(&af);
        let direct = k.eval(&Complex::with_val(hp, (0, &af)));
        let hand = Complex::with_val(hp, (by_hand(name, &af), 0));
        worst_ia = worst_ia.max(rel_diff(&closed, &direct)).max(rel_diff(&closed, &hand));
    }
    outcome(
        worst_norm <= 1e-10 && worst_ia <= 1e-20,
        format!("|F(0)-1| <= {worst_norm:.2e}; k(ia) rel err {worst_ia:.2e}"),
    )
}

fn evolution() -> Result<Outcome> {
    let m = standard_measure(2.0, 8, &policy())?;
    let h = EntireSymbol::square();
    let (t1, t2) = (c(0.3, 0.0), c(-0.7, 0.1));
    let t12 = Complex::with_val(P, &t1 + &t2);
    let once = propagate(&m, &h, &t12)?;
    let composed = propagate(&m, &h, &t1)?.then(&t2)?;
    let exact = once.measure().as_discrete().map(|d| d.atoms().to_vec())
        == composed.measure().as_discrete().map(|d| d.atoms().to_vec());
    // Nested propagation goes through a different rounding path.
    let nested = propagate(propagate(&m, &h, &t1)?.measure(), &h, &t2)?;
    let nested_err = once
        .measure()
        .as_discrete()
        .expect("discrete")
        .atoms()
        .iter()
        .zip(nested.measure().as_discrete().expect("discrete").atoms())
        .map(|(x, y)| rel_diff(&x.weight, &y.weight))
        .fold(0.0, f64::max);

    let z = c(0.3, 0.0);
    let r: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|s| pde_residual(&m, &h, 0.1, &z, *s).map(|v| v.to_f64()))
        .collect::<Result<_>>()?;
    let slopes: Vec<f64> = r.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let slope_ok = slopes.iter().all(|s| (s - 2.0).abs() < 0.1);

    let two = family_two_sequence(&standard_family(2.0)?, &EntireSymbol::square().with_image_bound(1.0)?)?;
    let rep = convergence_report(&two, &[4, 8, 16].map(Index::N), 8.0, &ReportOptions::default())?;
    let two_ok = two.target() == 4.0 && two.band() == 1.0 && rep.verdict == Verdict::Decreasing;
    outcome(
        exact && nested_err < 1e-30 && slope_ok && two_ok,
        format!(
            "semigroup exact {exact} (nested {nested_err:.1e}); residual slopes {:.3}, {:.3}; second family target {} {:?}",
            slopes[0],
            slopes[1],
            two.target(),
            rep.verdict
        ),
    )
}

fn separation() -> Result<Outcome> {
    let kappa = equispaced_separation(30)?;
    let e_inv = (-1f64).exp();
    outcome(kappa >= e_inv, format!("kappa = {kappa:.6} >= 1/e = {e_inv:.6}"))
}

fn precision_stress() -> Result<Outcome> {
    let fam = standard_family(2.0)?;
    let f = fam.transform_evaluator(Index::N(30))?;
    let v = f(&c(0.0, 0.0))?;
    let err = Complex::with_val(P, v - 1u32).abs().real().to_f64();
    let fixed = standard_measure(2.0, 30, &PrecisionPolicy::fixed(53)?)?;
    let note = match fixed.eval_transform(&Complex::with_val(53, 0)) {
        Ok(v) => format!("{:.2e}", Complex::with_val(53, v - 1u32).abs().real().to_f64()),
        Err(e) => e.to_string(),
    };
    outcome(err <= 1e-10, format!("escalated |F(0)-1| = {err:.2e}; 53-bit run: {note}"))
}

fn moment_construction() -> Result<Outcome> {
    let h = BorelMeasure::Density(DensityMeasure::new(
        (-1.0, 1.0),
        Density::Constant(0.5),
        QuadratureSpec::default(),
        1.0,
        P,
    )?);
    let mf = moment_family(&h, 1, 2.0, &policy())?;
    let want = vec![(Rational::from(1), Rational::from(0)), (Rational::from(0), Rational::from(-6))];
    let exact_ok = mf.exact.as_ref() == Some(&want);

    let step = Float::with_val(P, 1e-7);
    let f0 = mf.eval(&c(0.0, 0.0))?;
    let fp = mf.eval(&Complex::with_val(P, (&step, 0)))?;
    let fm = mf.eval(&Complex::with_val(P, (-step.clone(), 0)))?;
    let d = Complex::with_val(P, fp - fm) / Float::with_val(P, &step * 2u32);
    let e0 = Complex::with_val(P, f0 - 1u32).abs().real().to_f64();
    let e1 = Complex::with_val(P, d - c(0.0, 2.0)).abs().real().to_f64();
    outcome(
        exact_ok && e0 <= 1e-12 && e1 <= 1e-12,
        format!("C = {:?}; |F(0)-1| = {e0:.1e}; |F'(0)-2i| = {e1:.1e}", mf.exact),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("taylor exactness, equispaced lagrange n<=12", taylor_exactness),
        ("standard family second-order defect", standard_defect),
        ("explicit error bound, lagrange n in {4,8,12}", explicit_bound),
        ("weighted sup decrease for three families", a1_decrease),
        ("sinc family closed form vs measure", sinc_closed_form),
        ("bessel kernel sinc identity", bessel_identity),
        ("inequality suites", inequality_suites),
        ("berry normalization and k(ia)", berry_normalization),
        ("evolution: semigroup, residual, second family", evolution),
        ("equispaced separation constant", separation),
        ("precision stress at n=30", precision_stress),
        ("moment construction, constant weight", moment_construction),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2}: {name} [{:.2}s] {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
