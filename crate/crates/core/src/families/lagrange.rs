//! Prescribed-frequency families: weights `C_j` chosen so that
//! `sum_j C_j k_j^l = a^l` for `l = 0..n`.
//!
//! The closed-form Lagrange products and a direct Vandermonde solve are both
//! provided so that each can check the other.

use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::error::{Error, Result};
use crate::measures::{Atom, BorelMeasure, DiscreteMeasure, ExactAtoms};
use crate::numerics::linalg::{self, CMatrix, Solved};
use crate::numerics::PrecisionPolicy;

use super::standard::log2_max_weight;
use super::{IndexKind, SuperoscFamily};

/// `k_j = 1 - 2j/n` for `j = 0..n`; `{0}` when `n = 0`.
pub fn equispaced_frequencies(n: u32) -> Vec<Rational> {
    if n == 0 {
        return vec![Rational::new()];
    }
    (0..=n)
        .map(|j| Rational::from((n as i64 - 2 * j as i64, n)))
        .collect()
}

fn check_distinct_exact(freqs: &[Rational]) -> Result<()> {
    if freqs.is_empty() {
        return Err(Error::InvalidInput("at least one frequency is required".into()));
    }
    for (i, x) in freqs.iter().enumerate() {
        if let Some(j) = freqs[i + 1..].iter().position(|y| y == x) {
            return Err(Error::DuplicateFrequency(format!(
                "frequencies {i} and {} coincide at {x}",
                i + 1 + j
            )));
        }
    }
    Ok(())
}

fn check_distinct_float(freqs: &[Float], k0: f64) -> Result<()> {
    if freqs.is_empty() {
        return Err(Error::InvalidInput("at least one frequency is required".into()));
    }
    for (i, x) in freqs.iter().enumerate() {
        let p = x.prec();
        let tol = Float::with_val(p, Float::i_exp(1, -(p as i32) / 2)) * k0;
        for (j, y) in freqs.iter().enumerate().skip(i + 1) {
            if Float::with_val(p, x - y).abs() <= tol {
                return Err(Error::DuplicateFrequency(format!(
                    "frequencies {i} and {j} coincide within {:.3e}",
                    tol.to_f64()
                )));
            }
        }
    }
    Ok(())
}

fn check_band_and_target(freqs_abs_max: f64, a: f64, k0: f64) -> Result<()> {
    if freqs_abs_max > k0 {
        return Err(Error::ImageBoundViolation(format!(
            "frequency {freqs_abs_max} lies outside [-{k0}, {k0}]"
        )));
    }
    if a.abs() <= k0 {
        return Err(Error::HypothesisViolation(format!(
            "target |a| = {} does not exceed the band k0 = {k0}",
            a.abs()
        )));
    }
    Ok(())
}

/// `C_j = prod_{l != j} (k_l - a) / (k_l - k_j)` in exact arithmetic.
pub fn lagrange_weights_exact(freqs: &[Rational], a: &Rational) -> Result<Vec<Rational>> {
    check_distinct_exact(freqs)?;
    Ok((0..freqs.len())
        .map(|j| {
            let mut c = Rational::from(1);
            for (l, kl) in freqs.iter().enumerate() {
                if l != j {
                    c *= Rational::from(kl - a);
                    c /= Rational::from(kl - &freqs[j]);
                }
            }
            c
        })
        .collect())
}

/// Lagrange measure for rational frequencies; weights are exact and the
/// float atoms are rounded at the precision `policy` picks for their size.
pub fn lagrange_family(freqs: &[Rational], a: &Rational, k0: f64, policy: &PrecisionPolicy) -> Result<BorelMeasure> {
    let kmax = freqs.iter().map(|k| k.to_f64().abs()).fold(0.0, f64::max);
    check_band_and_target(kmax, a.to_f64(), k0)?;
    let weights = lagrange_weights_exact(freqs, a)?;
    let bits = policy.bits_for_growth(log2_max_weight(&weights))?;
    let exact = ExactAtoms { locations: freqs.to_vec(), weights };
    Ok(BorelMeasure::Discrete(DiscreteMeasure::from_exact(exact, k0, bits)?))
}

/// Lagrange measure for frequencies known only to finite precision. The
/// products run at the precision `policy` assigns to the predicted weight
/// size.
pub fn lagrange_family_float(freqs: &[Float], a: &Float, k0: f64, policy: &PrecisionPolicy) -> Result<BorelMeasure> {
    let kmax = freqs.iter().map(|k| k.to_f64().abs()).fold(0.0, f64::max);
    check_band_and_target(kmax, a.to_f64(), k0)?;
    check_distinct_float(freqs, k0)?;
    let growth = (0..freqs.len())
        .map(|j| {
            let kj = freqs[j].to_f64();
            freqs
                .iter()
                .enumerate()
                .filter(|(l, _)| *l != j)
                .map(|(_, kl)| {
                    let kl = kl.to_f64();
                    (kl - a.to_f64()).abs().log2() - (kl - kj).abs().log2()
                })
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let bits = policy.bits_for_growth(growth)?;
    let wp = bits + 32;
    let a = Float::with_val(wp, a);
    let mut atoms = Vec::with_capacity(freqs.len());
    for (j, kj) in freqs.iter().enumerate() {
        let mut c = Float::with_val(wp, 1);
        for (l, kl) in freqs.iter().enumerate() {
            if l != j {
                c *= Float::with_val(wp, kl - &a);
                c /= Float::with_val(wp, kl - kj);
            }
        }
        atoms.push(Atom {
            location: Float::with_val(bits, kj),
            weight: Complex::with_val(bits, (Float::with_val(bits, &c), 0)),
        });
    }
    Ok(BorelMeasure::Discrete(DiscreteMeasure::new(atoms, k0)?))
}

/// Solves `sum_j c_j k_j^l = a^l`, `l = 0..n`, by LU at `prec` bits and
/// reports the 1-norm condition number of the Vandermonde matrix.
pub fn vandermonde_solve(freqs: &[Float], a: &Float, prec: u32) -> Result<Solved> {
    crate::numerics::check_precision(prec)?;
    check_distinct_float(freqs, 1.0)?;
    let n = freqs.len();
    let v = CMatrix::from_fn(n, prec, |l, j| {
        Complex::with_val(prec, (Float::with_val(prec, (&freqs[j]).pow(l as u32)), 0))
    });
    let rhs: Vec<Complex> = (0..n)
        .map(|l| Complex::with_val(prec, (Float::with_val(prec, a.pow(l as u32)), 0)))
        .collect();
    linalg::solve(&v, &rhs)
}

/// Exact counterpart of [`vandermonde_solve`].
pub fn vandermonde_solve_exact(freqs: &[Rational], a: &Rational) -> Result<Vec<Rational>> {
    check_distinct_exact(freqs)?;
    let n = freqs.len();
    let v: Vec<Vec<Rational>> = (0..n)
        .map(|l| freqs.iter().map(|k| Rational::from(k.pow(l as u32))).collect())
        .collect();
    let rhs: Vec<Rational> = (0..n).map(|l| Rational::from(a.pow(l as u32))).collect();
    linalg::solve_rational(&v, &rhs)
}

/// Equispaced Lagrange family `n -> mu_n` on `[-1, 1]`, Taylor-matched to
/// order `n` at the origin.
pub fn lagrange_equispaced_family(a: f64) -> Result<SuperoscFamily> {
    let ar = Rational::from_f64(a).ok_or_else(|| Error::InvalidInput(format!("a = {a} is not finite")))?;
    let fam = SuperoscFamily::new(format!("lagrange_equispaced(a={a})"), 1.0, a, IndexKind::Integer, move |idx, policy| {
        let n = idx.as_n().expect("integer index");
        lagrange_family(&equispaced_frequencies(n), &ar, 1.0, policy)
    })?;
    Ok(fam.taylor_matched(true))
}

/// Lagrange family on a fixed, explicit frequency list; the only valid index
/// is `n = freqs.len() - 1`.
pub fn lagrange_fixed_family(freqs: Vec<Rational>, a: f64, k0: f64) -> Result<SuperoscFamily> {
    let ar = Rational::from_f64(a).ok_or_else(|| Error::InvalidInput(format!("a = {a} is not finite")))?;
    let expected = freqs.len().saturating_sub(1) as u32;
    let fam = SuperoscFamily::new(format!("lagrange(a={a}, {} freqs)", freqs.len()), k0, a, IndexKind::Integer, move |idx, policy| {
        let n = idx.as_n().expect("integer index");
        if n != expected {
            return Err(Error::InvalidInput(format!(
                "this frequency list defines only index n = {expected}, not {n}"
            )));
        }
        lagrange_family(&freqs, &ar, k0, policy)
    })?;
    Ok(fam.taylor_matched(true))
}
