//! The binomial family `F_n(x) = (cos(x/n) + i a sin(x/n))^n`.

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::measures::{BorelMeasure, DiscreteMeasure, ExactAtoms};
use crate::numerics::PrecisionPolicy;

use super::{Index, IndexKind, SuperoscFamily};

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("the standard family starts at n = 1".into()));
    }
    Ok(())
}

/// Frequencies `1 - 2j/n` and weights `binom(n,j) ((1+a)/2)^{n-j} ((1-a)/2)^j`.
pub fn standard_exact(a: f64, n: u32) -> Result<ExactAtoms> {
    check_n(n)?;
    let a = Rational::from_f64(a).ok_or_else(|| Error::InvalidInput(format!("a = {a} is not finite")))?;
    let p = Rational::from(1 + &a) / 2u32;
    let q = Rational::from(1 - &a) / 2u32;
    let mut locations = Vec::with_capacity(n as usize + 1);
    let mut weights = Vec::with_capacity(n as usize + 1);
    for j in 0..=n {
        locations.push(Rational::from((n as i64 - 2 * j as i64, n)));
        let binom = Integer::from(Integer::binomial_u(n, j));
        let w = Rational::from((&p).pow(n - j)) * Rational::from((&q).pow(j)) * binom;
        weights.push(w);
    }
    Ok(ExactAtoms { locations, weights })
}

/// `log2 max_j |w_j|`, the coefficient growth the precision policy keys on.
pub fn log2_max_weight(weights: &[Rational]) -> f64 {
    weights
        .iter()
        .filter(|w| **w != 0)
        .map(|w| Float::with_val(64, w).abs().log2().to_f64())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The measure `mu_n` with working precision chosen by `policy`.
pub fn standard_measure(a: f64, n: u32, policy: &PrecisionPolicy) -> Result<BorelMeasure> {
    let exact = standard_exact(a, n)?;
    let bits = policy.bits_for_growth(log2_max_weight(&exact.weights))?;
    Ok(BorelMeasure::Discrete(DiscreteMeasure::from_exact(exact, 1.0, bits)?))
}

/// `(cos(z/n) + i a sin(z/n))^n` at the precision of `z`.
pub fn standard_closed_form(a: f64, n: u32, z: &Complex) -> Result<Complex> {
    check_n(n)?;
    let p = z.prec().0;
    let w = Complex::with_val(p, z / n);
    let (s, c) = w.sin_cos(Complex::new(p));
    let base = c + s * Complex::with_val(p, (0, a));
    let v = base.pow(n);
    crate::numerics::ensure_finite(v, || format!("standard family n = {n} overflows"))
}

/// The family `n -> mu_n` with band 1 and target `a`, `|a| > 1`.
pub fn standard_family(a: f64) -> Result<SuperoscFamily> {
    let fam = SuperoscFamily::new(format!("standard(a={a})"), 1.0, a, IndexKind::Integer, move |idx, policy| {
        let n = idx.as_n().expect("integer index");
        standard_measure(a, n, policy)
    })?;
    Ok(fam.with_closed_form(move |idx: Index, z: &Complex| {
        standard_closed_form(a, idx.as_n().expect("integer index"), z)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{complex, pi};

    #[test]
    fn weights_n2_a2() {
        let e = standard_exact(2.0, 2).unwrap();
        assert_eq!(e.locations, vec![Rational::from(1), Rational::from(0), Rational::from(-1)]);
        assert_eq!(
            e.weights,
            vec![Rational::from((9, 4)), Rational::from((-3, 2)), Rational::from((1, 4))]
        );
    }

    #[test]
    fn weights_sum_to_one() {
        for n in [1, 5, 17] {
            for a in [1.5, -3.25, 2.0] {
                let s: Rational = standard_exact(a, n).unwrap().weights.iter().sum();
                assert_eq!(s, 1);
            }
        }
    }

    #[test]
    fn closed_form_at_pi() {
        let z = crate::numerics::from_real(&pi(128));
        let v = standard_closed_form(2.0, 2, &z).unwrap();
        assert!((v.real().to_f64() + 4.0).abs() < 1e-30);
        assert!(v.imag().to_f64().abs() < 1e-30);
        let m = standard_measure(2.0, 2, &PrecisionPolicy::default()).unwrap();
        assert!(crate::numerics::rel_diff(&m.eval_transform(&z).unwrap(), &v) < 1e-35);
    }

    #[test]
    fn family_rejects_inband_target() {
        assert!(matches!(standard_family(0.5), Err(Error::HypothesisViolation(_))));
        let f = standard_family(2.0).unwrap();
        let e = f.evaluator(Index::N(4)).unwrap();
        assert!(e(&complex(128, 0.0, 0.0)).unwrap() == complex(128, 1.0, 0.0));
    }
}
