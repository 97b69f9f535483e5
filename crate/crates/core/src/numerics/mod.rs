//! Precision-parameterized complex arithmetic and the special functions the
//! constructions rely on.
//!
//! All values are MPFR-backed [`rug`] numbers. A value carries its own
//! precision in bits; operations that combine values run at the precision of
//! the receiver unless stated otherwise.

pub mod bessel;
pub mod format;
pub mod linalg;

use rug::float::Constant;
use rug::{Assign, Complex, Float};

use crate::error::{Error, Result};

pub use bessel::bessel_j0;

/// Complex scalar at a configurable precision.
pub type PrecisionComplex = Complex;
/// Real scalar at a configurable precision.
pub type Real = Float;

/// Smallest precision accepted anywhere in the crate (IEEE double).
pub const MIN_PRECISION: u32 = 53;
/// Default working precision.
pub const DEFAULT_PRECISION: u32 = 128;
/// Default escalation cap.
pub const DEFAULT_MAX_BITS: u32 = 4096;
/// Environment variable overriding [`PrecisionPolicy::max_bits`].
pub const MAX_BITS_ENV: &str = "SUPEROSC_MAX_BITS";

/// Threshold on `|z|` below which [`csinc`] sums its Taylor series.
const SINC_SERIES_RADIUS: f64 = 0.5;

pub fn check_precision(bits: u32) -> Result<u32> {
    if bits < MIN_PRECISION {
        return Err(Error::InvalidInput(format!(
            "precision {bits} bits is below the minimum of {MIN_PRECISION}"
        )));
    }
    Ok(bits)
}

#[inline]
pub fn real(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

#[inline]
pub fn complex(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

#[inline]
pub fn from_real(x: &Float) -> Complex {
    Complex::with_val(x.prec(), (x, 0))
}

/// `i^l` as an exact complex unit.
pub fn i_pow(prec: u32, l: u32) -> Complex {
    match l % 4 {
        0 => complex(prec, 1.0, 0.0),
        1 => complex(prec, 0.0, 1.0),
        2 => complex(prec, -1.0, 0.0),
        _ => complex(prec, 0.0, -1.0),
    }
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

#[inline]
pub fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

#[inline]
pub fn abs_f64(z: &Complex) -> f64 {
    abs(z).to_f64()
}

#[inline]
pub fn is_finite(z: &Complex) -> bool {
    z.real().is_finite() && z.imag().is_finite()
}

/// Turns a non-finite value into [`Error::Overflow`].
pub fn ensure_finite(z: Complex, what: impl FnOnce() -> String) -> Result<Complex> {
    if is_finite(&z) {
        Ok(z)
    } else {
        Err(Error::Overflow(what()))
    }
}

/// Relative distance `|a-b| / max(|b|, tiny)` as an `f64`.
pub fn rel_diff(a: &Complex, b: &Complex) -> f64 {
    let prec = a.prec().0.max(b.prec().0);
    let d = Complex::with_val(prec, a - b);
    let den = abs_f64(b).max(f64::MIN_POSITIVE);
    abs_f64(&d) / den
}

/// Square root with `0 <= Arg(sqrt w) < pi`.
///
/// The argument of `w` is read in `[0, 2pi)`, so the cut sits on the positive
/// real axis approached from below.
pub fn csqrt_upper(w: &Complex) -> Complex {
    let mut s = w.clone().sqrt();
    // the principal root has Re >= 0; roots in the open lower half plane flip
    if s.imag().is_sign_negative() && !s.imag().is_zero() {
        s = -s;
    }
    if s.imag().is_zero() {
        s.mut_imag().assign(0);
    }
    s
}

/// `sin(z)/z`, entire, with the removable singularity filled in.
pub fn csinc(z: &Complex) -> Result<Complex> {
    let prec = z.prec().0;
    if abs_f64(z) < SINC_SERIES_RADIUS {
        let w = Complex::with_val(prec, z.square_ref());
        return Ok(even_sinc_series(&w));
    }
    let s = z.clone().sin();
    let out = Complex::with_val(prec, &s / z);
    ensure_finite(out, || format!("sinc overflow at z = {}", format::complex_short(z)))
}

/// `sinc(sqrt(w))` as an entire function of `w`.
///
/// Only even powers of the root enter the Taylor series, so the value does not
/// depend on the square-root branch.
pub fn sinc_of_sqrt(w: &Complex) -> Result<Complex> {
    if abs_f64(w) < SINC_SERIES_RADIUS * SINC_SERIES_RADIUS {
        return Ok(even_sinc_series(w));
    }
    csinc(&csqrt_upper(w))
}

/// `sum_n (-w)^n / (2n+1)!`, only used for small `|w|`.
fn even_sinc_series(w: &Complex) -> Complex {
    let prec = w.prec().0;
    let mut sum = complex(prec, 1.0, 0.0);
    let mut term = complex(prec, 1.0, 0.0);
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32) - 8));
    let mut n: u32 = 0;
    loop {
        term *= -w.clone();
        term /= (2 * n + 2) * (2 * n + 3);
        sum += &term;
        n += 1;
        if abs(&term) <= eps || n > 10 * prec {
            break;
        }
    }
    sum
}

/// Precision selection for computations whose coefficients grow
/// geometrically with the family index.
///
/// The working precision is at least `64 + ceil(log2(max_j |C_j|))` bits, so
/// that a sum whose terms reach `max|C_j|` still resolves an `O(1)` result to
/// about 64 bits. Results never drop below `base_bits` or exceed `max_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub base_bits: u32,
    pub max_bits: u32,
    /// When false every computation runs at `base_bits` regardless of growth.
    pub escalate: bool,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self {
            base_bits: DEFAULT_PRECISION,
            max_bits: DEFAULT_MAX_BITS,
            escalate: true,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(base_bits: u32, max_bits: u32) -> Result<Self> {
        check_precision(base_bits)?;
        if base_bits > max_bits {
            return Err(Error::InvalidInput(format!(
                "base precision {base_bits} exceeds the cap {max_bits}"
            )));
        }
        Ok(Self {
            base_bits,
            max_bits,
            escalate: true,
        })
    }

    /// A policy pinned to one precision, with escalation disabled.
    pub fn fixed(bits: u32) -> Result<Self> {
        check_precision(bits)?;
        Ok(Self {
            base_bits: bits,
            max_bits: bits,
            escalate: false,
        })
    }

    /// Default base with the cap read from `SUPEROSC_MAX_BITS` when set.
    pub fn from_env(base_bits: u32) -> Result<Self> {
        let max_bits = match std::env::var(MAX_BITS_ENV) {
            Ok(v) => v.trim().parse::<u32>().map_err(|_| {
                Error::InvalidInput(format!("{MAX_BITS_ENV}={v} is not a bit count"))
            })?,
            Err(_) => DEFAULT_MAX_BITS,
        };
        Self::new(base_bits, max_bits.max(base_bits))
    }

    /// Bits for a computation whose largest coefficient has magnitude
    /// `2^log2_growth`.
    pub fn bits_for_growth(&self, log2_growth: f64) -> Result<u32> {
        if !self.escalate {
            return Ok(self.base_bits);
        }
        let want = 64.0 + log2_growth.max(0.0).ceil();
        if !want.is_finite() || want > self.max_bits as f64 {
            return Err(Error::PrecisionExhausted(format!(
                "coefficient growth 2^{log2_growth:.1} needs {want} bits, cap is {}",
                self.max_bits
            )));
        }
        Ok(self.base_bits.max(want as u32))
    }

    /// Doubles `bits`, failing once the cap is hit.
    pub fn next_bits(&self, bits: u32) -> Result<u32> {
        if !self.escalate || bits >= self.max_bits {
            return Err(Error::PrecisionExhausted(format!(
                "cannot escalate beyond {} bits",
                bits.max(self.max_bits)
            )));
        }
        Ok((bits * 2).min(self.max_bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn close(a: &Complex, re: f64, im: f64, tol: f64) -> bool {
        (a.real().to_f64() - re).abs() <= tol && (a.imag().to_f64() - im).abs() <= tol
    }

    #[test]
    fn csqrt_upper_examples() {
        assert!(close(&csqrt_upper(&complex(P, 1.0, 0.0)), 1.0, 0.0, 0.0));
        assert!(close(&csqrt_upper(&complex(P, -1.0, 0.0)), 0.0, 1.0, 1e-30));
        assert!(close(&csqrt_upper(&complex(P, -1.0, -0.0)), 0.0, 1.0, 1e-30));
        assert!(close(&csqrt_upper(&complex(P, 0.0, -2.0)), -1.0, 1.0, 1e-30));
        assert!(csqrt_upper(&complex(P, 0.0, 0.0)).is_zero());
        // just below the positive real axis: Arg(w) close to 2pi, root close to -1
        let s = csqrt_upper(&complex(P, 1.0, -1e-20));
        assert!(close(&s, -1.0, 5e-21, 1e-25));
    }

    #[test]
    fn csinc_examples() {
        assert!(close(&csinc(&complex(P, 0.0, 0.0)).unwrap(), 1.0, 0.0, 0.0));
        let p = from_real(&pi(P));
        assert!(abs_f64(&csinc(&p).unwrap()) < 1e-35);
        assert!(close(&csinc(&complex(P, 0.0, 1.0)).unwrap(), 1.0_f64.sinh(), 0.0, 1e-15));
    }

    #[test]
    fn csinc_continuous_across_series_threshold() {
        for &r in &[0.499_999_999, 0.5, 0.500_000_001] {
            let z = complex(P, r * 0.6, r * 0.8);
            let series = even_sinc_series(&Complex::with_val(P, z.square_ref()));
            let direct = Complex::with_val(P, z.clone().sin() / &z);
            assert!(rel_diff(&series, &direct) < 1e-36);
        }
    }

    #[test]
    fn sinc_of_sqrt_examples() {
        assert!(close(&sinc_of_sqrt(&complex(P, 0.0, 0.0)).unwrap(), 1.0, 0.0, 0.0));
        let pi2 = from_real(&Float::with_val(P, pi(P).square_ref()));
        assert!(abs_f64(&sinc_of_sqrt(&pi2).unwrap()) < 1e-35);
        let v = sinc_of_sqrt(&complex(P, -1.0, 0.0)).unwrap();
        assert!(close(&v, 1.0_f64.sinh(), 0.0, 1e-15));
    }

    #[test]
    fn csinc_overflow_is_reported() {
        let z = complex(P, 0.0, 1e12);
        assert!(matches!(csinc(&z), Err(Error::Overflow(_))));
    }

    #[test]
    fn policy_escalation_rule() {
        let p = PrecisionPolicy::default();
        assert_eq!(p.bits_for_growth(10.0).unwrap(), 128);
        assert_eq!(p.bits_for_growth(100.2).unwrap(), 165);
        assert!(matches!(
            p.bits_for_growth(5000.0),
            Err(Error::PrecisionExhausted(_))
        ));
        let f = PrecisionPolicy::fixed(53).unwrap();
        assert_eq!(f.bits_for_growth(1000.0).unwrap(), 53);
        assert!(PrecisionPolicy::new(256, 128).is_err());
        assert!(PrecisionPolicy::fixed(32).is_err());
    }
}
