//! Densities of absolutely continuous measures and the multiplicative weights
//! that evolution folds into them.

use std::fmt;
use std::sync::Arc;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::families::symbol::EntireSymbol;
use crate::numerics::{bessel_j0, complex, ensure_finite, format, from_real};

type DensityFn = Arc<dyn Fn(&Float) -> Result<Complex> + Send + Sync>;

#[derive(Clone)]
pub enum Density {
    Constant(f64),
    /// `scale * k^power`.
    Monomial { power: u32, scale: f64 },
    /// `(1/delta) e^{(a k - 1)/delta} J0(sqrt((a^2-1)(1-k^2))/delta)` on `[-1, 1]`.
    SincDelta { a: f64, delta: f64 },
    /// `(1/2) J0(b sqrt(1-k^2))` on `[-1, 1]`.
    BesselKernel { b: f64 },
    /// `g(u) e^{-(u - ia)^2/(2 delta^2)} / (delta sqrt(2 pi))`, a parameter
    /// density for frequency maps `k(u)`.
    BerryGaussian { g: EntireSymbol, a: f64, delta: f64 },
    /// `(1/2) sum_l c_l e^{-i k x_l}` on `[-1, 1]`, whose transform is
    /// `sum_l c_l sinc(z - x_l)`.
    SincInterpolant { points: Vec<f64>, coeffs: Vec<Complex> },
    Custom { label: String, f: DensityFn },
    Weighted { inner: Box<Density>, factor: Factor },
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Density({})", self.label())
    }
}

impl Density {
    pub fn custom<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Float) -> Result<Complex> + Send + Sync + 'static,
    {
        Density::Custom {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Density::Constant(c) => format!("{c}"),
            Density::Monomial { power, scale } => format!("{scale}*k^{power}"),
            Density::SincDelta { a, delta } => format!("sinc_delta(a={a}, delta={delta})"),
            Density::BesselKernel { b } => format!("bessel_kernel(b={b})"),
            Density::BerryGaussian { g, a, delta } => {
                format!("berry_gaussian(g={}, a={a}, delta={delta})", g.label())
            }
            Density::SincInterpolant { points, .. } => {
                format!("sinc_interpolant({} points)", points.len())
            }
            Density::Custom { label, .. } => label.clone(),
            Density::Weighted { inner, factor } => format!("{} * {}", inner.label(), factor.label()),
        }
    }

    /// Value at `k`, computed at the precision of `k`.
    pub fn eval(&self, k: &Float) -> Result<Complex> {
        let p = k.prec();
        let v = match self {
            Density::Constant(c) => complex(p, *c, 0.0),
            Density::Monomial { power, scale } => {
                from_real(&(Float::with_val(p, k.pow(*power)) * *scale))
            }
            Density::SincDelta { a, delta } => {
                let a = Float::with_val(p, *a);
                let d = Float::with_val(p, *delta);
                let one_minus = (1u32 - Float::with_val(p, k.square_ref())).max(&Float::new(p));
                let arg = (Float::with_val(p, a.square_ref()) - 1u32) * one_minus;
                let arg = arg.sqrt() / &d;
                let e = ((Float::with_val(p, &a * k) - 1u32) / &d).exp();
                from_real(&(e / d * bessel_j0(&arg)))
            }
            Density::BesselKernel { b } => {
                let one_minus = (1u32 - Float::with_val(p, k.square_ref())).max(&Float::new(p));
                let arg = one_minus.sqrt() * *b;
                from_real(&(bessel_j0(&arg) / 2u32))
            }
            Density::BerryGaussian { g, a, delta } => {
                let d = Float::with_val(p, *delta);
                let shift = Complex::with_val(p, (k, -Float::with_val(p, *a)));
                let two_d2 = Float::with_val(p, d.square_ref()) * 2u32;
                let gauss = (-(Complex::with_val(p, shift.square_ref()) / two_d2)).exp();
                let norm = Float::with_val(p, Constant::Pi) * 2u32;
                let norm = norm.sqrt() * d;
                g.eval_real(k) * gauss / norm
            }
            Density::SincInterpolant { points, coeffs } => {
                let mut s = Complex::new(p);
                for (x, c) in points.iter().zip(coeffs) {
                    let ph = Complex::with_val(p, (0, -Float::with_val(p, k * *x))).exp();
                    s += ph * c;
                }
                s / 2u32
            }
            Density::Custom { f, .. } => f(k)?,
            Density::Weighted { inner, factor } => {
                let h = inner.eval(k)?;
                let w = factor.eval(&from_real(k))?;
                Complex::with_val(p, h * w)
            }
        };
        ensure_finite(v, || {
            format!("density {} overflows at k = {}", self.label(), format::decimal_with_digits(k, 12))
        })
    }

    /// Points where the density or one of its factors switches formula.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Density::BerryGaussian { g, .. } => g.breakpoints(),
            Density::Weighted { inner, factor } => {
                let mut b = inner.breakpoints();
                b.extend(factor.breakpoints());
                b
            }
            _ => Vec::new(),
        }
    }
}

/// A multiplicative weight `w(k)` applied to a measure.
#[derive(Clone, Debug)]
pub enum Factor {
    /// `e^{i H(k) t}`.
    Phase { symbol: EntireSymbol, time: Complex },
    /// `e^{H(k) - shift}`.
    Growth { symbol: EntireSymbol, shift: Complex },
    /// `sum_j c_j k^j`.
    Polynomial { coeffs: Vec<Complex> },
    /// `inner(map(u))`, the form a factor takes on the base of a composite.
    Composed { inner: Box<Factor>, map: EntireSymbol },
}

impl Factor {
    pub fn label(&self) -> String {
        match self {
            Factor::Phase { symbol, time } => {
                format!("exp(i*{}*t), t={}", symbol.label(), format::complex_short(time))
            }
            Factor::Growth { symbol, .. } => format!("exp({} - shift)", symbol.label()),
            Factor::Polynomial { coeffs } => format!("poly(deg {})", coeffs.len().saturating_sub(1)),
            Factor::Composed { inner, map } => format!("[{}]({})", inner.label(), map.label()),
        }
    }

    /// Value at `k`, computed at the precision of `k`.
    pub fn eval(&self, k: &Complex) -> Result<Complex> {
        let p = k.prec().0;
        let v = match self {
            Factor::Phase { symbol, time } => {
                let h = symbol.eval(k);
                let it = Complex::with_val(p, time * Complex::with_val(p, (0, 1)));
                Complex::with_val(p, h * it).exp()
            }
            Factor::Growth { symbol, shift } => {
                let h = symbol.eval(k);
                Complex::with_val(p, h - shift).exp()
            }
            Factor::Polynomial { coeffs } => {
                let mut acc = Complex::new(p);
                for c in coeffs.iter().rev() {
                    acc *= k;
                    acc += c;
                }
                acc
            }
            Factor::Composed { inner, map } => return inner.eval(&map.eval(k)),
        };
        ensure_finite(v, || {
            format!("weight {} overflows at k = {}", self.label(), format::complex_short(k))
        })
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Factor::Phase { symbol, .. } | Factor::Growth { symbol, .. } => symbol.breakpoints(),
            Factor::Polynomial { .. } => Vec::new(),
            // breakpoints of the inner factor live in the image, not in u
            Factor::Composed { map, .. } => map.breakpoints(),
        }
    }
}

pub(crate) fn custom_not_serializable(label: &str) -> Error {
    Error::Spec(format!("density '{label}' is a user closure and cannot be serialized"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::symbol::builtin_symbol;

    const P: u32 = 128;

    #[test]
    fn sinc_delta_at_right_endpoint() {
        let (a, d) = (1.5, 0.5);
        let v = Density::SincDelta { a, delta: d }.eval(&Float::with_val(P, 1)).unwrap();
        let expect = (1.0 / d) * ((a - 1.0) / d).exp();
        assert!((v.real().to_f64() - expect).abs() < 1e-14 * expect);
    }

    #[test]
    fn weighted_and_composed_factors() {
        let inner = Density::Constant(0.5);
        let f = Factor::Phase {
            symbol: EntireSymbol::square(),
            time: complex(P, 2.0, 0.0),
        };
        let w = Density::Weighted { inner: Box::new(inner), factor: f.clone() };
        let v = w.eval(&Float::with_val(P, 0.5)).unwrap();
        // 0.5 * e^{i 0.25 * 2}
        assert!((v.real().to_f64() - 0.5 * 0.5f64.cos()).abs() < 1e-15);
        assert!((v.imag().to_f64() - 0.5 * 0.5f64.sin()).abs() < 1e-15);
        let c = Factor::Composed { inner: Box::new(f), map: builtin_symbol("k4").unwrap() };
        let u = complex(P, 0.3, 0.0);
        let direct = (2.0 * 0.3f64.cos().powi(2)).sin();
        assert!((c.eval(&u).unwrap().imag().to_f64() - direct).abs() < 1e-15);
    }

    #[test]
    fn growth_overflow_is_reported() {
        let f = Factor::Growth {
            symbol: EntireSymbol::real_polynomial(&[0.0, 1e30]),
            shift: complex(P, 0.0, 0.0),
        };
        assert!(matches!(f.eval(&complex(P, 1e30, 0.0)), Err(Error::Overflow(_))));
    }
}
