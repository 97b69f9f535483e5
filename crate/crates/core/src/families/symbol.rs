//! Entire functions used as frequency maps, amplitude functions and
//! Hamiltonian symbols.

use std::fmt;
use std::sync::Arc;

use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{complex, from_real};

type EvalFn = Arc<dyn Fn(&Complex) -> Complex + Send + Sync>;

/// Serializable description of a symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSpec {
    /// `sum_l h_l z^l`; each coefficient is a real number or a `[re, im]` pair.
    Poly {
        poly: Vec<Coefficient>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        image_bound: Option<f64>,
    },
    Builtin {
        builtin: String,
        /// Half-width of the interval on which `k5`/`g5` use their inner formula.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
    },
    /// `outer(inner(z))`.
    Compose { compose: (Box<SymbolSpec>, Box<SymbolSpec>) },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

impl Coefficient {
    pub fn parts(&self) -> (f64, f64) {
        match *self {
            Coefficient::Real(r) => (r, 0.0),
            Coefficient::Complex([r, i]) => (r, i),
        }
    }
}

impl SymbolSpec {
    pub fn build(&self) -> Result<EntireSymbol> {
        match self {
            SymbolSpec::Poly { poly, image_bound } => {
                let mut s = EntireSymbol::polynomial(poly.iter().map(Coefficient::parts).collect())?;
                if let Some(b) = image_bound {
                    s = s.with_image_bound(*b)?;
                }
                Ok(s)
            }
            SymbolSpec::Builtin { builtin, cutoff } => {
                let s = builtin_symbol(builtin)?;
                match cutoff {
                    Some(c) => s.with_cutoff(*c),
                    None => Ok(s),
                }
            }
            SymbolSpec::Compose { compose: (outer, inner) } => {
                Ok(outer.build()?.compose(&inner.build()?))
            }
        }
    }
}

/// Admissible targets `a` of a builtin symbol: open below, optionally closed above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ARange {
    pub lo: f64,
    pub hi: f64,
    pub hi_inclusive: bool,
}

impl ARange {
    pub fn contains(&self, a: f64) -> bool {
        a > self.lo && (a < self.hi || (self.hi_inclusive && a == self.hi))
    }
}

impl fmt::Display for ARange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let close = if self.hi_inclusive { ']' } else { ')' };
        write!(f, "({}, {}{close}", self.lo, self.hi)
    }
}

#[derive(Clone)]
enum Kind {
    Poly(Vec<(f64, f64)>),
    Builtin(&'static str),
    Compose(Box<EntireSymbol>, Box<EntireSymbol>),
}

/// An entire function with the metadata the constructions rely on.
#[derive(Clone)]
pub struct EntireSymbol {
    label: String,
    kind: Kind,
    eval: EvalFn,
    band_image_bound: Option<f64>,
    admissible: Option<ARange>,
    /// Points of the real line where a piecewise builtin switches formula.
    cutoff: Option<f64>,
}

impl fmt::Debug for EntireSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EntireSymbol")
            .field("label", &self.label)
            .field("band_image_bound", &self.band_image_bound)
            .finish()
    }
}

pub const BUILTIN_NAMES: [&str; 7] = ["k1", "k2", "k3", "k4", "k5", "g5", "const1"];

/// One of the frequency/amplitude functions `k1..k5`, `g5` or the constant 1.
///
/// `k5` and `g5` are piecewise on the real line and start with cutoff 2, the
/// largest admissible target; [`crate::families::BerrySpec`] rebinds the
/// cutoff to its `a`.
pub fn builtin_symbol(name: &str) -> Result<EntireSymbol> {
    let (key, bound, range): (&'static str, Option<f64>, Option<ARange>) = match name {
        "k1" => ("k1", Some(1.0), Some(ARange { lo: 0.0, hi: std::f64::consts::SQRT_2, hi_inclusive: false })),
        "k2" => ("k2", Some(1.0), Some(ARange { lo: 0.0, hi: std::f64::consts::FRAC_PI_2, hi_inclusive: false })),
        "k3" => ("k3", Some(1.0), Some(ARange { lo: 0.0, hi: f64::INFINITY, hi_inclusive: false })),
        "k4" => ("k4", Some(1.0), Some(ARange { lo: 0.0, hi: f64::INFINITY, hi_inclusive: false })),
        "k5" => ("k5", Some(1.0), Some(ARange { lo: 0.0, hi: 2.0, hi_inclusive: true })),
        "g5" => ("g5", None, Some(ARange { lo: 0.0, hi: 2.0, hi_inclusive: true })),
        "const1" => ("const1", Some(1.0), None),
        other => {
            return Err(Error::UnknownSymbol(format!(
                "'{other}' (known: {})",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    let cutoff = matches!(key, "k5" | "g5").then_some(2.0);
    Ok(EntireSymbol {
        label: key.to_string(),
        kind: Kind::Builtin(key),
        eval: builtin_eval(key, cutoff),
        band_image_bound: bound,
        admissible: range,
        cutoff,
    })
}

fn builtin_eval(key: &'static str, cutoff: Option<f64>) -> EvalFn {
    match key {
        "k1" => Arc::new(|z: &Complex| {
            let p = z.prec().0;
            let d = Complex::with_val(p, z.square_ref()) / 2u32 + 1u32;
            d.recip()
        }),
        "k2" => Arc::new(|z: &Complex| z.clone().cosh().recip()),
        "k3" => Arc::new(|z: &Complex| {
            let p = z.prec().0;
            (-(Complex::with_val(p, z.square_ref()) / 2u32)).exp()
        }),
        "k4" => Arc::new(|z: &Complex| z.clone().cos()),
        "k5" => {
            let c = cutoff.expect("k5 carries a cutoff");
            Arc::new(move |z: &Complex| {
                let p = z.prec().0;
                if outside_real_cutoff(z, c) {
                    Complex::new(p)
                } else {
                    1u32 - Complex::with_val(p, z.square_ref()) / 2u32
                }
            })
        }
        "g5" => {
            let c = cutoff.expect("g5 carries a cutoff");
            Arc::new(move |z: &Complex| {
                let p = z.prec().0;
                if outside_real_cutoff(z, c) {
                    Complex::new(p)
                } else {
                    complex(p, 1.0, 0.0)
                }
            })
        }
        _ => Arc::new(|z: &Complex| complex(z.prec().0, 1.0, 0.0)),
    }
}

/// Real point with `|x| > c`; off the real axis the inner formula applies.
fn outside_real_cutoff(z: &Complex, c: f64) -> bool {
    z.imag().is_zero() && z.real().to_f64().abs() > c
}

fn horner(coeffs: &[(f64, f64)], z: &Complex) -> Complex {
    let p = z.prec().0;
    let mut acc = Complex::new(p);
    for &(re, im) in coeffs.iter().rev() {
        acc *= z;
        acc += complex(p, re, im);
    }
    acc
}

impl EntireSymbol {
    /// `sum_l h_l z^l` with `coeffs[l] = (re h_l, im h_l)`.
    pub fn polynomial(coeffs: Vec<(f64, f64)>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|(r, i)| !r.is_finite() || !i.is_finite()) {
            return Err(Error::InvalidInput(
                "polynomial symbol needs at least one finite coefficient".into(),
            ));
        }
        let label = poly_label(&coeffs);
        let c = coeffs.clone();
        Ok(Self {
            label,
            kind: Kind::Poly(coeffs),
            eval: Arc::new(move |z| horner(&c, z)),
            band_image_bound: None,
            admissible: None,
            cutoff: None,
        })
    }

    /// Real polynomial shorthand.
    pub fn real_polynomial(coeffs: &[f64]) -> Self {
        Self::polynomial(coeffs.iter().map(|&c| (c, 0.0)).collect())
            .expect("finite nonempty coefficients")
    }

    pub fn identity() -> Self {
        Self::real_polynomial(&[0.0, 1.0])
    }

    pub fn square() -> Self {
        Self::real_polynomial(&[0.0, 0.0, 1.0])
    }

    pub fn constant(c: f64) -> Self {
        Self::real_polynomial(&[c])
    }

    pub fn with_image_bound(mut self, h0: f64) -> Result<Self> {
        if !(h0 > 0.0 && h0.is_finite()) {
            return Err(Error::InvalidInput(format!("image bound {h0} must be positive")));
        }
        self.band_image_bound = Some(h0);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Moves the switch point of a piecewise builtin.
    pub fn with_cutoff(mut self, c: f64) -> Result<Self> {
        match self.kind {
            Kind::Builtin(key @ ("k5" | "g5")) => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::InvalidInput(format!("cutoff {c} must be positive")));
                }
                self.cutoff = Some(c);
                self.eval = builtin_eval(key, Some(c));
                Ok(self)
            }
            _ => Err(Error::InvalidInput(format!(
                "symbol {} has no cutoff",
                self.label
            ))),
        }
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &EntireSymbol) -> Self {
        let (f, g) = (self.eval.clone(), inner.eval.clone());
        Self {
            label: format!("{}({})", self.label, inner.label),
            kind: Kind::Compose(Box::new(self.clone()), Box::new(inner.clone())),
            eval: Arc::new(move |z| f(&g(z))),
            band_image_bound: None,
            admissible: None,
            cutoff: None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, z: &Complex) -> Complex {
        (self.eval)(z)
    }

    pub fn eval_real(&self, x: &Float) -> Complex {
        (self.eval)(&from_real(x))
    }

    pub fn poly_coeffs(&self) -> Option<&[(f64, f64)]> {
        match &self.kind {
            Kind::Poly(c) => Some(c),
            _ => None,
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.poly_coeffs().map(|c| {
            c.iter()
                .rposition(|&(r, i)| r != 0.0 || i != 0.0)
                .unwrap_or(0)
        })
    }

    pub fn band_image_bound(&self) -> Option<f64> {
        self.band_image_bound
    }

    pub fn admissible_range(&self) -> Option<ARange> {
        self.admissible
    }

    pub fn cutoff(&self) -> Option<f64> {
        self.cutoff
    }

    /// Real points where quadrature panels should be split.
    pub fn breakpoints(&self) -> Vec<f64> {
        match (&self.kind, self.cutoff) {
            (Kind::Compose(o, i), _) => {
                let mut b = o.breakpoints();
                b.extend(i.breakpoints());
                b
            }
            (_, Some(c)) => vec![-c, c],
            _ => Vec::new(),
        }
    }

    pub fn builtin_name(&self) -> Option<&'static str> {
        match self.kind {
            Kind::Builtin(k) => Some(k),
            _ => None,
        }
    }

    pub fn check_admissible(&self, a: f64) -> Result<()> {
        match self.admissible {
            Some(r) if !r.contains(a) => Err(Error::HypothesisViolation(format!(
                "a = {a} outside the admissible range {r} of {}",
                self.label
            ))),
            _ => Ok(()),
        }
    }

    /// Closed form of `self(ia)` for builtins, direct evaluation otherwise.
    pub fn value_at_ia(&self, a: &Float) -> Complex {
        let p = a.prec();
        let re = |v: Float| from_real(&v);
        match self.kind {
            Kind::Builtin("k1") => {
                let d = 1u32 - Float::with_val(p, a.square_ref()) / 2u32;
                re(d.recip())
            }
            Kind::Builtin("k2") => re(a.clone().cos().recip()),
            Kind::Builtin("k3") => re((Float::with_val(p, a.square_ref()) / 2u32).exp()),
            Kind::Builtin("k4") => re(a.clone().cosh()),
            Kind::Builtin("k5") => re(Float::with_val(p, a.square_ref()) / 2u32 + 1u32),
            Kind::Builtin("g5") | Kind::Builtin("const1") => complex(p, 1.0, 0.0),
            _ => self.eval(&Complex::with_val(p, (0, a))),
        }
    }

    /// Exact value at a rational point for real polynomials.
    pub fn eval_rational(&self, x: &Rational) -> Option<Rational> {
        let c = self.poly_coeffs()?;
        if c.iter().any(|&(_, i)| i != 0.0) {
            return None;
        }
        let mut acc = Rational::new();
        for &(r, _) in c.iter().rev() {
            acc *= x;
            acc += Rational::from_f64(r)?;
        }
        Some(acc)
    }

    pub fn spec(&self) -> SymbolSpec {
        match &self.kind {
            Kind::Poly(c) => SymbolSpec::Poly {
                poly: c
                    .iter()
                    .map(|&(r, i)| {
                        if i == 0.0 {
                            Coefficient::Real(r)
                        } else {
                            Coefficient::Complex([r, i])
                        }
                    })
                    .collect(),
                image_bound: self.band_image_bound,
            },
            Kind::Builtin(k) => SymbolSpec::Builtin {
                builtin: k.to_string(),
                cutoff: self.cutoff.filter(|&c| c != 2.0),
            },
            Kind::Compose(o, i) => SymbolSpec::Compose {
                compose: (Box::new(o.spec()), Box::new(i.spec())),
            },
        }
    }

    /// Largest `|self(x)|` over `samples` equispaced points of `[lo, hi]`,
    /// and the largest imaginary part seen.
    pub fn sample_real(&self, lo: f64, hi: f64, samples: usize, prec: u32) -> (f64, f64) {
        let n = samples.max(2);
        let mut max_abs: f64 = 0.0;
        let mut max_im: f64 = 0.0;
        for i in 0..n {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let v = self.eval_real(&Float::with_val(prec, x));
            max_abs = max_abs.max(crate::numerics::abs_f64(&v));
            max_im = max_im.max(v.imag().to_f64().abs());
        }
        (max_abs, max_im)
    }
}

fn poly_label(c: &[(f64, f64)]) -> String {
    let terms: Vec<String> = c
        .iter()
        .enumerate()
        .filter(|(_, &(r, i))| r != 0.0 || i != 0.0)
        .map(|(l, &(r, i))| {
            let coef = if i == 0.0 { format!("{r}") } else { format!("({r}{i:+}i)") };
            match l {
                0 => coef,
                1 => format!("{coef}*k"),
                _ => format!("{coef}*k^{l}"),
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}
