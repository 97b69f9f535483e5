//! Gaussian-smoothed families `F_delta(z) = (1/(delta sqrt(2 pi))) int_R g(u)
//! e^{i k(u) z} e^{-(u - ia)^2/(2 delta^2)} du`, which converge to
//! `e^{i k(ia) z}` as `delta -> 0` while `k` maps the real line into the band.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::measures::{BorelMeasure, CompositeMeasure, Density, DensityMeasure, QuadratureSpec};
use crate::numerics::{abs_f64, rel_diff, PrecisionPolicy};

use super::symbol::EntireSymbol;
use super::{Index, IndexKind, SuperoscFamily};

/// Half-width of the real window on which `k` is sampled for the band check.
const K_SAMPLE_HALF_WIDTH: f64 = 50.0;
const K_SAMPLES: usize = 10_000;
/// Largest `|z|` the default truncation radius is sized for.
pub const DEFAULT_Z_CAP: f64 = 20.0;

#[derive(Debug, Clone)]
pub struct BerrySpec {
    k: EntireSymbol,
    g: EntireSymbol,
    a: f64,
    /// Corner of the triangle used in the convergence argument; informational.
    b: f64,
    k0: f64,
    target: f64,
    z_cap: f64,
}

impl BerrySpec {
    /// Validates the pair `(k, g)` for the target parameter `a`: `k` must be
    /// real with values in `[-k0, k0]` on the real line, `k(ia)` must be real
    /// and outside the band, and `g(ia) = 1`. Piecewise builtins are rebound
    /// to switch at `|u| = a`.
    pub fn new(k: EntireSymbol, g: EntireSymbol, a: f64, b: f64, k0: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && k0 > 0.0 && k0.is_finite()) {
            return Err(Error::InvalidInput(format!("need a > 0 and k0 > 0, got a = {a}, k0 = {k0}")));
        }
        if !(b >= a) {
            return Err(Error::InvalidInput(format!("triangle corner b = {b} must be at least a = {a}")));
        }
        k.check_admissible(a)?;
        g.check_admissible(a)?;
        let k = if k.cutoff().is_some() { k.with_cutoff(a)? } else { k };
        let g = if g.cutoff().is_some() { g.with_cutoff(a)? } else { g };

        let prec = 128;
        let af = Float::with_val(prec, a);
        let kia = k.value_at_ia(&af);
        if kia.imag().to_f64().abs() > 1e-12 * abs_f64(&kia).max(1.0) {
            return Err(Error::HypothesisViolation(format!("{}(ia) is not real", k.label())));
        }
        let target = kia.real().to_f64();
        if target.abs() <= k0 {
            return Err(Error::HypothesisViolation(format!(
                "{}(ia) = {target} lies inside the band [-{k0}, {k0}]",
                k.label()
            )));
        }
        let gia = g.value_at_ia(&af);
        if rel_diff(&gia, &crate::numerics::complex(prec, 1.0, 0.0)) > 1e-12 {
            return Err(Error::HypothesisViolation(format!(
                "{}(ia) = {} instead of 1",
                g.label(),
                crate::numerics::format::complex_short(&gia)
            )));
        }
        let (max_abs, max_im) = k.sample_real(-K_SAMPLE_HALF_WIDTH, K_SAMPLE_HALF_WIDTH, K_SAMPLES, 64);
        if max_im > 1e-12 || max_abs > k0 * (1.0 + 1e-12) {
            return Err(Error::HypothesisViolation(format!(
                "{} leaves [-{k0}, {k0}] on the real line (max |k| = {max_abs})",
                k.label()
            )));
        }
        Ok(Self { k, g, a, b, k0, target, z_cap: DEFAULT_Z_CAP })
    }

    /// `g = 1`, `b = a`, `k0 = 1`.
    pub fn with_builtin(k: &str, a: f64) -> Result<Self> {
        Self::new(super::builtin_symbol(k)?, super::builtin_symbol("const1")?, a, a, 1.0)
    }

    pub fn with_z_cap(mut self, z_cap: f64) -> Result<Self> {
        if !(z_cap > 0.0 && z_cap.is_finite()) {
            return Err(Error::InvalidInput(format!("z cap {z_cap} must be positive")));
        }
        self.z_cap = z_cap;
        Ok(self)
    }

    pub fn k(&self) -> &EntireSymbol {
        &self.k
    }

    pub fn g(&self) -> &EntireSymbol {
        &self.g
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    /// `k(ia)`, the limit frequency.
    pub fn target(&self) -> f64 {
        self.target
    }

    /// Truncation radius `R` for `|u| <= R`.
    ///
    /// Beyond `R` the Gaussian factor is below `e^{(a^2 - R^2)/(2 delta^2)}`
    /// and `|e^{i k(u) z}| <= e^{k0 |z|}`, so choosing
    /// `R^2 = a^2 + 2 delta^2 (p ln 2 + k0 z_cap)` makes the neglected tail
    /// smaller than `2^{-p}` for `|z| <= z_cap`.
    pub fn truncation_radius(&self, delta: f64, prec: u32) -> f64 {
        let r2 = self.a * self.a + 2.0 * delta * delta * (prec as f64 * std::f64::consts::LN_2 + self.k0 * self.z_cap);
        r2.sqrt().max(self.a + delta)
    }
}

/// Bits needed to absorb the `e^{a^2/(2 delta^2)}` peak of the integrand.
fn growth_bits(a: f64, delta: f64) -> f64 {
    a * a / (2.0 * delta * delta) * std::f64::consts::LOG2_E
}

/// The measure `mu_delta` as the image of the Gaussian parameter density
/// under `k`.
pub fn berry_measure(spec: &BerrySpec, delta: f64, policy: &PrecisionPolicy) -> Result<BorelMeasure> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidInput(format!("delta = {delta} must be positive")));
    }
    let bits = policy.bits_for_growth(growth_bits(spec.a, delta))?;
    let r = spec.truncation_radius(delta, bits);
    let density = Density::BerryGaussian { g: spec.g.clone(), a: spec.a, delta };
    let base = BorelMeasure::Density(DensityMeasure::new((-r, r), density, QuadratureSpec::default(), r, bits)?);
    Ok(BorelMeasure::Composite(CompositeMeasure::new(base, spec.k.clone(), spec.k0)?))
}

/// `F_delta(z)`.
pub fn berry_eval(spec: &BerrySpec, delta: f64, z: &Complex) -> Result<Complex> {
    berry_measure(spec, delta, &PrecisionPolicy::default())?.eval_transform(z)
}

/// `delta -> mu_delta` with band `k0` and target `k(ia)`.
pub fn berry_family(spec: BerrySpec) -> Result<SuperoscFamily> {
    let label = format!("berry(k={}, g={}, a={})", spec.k.label(), spec.g.label(), spec.a);
    let (k0, target) = (spec.k0, spec.target);
    SuperoscFamily::new(label, k0, target, IndexKind::Real, move |idx: Index, policy: &PrecisionPolicy| {
        berry_measure(&spec, idx.as_delta().expect("real index"), policy)
    })
}
