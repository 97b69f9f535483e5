//! Finite complex Borel measures on a frequency band and their Fourier-Laplace
//! transforms `F(z) = int e^{ikz} dmu(k)`.
//!
//! Three representations are supported. Discrete measures are finite sums of
//! atoms and are evaluated exactly at working precision. Density measures are
//! integrated with the adaptive engine in [`quadrature`]. Composite measures
//! are images of a base measure under a frequency map `phi`; they are never
//! materialized and instead integrate `f(phi(u))` against the base.

pub mod density;
pub mod json;
pub mod quadrature;

use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::error::{Error, Result};
use crate::families::symbol::EntireSymbol;
use crate::numerics::{abs, check_precision, ensure_finite, format, from_real};

pub use density::{Density, Factor};
pub use quadrature::{QuadratureRule, QuadratureSpec};

/// Samples used to check a frequency map's image on a continuous support.
pub const IMAGE_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub location: Float,
    pub weight: Complex,
}

/// Rational locations and real rational weights backing a discrete measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactAtoms {
    pub locations: Vec<Rational>,
    pub weights: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
    band: f64,
    prec: u32,
    exact: Option<ExactAtoms>,
}

#[derive(Debug, Clone)]
pub struct DensityMeasure {
    support: (f64, f64),
    density: Density,
    quadrature: QuadratureSpec,
    band: f64,
    prec: u32,
}

#[derive(Debug, Clone)]
pub struct CompositeMeasure {
    base: Box<BorelMeasure>,
    map: EntireSymbol,
    band: f64,
}

#[derive(Debug, Clone)]
pub enum BorelMeasure {
    Discrete(DiscreteMeasure),
    Density(DensityMeasure),
    Composite(CompositeMeasure),
}

fn check_band(band: f64) -> Result<()> {
    if !(band > 0.0 && band.is_finite()) {
        return Err(Error::InvalidInput(format!("band {band} must be positive and finite")));
    }
    Ok(())
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Atom>, band: f64) -> Result<Self> {
        check_band(band)?;
        if atoms.is_empty() {
            return Err(Error::InvalidInput("discrete measure needs at least one atom".into()));
        }
        let prec = atoms[0].weight.prec().0;
        check_precision(prec)?;
        for a in &atoms {
            if !a.location.is_finite() || a.location.to_f64().abs() > band {
                return Err(Error::ImageBoundViolation(format!(
                    "atom at {} outside [-{band}, {band}]",
                    format::decimal_with_digits(&a.location, 17)
                )));
            }
            if !crate::numerics::is_finite(&a.weight) {
                return Err(Error::InvalidInput("atom weight is not finite".into()));
            }
        }
        Ok(Self { atoms, band, prec, exact: None })
    }

    /// Builds the measure from exact data, rounding to `prec` bits.
    pub fn from_exact(exact: ExactAtoms, band: f64, prec: u32) -> Result<Self> {
        check_precision(prec)?;
        if exact.locations.len() != exact.weights.len() {
            return Err(Error::InvalidInput("locations and weights differ in length".into()));
        }
        let atoms = exact
            .locations
            .iter()
            .zip(&exact.weights)
            .map(|(l, w)| Atom {
                location: Float::with_val(prec, l),
                weight: Complex::with_val(prec, (Float::with_val(prec, w), 0)),
            })
            .collect();
        let mut m = Self::new(atoms, band)?;
        m.exact = Some(exact);
        Ok(m)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn exact(&self) -> Option<&ExactAtoms> {
        self.exact.as_ref()
    }

    pub fn band(&self) -> f64 {
        self.band
    }

    /// `sum_j w_j k_j^l` in rational arithmetic when exact data is present.
    pub fn exact_moment(&self, l: u32) -> Option<Rational> {
        let e = self.exact.as_ref()?;
        let mut s = Rational::new();
        for (k, w) in e.locations.iter().zip(&e.weights) {
            s += Rational::from(k.pow(l)) * w;
        }
        Some(s)
    }

    pub fn total_variation(&self) -> Float {
        let mut s = Float::new(self.prec);
        for a in &self.atoms {
            s += abs(&a.weight);
        }
        s
    }
}

impl DensityMeasure {
    pub fn new(
        support: (f64, f64),
        density: Density,
        quadrature: QuadratureSpec,
        band: f64,
        prec: u32,
    ) -> Result<Self> {
        check_band(band)?;
        check_precision(prec)?;
        quadrature.validate()?;
        let (lo, hi) = support;
        if !(lo < hi) || lo < -band || hi > band {
            return Err(Error::ImageBoundViolation(format!(
                "support [{lo}, {hi}] not inside [-{band}, {band}]"
            )));
        }
        Ok(Self { support, density, quadrature, band, prec })
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quadrature
    }

    /// Exact moments of constant and monomial densities with rational data.
    pub fn exact_moment(&self, l: u32) -> Option<Rational> {
        let (scale, power) = match self.density {
            Density::Constant(c) => (c, 0),
            Density::Monomial { power, scale } => (scale, power),
            _ => return None,
        };
        let lo = Rational::from_f64(self.support.0)?;
        let hi = Rational::from_f64(self.support.1)?;
        let e = l + power + 1;
        let diff = Rational::from((&hi).pow(e)) - Rational::from((&lo).pow(e));
        Some(diff * Rational::from_f64(scale)? / e)
    }

    fn integrate(&self, f: &dyn Fn(&Complex) -> Result<Complex>, extra: &[f64]) -> Result<Complex> {
        let mut bps = self.density.breakpoints();
        bps.extend_from_slice(extra);
        quadrature::integrate(&self.quadrature, self.prec, self.support.0, self.support.1, &bps, |k| {
            let h = self.density.eval(k)?;
            Ok(h * f(&from_real(k))?)
        })
    }
}

impl CompositeMeasure {
    /// Image of `base` under `map`, declared to lie in `[-band, band]`.
    ///
    /// The declared bound of `map` must not exceed `band`, and `map` sampled
    /// at [`IMAGE_SAMPLES`] points of the base support must stay real and
    /// inside the band.
    pub fn new(base: BorelMeasure, map: EntireSymbol, band: f64) -> Result<Self> {
        check_band(band)?;
        if let Some(b) = map.band_image_bound() {
            if b > band {
                return Err(Error::ImageBoundViolation(format!(
                    "declared image bound {b} of {} exceeds {band}",
                    map.label()
                )));
            }
        }
        let chain = match base.parameter_map() {
            Some(inner) => map.compose(&inner),
            None => map.clone(),
        };
        let (lo, hi) = base.parameter_support();
        check_sampled_image(&chain, lo, hi, band, base.precision())?;
        Ok(Self { base: Box::new(base), map, band })
    }

    pub fn base(&self) -> &BorelMeasure {
        &self.base
    }

    pub fn map(&self) -> &EntireSymbol {
        &self.map
    }
}

fn check_sampled_image(map: &EntireSymbol, lo: f64, hi: f64, band: f64, prec: u32) -> Result<()> {
    let p = prec.min(128);
    let n = IMAGE_SAMPLES;
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let v = map.eval_real(&Float::with_val(p, x));
        let (re, im) = (v.real().to_f64(), v.imag().to_f64());
        let tol = 1e-12 * band;
        if im.abs() > tol || re.abs() > band + tol || !re.is_finite() {
            return Err(Error::ImageBoundViolation(format!(
                "{} maps u = {x} to {re}{im:+}i, outside [-{band}, {band}]",
                map.label()
            )));
        }
    }
    Ok(())
}

impl BorelMeasure {
    pub fn band(&self) -> f64 {
        match self {
            BorelMeasure::Discrete(d) => d.band,
            BorelMeasure::Density(d) => d.band,
            BorelMeasure::Composite(c) => c.band,
        }
    }

    pub fn precision(&self) -> u32 {
        match self {
            BorelMeasure::Discrete(d) => d.prec,
            BorelMeasure::Density(d) => d.prec,
            BorelMeasure::Composite(c) => c.base.precision(),
        }
    }

    pub fn as_discrete(&self) -> Option<&DiscreteMeasure> {
        match self {
            BorelMeasure::Discrete(d) => Some(d),
            _ => None,
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            BorelMeasure::Discrete(_) => "discrete",
            BorelMeasure::Density(_) => "density",
            BorelMeasure::Composite(_) => "composite",
        }
    }

    /// Interval of the innermost parameter the measure integrates over.
    fn parameter_support(&self) -> (f64, f64) {
        match self {
            BorelMeasure::Discrete(d) => (-d.band, d.band),
            BorelMeasure::Density(d) => d.support,
            BorelMeasure::Composite(c) => c.base.parameter_support(),
        }
    }

    /// Composite frequency map from the innermost parameter, if any.
    fn parameter_map(&self) -> Option<EntireSymbol> {
        match self {
            BorelMeasure::Composite(c) => Some(match c.base.parameter_map() {
                Some(inner) => c.map.compose(&inner),
                None => c.map.clone(),
            }),
            _ => None,
        }
    }

    /// `int f(k) dmu(k)`.
    pub fn integrate(&self, f: &dyn Fn(&Complex) -> Result<Complex>) -> Result<Complex> {
        self.integrate_split(f, &[])
    }

    /// As [`Self::integrate`], with extra panel breakpoints in the innermost
    /// parameter.
    fn integrate_split(&self, f: &dyn Fn(&Complex) -> Result<Complex>, extra: &[f64]) -> Result<Complex> {
        match self {
            BorelMeasure::Discrete(d) => {
                let mut s = Complex::new(d.prec);
                for a in &d.atoms {
                    let v = f(&from_real(&a.location))?;
                    s += Complex::with_val(d.prec, v * &a.weight);
                }
                Ok(s)
            }
            BorelMeasure::Density(d) => d.integrate(f, extra),
            BorelMeasure::Composite(c) => {
                let mut bps = c.map.breakpoints();
                bps.extend_from_slice(extra);
                c.base.integrate_split(&|u: &Complex| f(&c.map.eval(u)), &bps)
            }
        }
    }

    /// `F(z) = int e^{ikz} dmu(k)` at the measure's precision.
    pub fn eval_transform(&self, z: &Complex) -> Result<Complex> {
        let p = self.precision();
        let iz = Complex::with_val(p, z * Complex::with_val(p, (0, 1)));
        let v = self.integrate(&|k: &Complex| {
            let e = Complex::with_val(p, k * &iz).exp();
            ensure_finite(e, || {
                format!("e^(ikz) overflows at z = {}", format::complex_short(z))
            })
        })?;
        ensure_finite(v, || format!("transform overflows at z = {}", format::complex_short(z)))
    }

    /// `int k^l dmu(k)`.
    pub fn moment(&self, l: u32) -> Result<Complex> {
        let p = self.precision();
        self.integrate(&|k: &Complex| Ok(Complex::with_val(p, k.pow(l))))
    }

    /// Exact rational moment, when the representation carries exact data.
    pub fn exact_moment(&self, l: u32) -> Option<Rational> {
        match self {
            BorelMeasure::Discrete(d) => d.exact_moment(l),
            BorelMeasure::Density(d) => d.exact_moment(l),
            BorelMeasure::Composite(_) => None,
        }
    }

    /// Total variation; for composites that of the base, which is an upper
    /// estimate when the map is not injective.
    pub fn total_variation(&self) -> Result<Float> {
        match self {
            BorelMeasure::Discrete(d) => Ok(d.total_variation()),
            BorelMeasure::Density(d) => {
                let p = d.prec;
                let spec = d.quadrature;
                let bps = d.density.breakpoints();
                let v = quadrature::integrate(&spec, p, d.support.0, d.support.1, &bps, |k| {
                    Ok(from_real(&abs(&d.density.eval(k)?)))
                })?;
                Ok(Float::with_val(p, v.real()))
            }
            BorelMeasure::Composite(c) => c.base.total_variation(),
        }
    }

    /// Image measure under `phi` with band `h0`.
    ///
    /// Atoms that land within `2^{-p/2} h0` of each other are merged and
    /// their weights added. Exact data survives when `phi` is a real
    /// polynomial, with merging by exact equality.
    pub fn pushforward(&self, phi: &EntireSymbol, h0: f64) -> Result<BorelMeasure> {
        check_band(h0)?;
        match self {
            BorelMeasure::Discrete(d) => pushforward_discrete(d, phi, h0).map(BorelMeasure::Discrete),
            _ => Ok(BorelMeasure::Composite(CompositeMeasure::new(self.clone(), phi.clone(), h0)?)),
        }
    }

    /// Multiplies the measure by the weight `factor(k)`.
    pub fn with_factor(&self, factor: Factor) -> Result<BorelMeasure> {
        match self {
            BorelMeasure::Discrete(d) => {
                let mut atoms = Vec::with_capacity(d.atoms.len());
                for a in &d.atoms {
                    let w = factor.eval(&from_real(&a.location))?;
                    atoms.push(Atom {
                        location: a.location.clone(),
                        weight: Complex::with_val(d.prec, &a.weight * w),
                    });
                }
                Ok(BorelMeasure::Discrete(DiscreteMeasure {
                    atoms,
                    band: d.band,
                    prec: d.prec,
                    exact: None,
                }))
            }
            BorelMeasure::Density(d) => {
                let mut out = d.clone();
                out.density = Density::Weighted {
                    inner: Box::new(d.density.clone()),
                    factor,
                };
                Ok(BorelMeasure::Density(out))
            }
            BorelMeasure::Composite(c) => {
                let inner = Factor::Composed {
                    inner: Box::new(factor),
                    map: c.map.clone(),
                };
                Ok(BorelMeasure::Composite(CompositeMeasure {
                    base: Box::new(c.base.with_factor(inner)?),
                    map: c.map.clone(),
                    band: c.band,
                }))
            }
        }
    }

    /// Re-targets the working precision. Discrete atoms are re-rounded from
    /// exact data when available.
    pub fn with_precision(&self, prec: u32) -> Result<BorelMeasure> {
        check_precision(prec)?;
        Ok(match self {
            BorelMeasure::Discrete(d) => match &d.exact {
                Some(e) => BorelMeasure::Discrete(DiscreteMeasure::from_exact(e.clone(), d.band, prec)?),
                None => BorelMeasure::Discrete(DiscreteMeasure {
                    atoms: d
                        .atoms
                        .iter()
                        .map(|a| Atom {
                            location: Float::with_val(prec, &a.location),
                            weight: Complex::with_val(prec, &a.weight),
                        })
                        .collect(),
                    band: d.band,
                    prec,
                    exact: None,
                }),
            },
            BorelMeasure::Density(d) => {
                let mut out = d.clone();
                out.prec = prec;
                BorelMeasure::Density(out)
            }
            BorelMeasure::Composite(c) => BorelMeasure::Composite(CompositeMeasure {
                base: Box::new(c.base.with_precision(prec)?),
                map: c.map.clone(),
                band: c.band,
            }),
        })
    }

    /// Replaces the quadrature settings of every density in the measure.
    pub fn with_quadrature(&self, spec: QuadratureSpec) -> Result<BorelMeasure> {
        spec.validate()?;
        Ok(match self {
            BorelMeasure::Discrete(_) => self.clone(),
            BorelMeasure::Density(d) => {
                let mut out = d.clone();
                out.quadrature = spec;
                BorelMeasure::Density(out)
            }
            BorelMeasure::Composite(c) => BorelMeasure::Composite(CompositeMeasure {
                base: Box::new(c.base.with_quadrature(spec)?),
                map: c.map.clone(),
                band: c.band,
            }),
        })
    }
}

fn pushforward_discrete(d: &DiscreteMeasure, phi: &EntireSymbol, h0: f64) -> Result<DiscreteMeasure> {
    let p = d.prec;
    let mut moved = Vec::with_capacity(d.atoms.len());
    for a in &d.atoms {
        let v = phi.eval_real(&a.location);
        let tol = Float::with_val(p, Float::i_exp(1, -(p as i32) / 2)) * h0;
        if Float::with_val(p, v.imag().abs_ref()) > tol {
            return Err(Error::ImageBoundViolation(format!(
                "{} maps atom {} off the real axis",
                phi.label(),
                format::decimal_with_digits(&a.location, 17)
            )));
        }
        let loc = Float::with_val(p, v.real());
        if loc.to_f64().abs() > h0 {
            return Err(Error::ImageBoundViolation(format!(
                "{} maps atom {} to {}, outside [-{h0}, {h0}]",
                phi.label(),
                format::decimal_with_digits(&a.location, 17),
                format::decimal_with_digits(&loc, 17)
            )));
        }
        moved.push(loc);
    }

    if let Some(e) = &d.exact {
        let mapped: Option<Vec<Rational>> = e.locations.iter().map(|k| phi.eval_rational(k)).collect();
        if let Some(locs) = mapped {
            let mut out_l: Vec<Rational> = Vec::new();
            let mut out_w: Vec<Rational> = Vec::new();
            for (l, w) in locs.into_iter().zip(&e.weights) {
                match out_l.iter().position(|x| *x == l) {
                    Some(i) => out_w[i] += w,
                    None => {
                        out_l.push(l);
                        out_w.push(w.clone());
                    }
                }
            }
            let exact = ExactAtoms { locations: out_l, weights: out_w };
            return DiscreteMeasure::from_exact(exact, h0, p);
        }
    }

    let tol = Float::with_val(p, Float::i_exp(1, -(p as i32) / 2)) * h0;
    let mut atoms: Vec<Atom> = Vec::new();
    for (loc, a) in moved.into_iter().zip(&d.atoms) {
        let hit = atoms
            .iter()
            .position(|b| Float::with_val(p, &b.location - &loc).abs() <= tol);
        match hit {
            Some(i) => atoms[i].weight += &a.weight,
            None => atoms.push(Atom { location: loc, weight: a.weight.clone() }),
        }
    }
    DiscreteMeasure::new(atoms, h0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::complex;

    const P: u32 = 128;

    fn atoms(list: &[(f64, f64, f64)]) -> Vec<Atom> {
        list.iter()
            .map(|&(k, re, im)| Atom {
                location: Float::with_val(P, k),
                weight: complex(P, re, im),
            })
            .collect()
    }

    fn half_density() -> BorelMeasure {
        BorelMeasure::Density(
            DensityMeasure::new((-1.0, 1.0), Density::Constant(0.5), QuadratureSpec::default(), 1.0, P)
                .unwrap(),
        )
    }

    #[test]
    fn single_atom_mass() {
        let m = BorelMeasure::Discrete(DiscreteMeasure::new(atoms(&[(0.5, 1.0, 0.0)]), 1.0).unwrap());
        assert_eq!(m.eval_transform(&complex(P, 0.0, 0.0)).unwrap(), complex(P, 1.0, 0.0));
    }

    #[test]
    fn density_moments_and_tv() {
        let m = half_density();
        let m2 = m.moment(2).unwrap();
        assert!((m2.real().to_f64() - 1.0 / 3.0).abs() < 1e-15);
        assert!(m.moment(3).unwrap().real().to_f64().abs() < 1e-30);
        assert!((m.total_variation().unwrap().to_f64() - 1.0).abs() < 1e-15);
        assert_eq!(m.exact_moment(2), Some(Rational::from((1, 3))));
        assert_eq!(m.exact_moment(3), Some(Rational::new()));
    }

    #[test]
    fn discrete_moments_and_tv() {
        let m = BorelMeasure::Discrete(
            DiscreteMeasure::new(atoms(&[(1.0, 3.0, 0.0), (0.0, -3.0, 0.0), (-1.0, 1.0, 0.0)]), 1.0).unwrap(),
        );
        assert_eq!(m.moment(1).unwrap(), complex(P, 2.0, 0.0));
        let one = BorelMeasure::Discrete(DiscreteMeasure::new(atoms(&[(0.5, 3.0, -4.0)]), 1.0).unwrap());
        assert_eq!(one.total_variation().unwrap(), 5);
    }

    #[test]
    fn atoms_outside_band_rejected() {
        assert!(matches!(
            DiscreteMeasure::new(atoms(&[(1.5, 1.0, 0.0)]), 1.0),
            Err(Error::ImageBoundViolation(_))
        ));
        assert!(DensityMeasure::new((-2.0, 1.0), Density::Constant(1.0), QuadratureSpec::default(), 1.0, P).is_err());
    }

    #[test]
    fn pushforward_merges_collisions() {
        let m = BorelMeasure::Discrete(DiscreteMeasure::new(atoms(&[(1.0, 1.0, 0.0), (-1.0, 1.0, 0.0)]), 1.0).unwrap());
        let pushed = m.pushforward(&EntireSymbol::square(), 1.0).unwrap();
        let d = pushed.as_discrete().unwrap();
        assert_eq!(d.atoms(), &atoms(&[(1.0, 2.0, 0.0)])[..]);
    }

    #[test]
    fn pushforward_identity_keeps_atoms() {
        let m = DiscreteMeasure::new(atoms(&[(0.75, 1.0, 2.0), (-0.25, -3.0, 0.5), (0.0, 1.0, 0.0)]), 1.0).unwrap();
        let pushed = BorelMeasure::Discrete(m.clone()).pushforward(&EntireSymbol::identity(), 1.0).unwrap();
        assert_eq!(pushed.as_discrete().unwrap().atoms(), m.atoms());
    }

    #[test]
    fn pushforward_out_of_bound() {
        let m = BorelMeasure::Discrete(DiscreteMeasure::new(atoms(&[(1.0, 1.0, 0.0)]), 1.0).unwrap());
        let phi = EntireSymbol::real_polynomial(&[0.0, 2.0]);
        assert!(matches!(m.pushforward(&phi, 1.0), Err(Error::ImageBoundViolation(_))));
        assert!(matches!(half_density().pushforward(&phi, 1.0), Err(Error::ImageBoundViolation(_))));
    }

    #[test]
    fn composite_transform_matches_substitution() {
        // push 1/2 dk on [-1,1] through k -> k^2: int e^{i k^2 z}/2 dk
        let c = half_density().pushforward(&EntireSymbol::square(), 1.0).unwrap();
        let z = complex(P, 1.3, 0.2);
        let direct = half_density()
            .integrate(&|k: &Complex| {
                let k2 = Complex::with_val(P, k.square_ref());
                Ok(Complex::with_val(P, k2 * &z * Complex::with_val(P, (0, 1))).exp())
            })
            .unwrap();
        assert!(crate::numerics::rel_diff(&c.eval_transform(&z).unwrap(), &direct) < 1e-30);
    }

    #[test]
    fn weights_fold_through_composites() {
        let c = half_density().pushforward(&EntireSymbol::square(), 1.0).unwrap();
        let f = Factor::Phase { symbol: EntireSymbol::identity(), time: complex(P, 1.0, 0.0) };
        let shifted = c.with_factor(f).unwrap();
        let z = complex(P, 0.4, -0.3);
        let z1 = complex(P, 1.4, -0.3);
        let r = crate::numerics::rel_diff(&shifted.eval_transform(&z).unwrap(), &c.eval_transform(&z1).unwrap());
        assert!(r < 1e-11, "{r}");
    }
}
