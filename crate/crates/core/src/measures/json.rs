//! JSON documents for measures.
//!
//! Discrete atoms are `[location, re, im]` decimal-string triples written
//! with enough digits to round-trip bit-exactly at the stated precision.
//! Densities are written by builtin name and parameters; user closures are
//! rejected.

use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::symbol::SymbolSpec;
use crate::numerics::format::{decimal, parse_decimal};

use super::density::custom_not_serializable;
use super::{
    Atom, BorelMeasure, CompositeMeasure, Density, DensityMeasure, DiscreteMeasure, ExactAtoms,
    Factor, QuadratureSpec,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MeasureDoc {
    Discrete {
        precision: u32,
        band: f64,
        atoms: Vec<[String; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exact: Option<ExactDoc>,
    },
    Density {
        precision: u32,
        band: f64,
        support: [f64; 2],
        density: DensityDoc,
        quadrature: QuadratureSpec,
    },
    Composite {
        band: f64,
        map: SymbolSpec,
        base: Box<MeasureDoc>,
    },
}

/// Rationals written as `p/q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactDoc {
    pub locations: Vec<String>,
    pub weights: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum DensityDoc {
    Constant { value: f64 },
    Monomial { power: u32, scale: f64 },
    SincDelta { a: f64, delta: f64 },
    BesselKernel { b: f64 },
    BerryGaussian { g: SymbolSpec, a: f64, delta: f64 },
    SincInterpolant { points: Vec<f64>, coeffs: Vec<[String; 2]> },
    Weighted { inner: Box<DensityDoc>, factor: FactorDoc },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorDoc {
    Phase { symbol: SymbolSpec, time: [String; 2] },
    Growth { symbol: SymbolSpec, shift: [String; 2] },
    Polynomial { coeffs: Vec<[String; 2]> },
    Composed { inner: Box<FactorDoc>, map: SymbolSpec },
}

fn pair(z: &Complex) -> [String; 2] {
    [decimal(z.real()), decimal(z.imag())]
}

fn num(s: &str, prec: u32) -> Result<Float> {
    parse_decimal(s, prec).ok_or_else(|| Error::Spec(format!("'{s}' is not a finite decimal")))
}

fn unpair(p: &[String; 2], prec: u32) -> Result<Complex> {
    Ok(Complex::with_val(prec, (num(&p[0], prec)?, num(&p[1], prec)?)))
}

fn rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| Error::Spec(format!("'{s}' is not a rational")))
}

pub fn to_doc(m: &BorelMeasure) -> Result<MeasureDoc> {
    Ok(match m {
        BorelMeasure::Discrete(d) => MeasureDoc::Discrete {
            precision: d.prec,
            band: d.band,
            atoms: d
                .atoms
                .iter()
                .map(|a| {
                    let [re, im] = pair(&a.weight);
                    [decimal(&a.location), re, im]
                })
                .collect(),
            exact: d.exact.as_ref().map(|e| ExactDoc {
                locations: e.locations.iter().map(|r| r.to_string()).collect(),
                weights: e.weights.iter().map(|r| r.to_string()).collect(),
            }),
        },
        BorelMeasure::Density(d) => MeasureDoc::Density {
            precision: d.prec,
            band: d.band,
            support: [d.support.0, d.support.1],
            density: density_doc(&d.density)?,
            quadrature: d.quadrature,
        },
        BorelMeasure::Composite(c) => MeasureDoc::Composite {
            band: c.band,
            map: c.map.spec(),
            base: Box::new(to_doc(&c.base)?),
        },
    })
}

fn density_doc(d: &Density) -> Result<DensityDoc> {
    Ok(match d {
        Density::Constant(value) => DensityDoc::Constant { value: *value },
        Density::Monomial { power, scale } => DensityDoc::Monomial { power: *power, scale: *scale },
        Density::SincDelta { a, delta } => DensityDoc::SincDelta { a: *a, delta: *delta },
        Density::BesselKernel { b } => DensityDoc::BesselKernel { b: *b },
        Density::BerryGaussian { g, a, delta } => DensityDoc::BerryGaussian {
            g: g.spec(),
            a: *a,
            delta: *delta,
        },
        Density::SincInterpolant { points, coeffs } => DensityDoc::SincInterpolant {
            points: points.clone(),
            coeffs: coeffs.iter().map(pair).collect(),
        },
        Density::Custom { label, .. } => return Err(custom_not_serializable(label)),
        Density::Weighted { inner, factor } => DensityDoc::Weighted {
            inner: Box::new(density_doc(inner)?),
            factor: factor_doc(factor),
        },
    })
}

fn factor_doc(f: &Factor) -> FactorDoc {
    match f {
        Factor::Phase { symbol, time } => FactorDoc::Phase { symbol: symbol.spec(), time: pair(time) },
        Factor::Growth { symbol, shift } => FactorDoc::Growth { symbol: symbol.spec(), shift: pair(shift) },
        Factor::Polynomial { coeffs } => FactorDoc::Polynomial { coeffs: coeffs.iter().map(pair).collect() },
        Factor::Composed { inner, map } => FactorDoc::Composed {
            inner: Box::new(factor_doc(inner)),
            map: map.spec(),
        },
    }
}

pub fn from_doc(doc: &MeasureDoc) -> Result<BorelMeasure> {
    Ok(match doc {
        MeasureDoc::Discrete { precision, band, atoms, exact } => {
            let p = crate::numerics::check_precision(*precision)?;
            let list = atoms
                .iter()
                .map(|[l, re, im]| {
                    Ok(Atom {
                        location: num(l, p)?,
                        weight: Complex::with_val(p, (num(re, p)?, num(im, p)?)),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut d = DiscreteMeasure::new(list, *band)?;
            if let Some(e) = exact {
                let locations = e.locations.iter().map(|s| rational(s)).collect::<Result<Vec<_>>>()?;
                let weights = e.weights.iter().map(|s| rational(s)).collect::<Result<Vec<_>>>()?;
                if locations.len() != d.atoms.len() || weights.len() != d.atoms.len() {
                    return Err(Error::Spec("exact data does not match the atoms".into()));
                }
                d.exact = Some(ExactAtoms { locations, weights });
            }
            BorelMeasure::Discrete(d)
        }
        MeasureDoc::Density { precision, band, support, density, quadrature } => {
            let p = crate::numerics::check_precision(*precision)?;
            BorelMeasure::Density(DensityMeasure::new(
                (support[0], support[1]),
                density_from_doc(density, p)?,
                *quadrature,
                *band,
                p,
            )?)
        }
        MeasureDoc::Composite { band, map, base } => {
            BorelMeasure::Composite(CompositeMeasure::new(from_doc(base)?, map.build()?, *band)?)
        }
    })
}

fn density_from_doc(d: &DensityDoc, prec: u32) -> Result<Density> {
    Ok(match d {
        DensityDoc::Constant { value } => Density::Constant(*value),
        DensityDoc::Monomial { power, scale } => Density::Monomial { power: *power, scale: *scale },
        DensityDoc::SincDelta { a, delta } => Density::SincDelta { a: *a, delta: *delta },
        DensityDoc::BesselKernel { b } => Density::BesselKernel { b: *b },
        DensityDoc::BerryGaussian { g, a, delta } => Density::BerryGaussian {
            g: g.build()?,
            a: *a,
            delta: *delta,
        },
        DensityDoc::SincInterpolant { points, coeffs } => {
            if points.len() != coeffs.len() {
                return Err(Error::Spec("sinc interpolant points and coefficients differ in length".into()));
            }
            Density::SincInterpolant {
                points: points.clone(),
                coeffs: coeffs.iter().map(|c| unpair(c, prec)).collect::<Result<_>>()?,
            }
        }
        DensityDoc::Weighted { inner, factor } => Density::Weighted {
            inner: Box::new(density_from_doc(inner, prec)?),
            factor: factor_from_doc(factor, prec)?,
        },
    })
}

fn factor_from_doc(f: &FactorDoc, prec: u32) -> Result<Factor> {
    Ok(match f {
        FactorDoc::Phase { symbol, time } => Factor::Phase { symbol: symbol.build()?, time: unpair(time, prec)? },
        FactorDoc::Growth { symbol, shift } => Factor::Growth { symbol: symbol.build()?, shift: unpair(shift, prec)? },
        FactorDoc::Polynomial { coeffs } => Factor::Polynomial {
            coeffs: coeffs.iter().map(|c| unpair(c, prec)).collect::<Result<_>>()?,
        },
        FactorDoc::Composed { inner, map } => Factor::Composed {
            inner: Box::new(factor_from_doc(inner, prec)?),
            map: map.build()?,
        },
    })
}

pub fn to_json(m: &BorelMeasure) -> Result<String> {
    serde_json::to_string_pretty(&to_doc(m)?).map_err(|e| Error::Spec(e.to_string()))
}

pub fn from_json(s: &str) -> Result<BorelMeasure> {
    let doc: MeasureDoc = serde_json::from_str(s).map_err(|e| Error::Spec(e.to_string()))?;
    from_doc(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::symbol::EntireSymbol;
    use crate::numerics::complex;

    #[test]
    fn discrete_roundtrip_is_bit_exact() {
        for &p in &[53u32, 128, 333] {
            let third = Float::with_val(p, 1) / 3u32;
            let atoms = vec![
                Atom { location: third.clone(), weight: Complex::with_val(p, (&third, -Float::with_val(p, 7) / 11u32)) },
                Atom { location: Float::with_val(p, -1), weight: complex(p, 1e-200, 3.5) },
            ];
            let m = BorelMeasure::Discrete(DiscreteMeasure::new(atoms, 1.0).unwrap());
            let back = from_json(&to_json(&m).unwrap()).unwrap();
            assert_eq!(back.as_discrete().unwrap().atoms(), m.as_discrete().unwrap().atoms());
            assert_eq!(back.precision(), p);
        }
    }

    #[test]
    fn exact_data_roundtrips() {
        let e = ExactAtoms {
            locations: vec![Rational::from(1), Rational::from((-1, 3))],
            weights: vec![Rational::from((9, 4)), Rational::from((-5, 4))],
        };
        let m = BorelMeasure::Discrete(DiscreteMeasure::from_exact(e.clone(), 1.0, 128).unwrap());
        let back = from_json(&to_json(&m).unwrap()).unwrap();
        assert_eq!(back.as_discrete().unwrap().exact(), Some(&e));
    }

    #[test]
    fn weighted_composite_roundtrip() {
        let p = 128;
        let base = BorelMeasure::Density(
            DensityMeasure::new((-1.0, 1.0), Density::SincDelta { a: 1.5, delta: 1.0 }, QuadratureSpec::default(), 1.0, p)
                .unwrap(),
        );
        let m = base
            .pushforward(&EntireSymbol::square(), 1.0)
            .unwrap()
            .with_factor(Factor::Phase { symbol: EntireSymbol::identity(), time: complex(p, 0.5, 0.0) })
            .unwrap();
        let back = from_json(&to_json(&m).unwrap()).unwrap();
        let z = complex(p, 0.7, 0.1);
        assert_eq!(back.eval_transform(&z).unwrap(), m.eval_transform(&z).unwrap());
    }

    #[test]
    fn custom_density_is_rejected() {
        let d = Density::custom("mine", |k| Ok(crate::numerics::from_real(k)));
        let m = BorelMeasure::Density(DensityMeasure::new((-1.0, 1.0), d, QuadratureSpec::default(), 1.0, 128).unwrap());
        assert!(matches!(to_json(&m), Err(Error::Spec(_))));
    }
}
