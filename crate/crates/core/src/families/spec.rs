//! Family spec documents: `{"construction": name, "a": ..., "k0": ..., "params": {...}}`.
//!
//! | construction | params |
//! |---|---|
//! | `standard` | `n` |
//! | `lagrange` | `freqs` (numbers or `"p/q"` strings) or `n` for equispaced nodes |
//! | `sinc_delta` | `delta` |
//! | `berry` | `k` (builtin name or symbol spec), `g` (default `const1`), `b`, `z_cap`, `delta` |
//! | `moment` | `density` (density document), `support` (default `[-k0, k0]`), `n` |
//! | `plane_wave` | none |
//!
//! `n` and `delta` select the member used by single-member commands; they are
//! optional wherever an index list is supplied separately.

use rug::Rational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::measures::json::{from_doc, DensityDoc, MeasureDoc};
use crate::measures::QuadratureSpec;
use crate::numerics::PrecisionPolicy;

use super::berry::BerrySpec;
use super::lagrange::{lagrange_equispaced_family, lagrange_fixed_family};
use super::symbol::SymbolSpec;
use super::{Index, MomentFamily, SuperoscFamily};

pub const CONSTRUCTIONS: [&str; 6] = ["standard", "lagrange", "sinc_delta", "berry", "moment", "plane_wave"];

fn default_k0() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub construction: String,
    pub a: f64,
    #[serde(default = "default_k0")]
    pub k0: f64,
    #[serde(default)]
    pub params: Value,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexParams {
    n: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LagrangeParams {
    freqs: Option<Vec<FreqValue>>,
    n: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FreqValue {
    Num(f64),
    Text(String),
}

impl FreqValue {
    fn rational(&self) -> Result<Rational> {
        match self {
            FreqValue::Num(x) => Rational::from_f64(*x).ok_or_else(|| Error::Spec(format!("frequency {x} is not finite"))),
            FreqValue::Text(s) => s
                .trim()
                .parse::<Rational>()
                .map_err(|_| Error::Spec(format!("frequency '{s}' is not a rational such as 1/3"))),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeltaParams {
    delta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SymbolRef {
    Name(String),
    Spec(SymbolSpec),
}

impl SymbolRef {
    fn build(&self) -> Result<super::EntireSymbol> {
        match self {
            SymbolRef::Name(n) => super::builtin_symbol(n),
            SymbolRef::Spec(s) => s.build(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BerryParams {
    k: SymbolRef,
    g: Option<SymbolRef>,
    b: Option<f64>,
    z_cap: Option<f64>,
    delta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MomentParams {
    density: DensityDoc,
    support: Option<[f64; 2]>,
    n: Option<u32>,
}

fn params<T: for<'de> Deserialize<'de> + Default>(v: &Value) -> Result<T> {
    if v.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(v.clone()).map_err(|e| Error::Spec(format!("params: {e}")))
}

fn params_required<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Spec(format!("params: {e}")))
}

impl FamilySpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: FamilySpec = serde_json::from_str(s).map_err(|e| Error::Spec(e.to_string()))?;
        if !CONSTRUCTIONS.contains(&spec.construction.as_str()) {
            return Err(Error::Spec(format!(
                "unknown construction '{}' (known: {})",
                spec.construction,
                CONSTRUCTIONS.join(", ")
            )));
        }
        if !(spec.a.is_finite() && spec.k0.is_finite()) {
            return Err(Error::Spec("a and k0 must be finite".into()));
        }
        if !(spec.params.is_null() || spec.params.is_object()) {
            return Err(Error::Spec("params must be an object".into()));
        }
        Ok(spec)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Spec(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The member selected by `params.n` / `params.delta`, if any. Fixed
    /// frequency lists select `n = len - 1`.
    pub fn index(&self) -> Result<Option<Index>> {
        Ok(match self.construction.as_str() {
            "sinc_delta" => params::<DeltaParams>(&self.params)?.delta.map(Index::Delta),
            "berry" => params_required::<BerryParams>(&self.params)?.delta.map(Index::Delta),
            "lagrange" => {
                let p: LagrangeParams = params(&self.params)?;
                match (&p.freqs, p.n) {
                    (Some(f), _) => Some(Index::N(f.len().saturating_sub(1) as u32)),
                    (None, n) => n.map(Index::N),
                }
            }
            "moment" => params_required::<MomentParams>(&self.params)?.n.map(Index::N),
            "plane_wave" => Some(Index::N(0)),
            _ => params::<IndexParams>(&self.params)?.n.map(Index::N),
        })
    }

    /// The coefficient data of a `moment` construction at index `n`.
    pub fn moment_family(&self, n: u32, policy: &PrecisionPolicy) -> Result<MomentFamily> {
        if self.construction != "moment" {
            return Err(Error::Spec(format!("'{}' is not a moment construction", self.construction)));
        }
        let p: MomentParams = params_required(&self.params)?;
        let h = from_doc(&self.weight_doc(&p, policy.base_bits))?;
        super::moment::moment_family(&h, n, self.a, policy)
    }

    fn weight_doc(&self, p: &MomentParams, prec: u32) -> MeasureDoc {
        let [lo, hi] = p.support.unwrap_or([-self.k0, self.k0]);
        MeasureDoc::Density {
            precision: prec,
            band: self.k0,
            support: [lo, hi],
            density: p.density.clone(),
            quadrature: QuadratureSpec::default(),
        }
    }

    pub fn build(&self, policy: &PrecisionPolicy) -> Result<SuperoscFamily> {
        let fam = match self.construction.as_str() {
            "standard" => {
                params::<IndexParams>(&self.params)?;
                if self.k0 != 1.0 {
                    return Err(Error::Spec("the standard family has k0 = 1".into()));
                }
                super::standard_family(self.a)?
            }
            "lagrange" => {
                let p: LagrangeParams = params(&self.params)?;
                match (p.freqs, p.n) {
                    (Some(f), _) => {
                        let freqs = f.iter().map(FreqValue::rational).collect::<Result<Vec<_>>>()?;
                        lagrange_fixed_family(freqs, self.a, self.k0)?
                    }
                    (None, _) => {
                        if self.k0 != 1.0 {
                            return Err(Error::Spec("equispaced lagrange nodes live on [-1, 1]; use k0 = 1".into()));
                        }
                        lagrange_equispaced_family(self.a)?
                    }
                }
            }
            "sinc_delta" => {
                params::<DeltaParams>(&self.params)?;
                super::sinc_delta_family(self.a)?
            }
            "berry" => {
                let p: BerryParams = params_required(&self.params)?;
                let g = match &p.g {
                    Some(g) => g.build()?,
                    None => super::builtin_symbol("const1")?,
                };
                let mut spec = BerrySpec::new(p.k.build()?, g, self.a, p.b.unwrap_or(self.a), self.k0)?;
                if let Some(z) = p.z_cap {
                    spec = spec.with_z_cap(z)?;
                }
                super::berry_family(spec)?
            }
            "moment" => {
                let p: MomentParams = params_required(&self.params)?;
                super::moment::moment_sequence(from_doc(&self.weight_doc(&p, policy.base_bits))?, self.a)?
            }
            "plane_wave" => SuperoscFamily::plane_wave(self.a)?,
            other => return Err(Error::Spec(format!("unknown construction '{other}'"))),
        };
        Ok(fam.with_policy(*policy))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_builds() {
        let s = FamilySpec::from_json(r#"{"construction":"standard","a":2,"params":{"n":2}}"#).unwrap();
        assert_eq!(s.index().unwrap(), Some(Index::N(2)));
        let f = s.build(&PrecisionPolicy::default()).unwrap();
        assert_eq!(f.target(), 2.0);

        let s = FamilySpec::from_json(r#"{"construction":"lagrange","a":2,"params":{"freqs":[1,"0",-1]}}"#).unwrap();
        assert_eq!(s.index().unwrap(), Some(Index::N(2)));
        let m = s.build(&PrecisionPolicy::default()).unwrap().measure(Index::N(2)).unwrap();
        assert_eq!(m.exact_moment(2), Some(Rational::from(4)));

        let s = FamilySpec::from_json(r#"{"construction":"berry","a":1,"params":{"k":"k2","delta":0.5}}"#).unwrap();
        assert_eq!(s.index().unwrap(), Some(Index::Delta(0.5)));
        assert!(s.build(&PrecisionPolicy::default()).is_ok());

        let s = FamilySpec::from_json(
            r#"{"construction":"moment","a":2,"params":{"density":{"name":"constant","value":0.5},"n":1}}"#,
        )
        .unwrap();
        assert!(s.build(&PrecisionPolicy::default()).unwrap().is_taylor_matched());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(FamilySpec::from_json("{"), Err(Error::Spec(_))));
        assert!(matches!(FamilySpec::from_json(r#"{"construction":"nope","a":2}"#), Err(Error::Spec(_))));
        assert!(matches!(
            FamilySpec::from_json(r#"{"construction":"standard","a":2,"params":{"m":2}}"#)
                .unwrap()
                .build(&PrecisionPolicy::default()),
            Err(Error::Spec(_))
        ));
        let inband = FamilySpec::from_json(r#"{"construction":"standard","a":0.5}"#).unwrap();
        assert!(matches!(inband.build(&PrecisionPolicy::default()), Err(Error::HypothesisViolation(_))));
    }
}
