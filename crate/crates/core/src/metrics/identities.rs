//! Numeric suites for the auxiliary inequalities and integral identities
//! behind the sinc constructions.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::float::Constant;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{sinc_delta_closed_form, sinc_delta_measure};
use crate::measures::{BorelMeasure, Density, DensityMeasure, QuadratureSpec};
use crate::numerics::{abs, complex, csqrt_upper, format, rel_diff, sinc_of_sqrt, PrecisionPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityName {
    /// `|e^{z1} - e^{z2}| <= |z1 - z2| e^{max(|z1|, |z2|)}`.
    LemmaA1,
    /// `sinc(sqrt(z^2 + b^2)) = (1/2) int_{-1}^{1} e^{ikz} J0(b sqrt(1 - k^2)) dk`.
    LemmaA2,
    /// `|sqrt(z^2 - 2iaz - 1) + az - i| <= C min(|z|, |z|^2)`.
    Lemma31,
    /// The sinc family equals the transform of its Bessel density.
    Cor33,
}

pub const IDENTITY_NAMES: [&str; 4] = ["lemmaA1", "lemmaA2", "lemma31", "cor33"];

impl FromStr for IdentityName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemmaA1" => Ok(Self::LemmaA1),
            "lemmaA2" => Ok(Self::LemmaA2),
            "lemma31" => Ok(Self::Lemma31),
            "cor33" => Ok(Self::Cor33),
            _ => Err(Error::InvalidInput(format!(
                "unknown check '{s}' (known: {})",
                IDENTITY_NAMES.join(", ")
            ))),
        }
    }
}

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(IDENTITY_NAMES[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityConfig {
    /// Random pairs for the exponential inequality.
    pub samples: usize,
    /// Out-of-fit samples for the square-root bound.
    pub validation_samples: usize,
    pub seed: u64,
    pub prec: u32,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self { samples: 10_000, validation_samples: 1000, seed: 0x5eed, prec: 128 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCase {
    pub case: String,
    /// Largest error (or bound ratio, for inequalities) seen.
    pub max_error: f64,
    pub tolerance: f64,
    pub violations: usize,
    pub samples: usize,
    /// The point where the largest error occurred.
    pub witness: String,
    pub passed: bool,
}

impl IdentityCase {
    fn new(case: String, max_error: f64, tolerance: f64, violations: usize, samples: usize, witness: String) -> Self {
        let passed = violations == 0 && max_error <= tolerance;
        Self { case, max_error, tolerance, violations, samples, witness, passed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub check: String,
    pub cases: Vec<IdentityCase>,
    pub passed: bool,
}

impl IdentityReport {
    fn new(name: IdentityName, cases: Vec<IdentityCase>) -> Self {
        let passed = cases.iter().all(|c| c.passed);
        Self { check: name.to_string(), cases, passed }
    }
}

pub fn run_identity(name: IdentityName, cfg: &IdentityConfig) -> Result<IdentityReport> {
    crate::numerics::check_precision(cfg.prec)?;
    match name {
        IdentityName::LemmaA1 => lemma_a1(cfg),
        IdentityName::LemmaA2 => lemma_a2(cfg),
        IdentityName::Lemma31 => lemma31(cfg),
        IdentityName::Cor33 => cor33(cfg),
    }
}

/// Uniform point in the annulus `r_in < |z| <= r_out`.
fn random_in_annulus(rng: &mut ChaCha8Rng, r_in: f64, r_out: f64, prec: u32) -> Complex {
    let u: f64 = rng.gen();
    let r = (r_in * r_in + (r_out * r_out - r_in * r_in) * (1.0 - u)).sqrt();
    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
    complex(prec, r * theta.cos(), r * theta.sin())
}

/// Ratio `|e^{z1} - e^{z2}| / (|z1 - z2| e^{max|z|})` on random pairs in
/// `|z| <= 10`; a violation is a ratio above `1 + 4 eps` (f64 epsilon).
pub fn lemma_a1(cfg: &IdentityConfig) -> Result<IdentityReport> {
    let p = cfg.prec;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let slack = 1.0 + 4.0 * f64::EPSILON;
    let (mut worst, mut witness, mut violations) = (0.0f64, String::new(), 0);
    for _ in 0..cfg.samples {
        let z1 = random_in_annulus(&mut rng, 0.0, 10.0, p);
        let z2 = random_in_annulus(&mut rng, 0.0, 10.0, p);
        let lhs = abs(&Complex::with_val(p, z1.clone().exp() - z2.clone().exp()));
        let m = abs(&z1).max(&abs(&z2));
        let rhs = abs(&Complex::with_val(p, &z1 - &z2)) * m.exp();
        if rhs.is_zero() {
            continue;
        }
        let ratio = (lhs / rhs).to_f64();
        if ratio > slack {
            violations += 1;
        }
        if ratio > worst {
            worst = ratio;
            witness = format!("z1 = {}, z2 = {}", format::complex_short(&z1), format::complex_short(&z2));
        }
    }
    let case = IdentityCase::new(format!("{} random pairs, |z| <= 10", cfg.samples), worst, slack, violations, cfg.samples, witness);
    Ok(IdentityReport::new(IdentityName::LemmaA1, vec![case]))
}

/// Relative error between `sinc(sqrt(z^2 + b^2))` and the transform of the
/// kernel density, for `b in {0.5, 1, 2}` and `z in {0, 1, 2i, 3+i}`.
pub fn lemma_a2(cfg: &IdentityConfig) -> Result<IdentityReport> {
    let p = cfg.prec;
    let zs = [(0.0, 0.0), (1.0, 0.0), (0.0, 2.0), (3.0, 1.0)];
    let mut cases = Vec::new();
    for b in [0.5, 1.0, 2.0] {
        let m = BorelMeasure::Density(DensityMeasure::new(
            (-1.0, 1.0),
            Density::BesselKernel { b },
            QuadratureSpec::default(),
            1.0,
            p,
        )?);
        let (mut worst, mut witness, mut violations) = (0.0f64, String::new(), 0);
        for &(re, im) in &zs {
            let z = complex(p, re, im);
            let w = Complex::with_val(p, z.square_ref()) + Float::with_val(p, b * b);
            let lhs = sinc_of_sqrt(&w)?;
            let err = rel_diff(&m.eval_transform(&z)?, &lhs);
            if err > 1e-8 {
                violations += 1;
            }
            if err >= worst {
                worst = err;
                witness = format!("z = {}", format::complex_short(&z));
            }
        }
        cases.push(IdentityCase::new(format!("b = {b}"), worst, 1e-8, violations, zs.len(), witness));
    }
    Ok(IdentityReport::new(IdentityName::LemmaA2, cases))
}

/// `|sqrt(z^2 - 2iaz - 1) + az - i| / min(|z|, |z|^2)`.
fn root_quotient(a: f64, z: &Complex) -> Float {
    let p = z.prec().0;
    let az = Complex::with_val(p, z * Float::with_val(p, a));
    let w = Complex::with_val(p, z.square_ref()) - Complex::with_val(p, &az * complex(p, 0.0, 2.0)) - 1u32;
    let g = csqrt_upper(&w) + az - complex(p, 0.0, 1.0);
    let r = abs(z);
    let m = if r < 1 { Float::with_val(p, r.square_ref()) } else { r };
    abs(&g) / m
}

/// Radii and angles of the fitting grid in `0 < |z| <= 1`.
const FIT_RADII: usize = 64;
const FIT_ANGLES: usize = 256;

/// The bounding constant is not explicit, so it is fitted on a dense grid in
/// `|z| <= 1` and then validated on random points with `1 < |z| <= 50`.
pub fn lemma31(cfg: &IdentityConfig) -> Result<IdentityReport> {
    let p = cfg.prec;
    let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
    let mut cases = Vec::new();
    for a in [1.5, 2.0, 4.0] {
        let mut c_fit = Float::new(p);
        for i in 1..=FIT_RADII {
            let r = i as f64 / FIT_RADII as f64;
            for j in 0..FIT_ANGLES {
                let theta = Float::with_val(p, &two_pi * j as u32) / FIT_ANGLES as u32;
                let (s, c) = theta.sin_cos(Float::new(p));
                let q = root_quotient(a, &Complex::with_val(p, (c * r, s * r)));
                if q > c_fit {
                    c_fit = q;
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ a.to_bits());
        let (mut worst, mut witness, mut violations) = (0.0f64, String::new(), 0);
        for _ in 0..cfg.validation_samples {
            let z = random_in_annulus(&mut rng, 1.0, 50.0, p);
            let ratio = (root_quotient(a, &z) / &c_fit).to_f64();
            if ratio > 1.0 {
                violations += 1;
            }
            if ratio > worst {
                worst = ratio;
                witness = format!("z = {}", format::complex_short(&z));
            }
        }
        cases.push(IdentityCase::new(
            format!("a = {a}, fitted C = {:.6}", c_fit.to_f64()),
            worst,
            1.0,
            violations,
            cfg.validation_samples,
            witness,
        ));
    }
    Ok(IdentityReport::new(IdentityName::Lemma31, cases))
}

/// Closed form against density quadrature at `z in {0, 1, i, 2+i}` for
/// `delta in {1, 0.5}`, `a = 1.5`, plus the value at the origin.
pub fn cor33(cfg: &IdentityConfig) -> Result<IdentityReport> {
    let p = cfg.prec;
    let a = 1.5;
    let zs = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (2.0, 1.0)];
    let policy = PrecisionPolicy::new(p, PrecisionPolicy::from_env(p)?.max_bits)?;
    let mut cases = Vec::new();
    for delta in [1.0, 0.5] {
        let m = sinc_delta_measure(a, delta, &policy)?;
        let q = m.precision();
        let (mut worst, mut witness, mut violations) = (0.0f64, String::new(), 0);
        for &(re, im) in &zs {
            let z = complex(q, re, im);
            let err = rel_diff(&m.eval_transform(&z)?, &sinc_delta_closed_form(a, delta, &z)?);
            if err > 1e-8 {
                violations += 1;
            }
            if err >= worst {
                worst = err;
                witness = format!("z = {}", format::complex_short(&z));
            }
        }
        cases.push(IdentityCase::new(format!("delta = {delta}, a = {a}"), worst, 1e-8, violations, zs.len(), witness));

        let f0 = sinc_delta_closed_form(a, delta, &complex(q, 0.0, 0.0))?;
        let expect = 1u32 - Float::with_val(q, -2.0 / delta).exp();
        let err = rel_diff(&f0, &Complex::with_val(q, (expect, 0)));
        let v = usize::from(err > 1e-12);
        cases.push(IdentityCase::new(format!("F(0) = 1 - e^(-2/delta), delta = {delta}"), err, 1e-12, v, 1, "z = 0".into()));
    }
    Ok(IdentityReport::new(IdentityName::Cor33, cases))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in IDENTITY_NAMES {
            assert_eq!(n.parse::<IdentityName>().unwrap().to_string(), n);
        }
        assert!("lemma99".parse::<IdentityName>().is_err());
    }

    #[test]
    fn quotient_vanishes_to_second_order() {
        // g(z) ~ (a^2 - 1) z^2 / (2i) near the origin
        let q = root_quotient(2.0, &complex(128, 1e-6, 0.0)).to_f64();
        assert!((q - 1.5).abs() < 1e-5, "{q}");
    }

    #[test]
    fn small_suites_pass() {
        let cfg = IdentityConfig { samples: 500, validation_samples: 100, ..IdentityConfig::default() };
        for name in [IdentityName::LemmaA1, IdentityName::LemmaA2, IdentityName::Lemma31, IdentityName::Cor33] {
            let r = run_identity(name, &cfg).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }
}
