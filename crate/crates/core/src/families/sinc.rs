//! Sinc-based constructions: the `delta`-family
//! `F_delta(z) = (2/delta) e^{-1/delta} sinc(sqrt(z^2 - 2iaz/delta - 1/delta^2))`
//! with its Bessel density on `[-1, 1]`, and interpolation by shifted sincs.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::measures::{BorelMeasure, Density, DensityMeasure, QuadratureSpec};
use crate::numerics::linalg::{self, CMatrix};
use crate::numerics::{csinc, ensure_finite, sinc_of_sqrt, PrecisionPolicy};

use super::{Evaluator, Index, IndexKind, SuperoscFamily};

fn check_params(a: f64, delta: f64) -> Result<()> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::HypothesisViolation(format!("the sinc family needs a > 1, got {a}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidInput(format!("delta = {delta} must be positive")));
    }
    Ok(())
}

/// Closed form at the precision of `z`.
pub fn sinc_delta_closed_form(a: f64, delta: f64, z: &Complex) -> Result<Complex> {
    check_params(a, delta)?;
    let p = z.prec().0;
    let d = Float::with_val(p, delta);
    let inv = Float::with_val(p, 1u32) / &d;
    let z2 = Complex::with_val(p, z.square_ref());
    let cross = Complex::with_val(p, z * Complex::with_val(p, (0, Float::with_val(p, a) * 2u32 * &inv)));
    let w = z2 - cross - Float::with_val(p, inv.square_ref());
    let pref = Float::with_val(p, &inv * 2u32) * Float::with_val(p, -&inv).exp();
    let v = sinc_of_sqrt(&w)? * pref;
    ensure_finite(v, || format!("sinc family overflows at delta = {delta}"))
}

/// Bits needed to absorb the `e^{(a-1)/delta}` peak of the density.
fn growth_bits(a: f64, delta: f64) -> f64 {
    ((a - 1.0) / delta).max(0.0) * std::f64::consts::LOG2_E
}

/// The density `(1/delta) e^{(ak-1)/delta} J0(sqrt((a^2-1)(1-k^2))/delta)` on `[-1, 1]`.
pub fn sinc_delta_measure(a: f64, delta: f64, policy: &PrecisionPolicy) -> Result<BorelMeasure> {
    check_params(a, delta)?;
    let bits = policy.bits_for_growth(growth_bits(a, delta))?;
    Ok(BorelMeasure::Density(DensityMeasure::new(
        (-1.0, 1.0),
        Density::SincDelta { a, delta },
        QuadratureSpec::default(),
        1.0,
        bits,
    )?))
}

/// `delta -> F_delta` with band 1 and target `a > 1`.
pub fn sinc_delta_family(a: f64) -> Result<SuperoscFamily> {
    check_params(a, 1.0)?;
    let fam = SuperoscFamily::new(format!("sinc_delta(a={a})"), 1.0, a, IndexKind::Real, move |idx, policy| {
        sinc_delta_measure(a, idx.as_delta().expect("real index"), policy)
    })?;
    Ok(fam.with_closed_form(move |idx: Index, z: &Complex| {
        sinc_delta_closed_form(a, idx.as_delta().expect("real index"), z)
    }))
}

/// Result of fitting `F(x) = sum_l c_l sinc(x - x_l)` through prescribed values.
#[derive(Debug, Clone)]
pub struct SincInterpolation {
    pub points: Vec<f64>,
    pub coeffs: Vec<Complex>,
    /// `max_j |F(x_j) - v_j|` after the solve.
    pub residual: f64,
    pub condition: f64,
    /// The band-1 density `(1/2) sum_l c_l e^{-ik x_l}` whose transform is `F`.
    pub measure: BorelMeasure,
}

impl SincInterpolation {
    /// Direct sum of shifted sincs.
    pub fn eval(&self, z: &Complex) -> Result<Complex> {
        sinc_sum(&self.points, &self.coeffs, z)
    }

    pub fn evaluator(&self) -> Evaluator {
        let (p, c) = (self.points.clone(), self.coeffs.clone());
        std::sync::Arc::new(move |z: &Complex| sinc_sum(&p, &c, z))
    }
}

fn sinc_sum(points: &[f64], coeffs: &[Complex], z: &Complex) -> Result<Complex> {
    let p = z.prec().0;
    let mut s = Complex::new(p);
    for (x, c) in points.iter().zip(coeffs) {
        let arg = Complex::with_val(p, z - *x);
        s += csinc(&arg)? * c;
    }
    Ok(s)
}

/// Solves the collocation system `sum_l sinc(x_j - x_l) c_l = v_j`.
pub fn sinc_interpolation(points: &[f64], values: &[Complex], prec: u32) -> Result<SincInterpolation> {
    crate::numerics::check_precision(prec)?;
    if points.len() != values.len() || points.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} points but {} values",
            points.len(),
            values.len()
        )));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("interpolation points must be finite".into()));
    }
    let n = points.len();
    let mut entries = Vec::with_capacity(n * n);
    for j in 0..n {
        for l in 0..n {
            let d = Complex::with_val(prec, (Float::with_val(prec, points[j]) - points[l], 0));
            entries.push(csinc(&d)?);
        }
    }
    let m = CMatrix { n, data: entries };
    let rhs: Vec<Complex> = values.iter().map(|v| Complex::with_val(prec, v)).collect();
    let sol = linalg::solve(&m, &rhs)?;
    let residual = linalg::residual(&m, &sol.x, &rhs).to_f64();
    let measure = BorelMeasure::Density(DensityMeasure::new(
        (-1.0, 1.0),
        Density::SincInterpolant { points: points.to_vec(), coeffs: sol.x.clone() },
        QuadratureSpec::default(),
        1.0,
        prec,
    )?);
    Ok(SincInterpolation { points: points.to_vec(), coeffs: sol.x, residual, condition: sol.condition, measure })
}
