//! Superoscillations built from a weight `h` on the band: `F(z) = sum_j C_j
//! int (ik)^j e^{ikz} h(k) dk`, with the `C_j` fixed by a Hankel moment system.
//!
//! Writing `d_j = i^j C_j`, the matching conditions `F^{(l)}(0) = (ia)^l`
//! become `sum_j m_{j+l} d_j = a^l` with `m_s = int k^s h(k) dk`, and the
//! transform is that of the density `h(k) sum_j d_j k^j`.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::error::{Error, Result};
use crate::measures::{quadrature, BorelMeasure, Density, Factor, QuadratureSpec};
use crate::numerics::linalg::{self, CMatrix};
use crate::numerics::{complex, PrecisionPolicy};

use super::{Evaluator, IndexKind, SuperoscFamily};

/// Points at which a weight is sampled for the sign check.
const POSITIVITY_SAMPLES: usize = 1000;

#[derive(Debug, Clone)]
pub struct MomentFamily {
    pub n: u32,
    pub a: f64,
    /// `C_j`.
    pub coeffs: Vec<Complex>,
    /// `(Re C_j, Im C_j)` when the system was solved exactly.
    pub exact: Option<Vec<(Rational, Rational)>>,
    /// `d_j = i^j C_j`, the solution of the Hankel system.
    pub solved: Vec<Complex>,
    /// 1-norm condition number of the Hankel matrix (`None` when exact).
    pub condition: Option<f64>,
    /// `h(k) sum_j d_j k^j dk`, whose transform is `F`.
    pub measure: BorelMeasure,
}

impl MomentFamily {
    pub fn eval(&self, z: &Complex) -> Result<Complex> {
        self.measure.eval_transform(z)
    }

    pub fn evaluator(&self) -> Evaluator {
        let m = self.measure.clone();
        std::sync::Arc::new(move |z: &Complex| m.eval_transform(z))
    }
}

fn check_nonnegative(h: &BorelMeasure) -> Result<()> {
    let BorelMeasure::Density(d) = h else {
        return Err(Error::InvalidInput("the moment construction needs a density weight".into()));
    };
    let (lo, hi) = d.support();
    let n = POSITIVITY_SAMPLES;
    for i in 0..n {
        let k = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
        let v = d.density().eval(&Float::with_val(64, k))?;
        let (re, im) = (v.real().to_f64(), v.imag().to_f64());
        if re < 0.0 || im.abs() > 1e-12 * re.abs().max(1e-300) {
            return Err(Error::HypothesisViolation(format!(
                "weight {} is not nonnegative at k = {k} (value {re}{im:+}i)",
                d.density().label()
            )));
        }
    }
    Ok(())
}

/// `(-i)^j` applied to a real rational, as `(re, im)`.
fn rotate_exact(d: &Rational, j: usize) -> (Rational, Rational) {
    match j % 4 {
        0 => (d.clone(), Rational::new()),
        1 => (Rational::new(), Rational::from(-d)),
        2 => (Rational::from(-d), Rational::new()),
        _ => (Rational::new(), d.clone()),
    }
}

/// Builds `C_0..C_n` for the weight `h` and target `a`.
///
/// Constant and monomial weights with rational data are solved in exact
/// arithmetic. Otherwise moments come from quadrature and the Hankel system
/// is solved at a precision sized for its condition number, which grows
/// like `(3 + sqrt 8)^n` for weights comparable to the Lebesgue measure.
pub fn moment_family(h: &BorelMeasure, n: u32, a: f64, policy: &PrecisionPolicy) -> Result<MomentFamily> {
    check_nonnegative(h)?;
    let size = n as usize + 1;
    let exact_moments: Option<Vec<Rational>> = (0..=2 * n).map(|s| h.exact_moment(s)).collect();
    let ar = Rational::from_f64(a);

    if let (Some(m), Some(ar)) = (exact_moments, ar) {
        let mat: Vec<Vec<Rational>> = (0..size)
            .map(|l| (0..size).map(|j| m[l + j].clone()).collect())
            .collect();
        let rhs: Vec<Rational> = (0..size).map(|l| Rational::from((&ar).pow(l as u32))).collect();
        let d = linalg::solve_rational(&mat, &rhs)?;
        let growth = super::standard::log2_max_weight(&d);
        let bits = policy.bits_for_growth(growth)?;
        let exact: Vec<(Rational, Rational)> = d.iter().enumerate().map(|(j, dj)| rotate_exact(dj, j)).collect();
        let coeffs = exact
            .iter()
            .map(|(re, im)| Complex::with_val(bits, (Float::with_val(bits, re), Float::with_val(bits, im))))
            .collect();
        let solved: Vec<Complex> = d.iter().map(|x| Complex::with_val(bits, (Float::with_val(bits, x), 0))).collect();
        let measure = h.with_precision(bits)?.with_factor(Factor::Polynomial { coeffs: solved.clone() })?;
        return Ok(MomentFamily { n, a, coeffs, exact: Some(exact), solved, condition: None, measure });
    }

    let growth = n as f64 * (3.0 + 8f64.sqrt()).log2();
    let bits = policy.bits_for_growth(growth)?;
    let hp = h.with_precision(bits)?;
    let moments: Vec<Complex> = (0..=2 * n).map(|s| hp.moment(s)).collect::<Result<_>>()?;
    let mat = CMatrix::from_fn(size, bits, |l, j| moments[l + j].clone());
    let rhs: Vec<Complex> = (0..size)
        .map(|l| Complex::with_val(bits, (Float::with_val(bits, a).pow(l as u32), 0)))
        .collect();
    let sol = linalg::solve(&mat, &rhs)?;
    let coeffs = sol
        .x
        .iter()
        .enumerate()
        .map(|(j, d)| Complex::with_val(bits, d * crate::numerics::i_pow(bits, (4 - j % 4) as u32 % 4)))
        .collect();
    let measure = hp.with_factor(Factor::Polynomial { coeffs: sol.x.clone() })?;
    Ok(MomentFamily { n, a, coeffs, exact: None, solved: sol.x, condition: Some(sol.condition), measure })
}

/// `n -> F_n` for a fixed weight; Taylor-matched to order `n`.
pub fn moment_sequence(h: BorelMeasure, a: f64) -> Result<SuperoscFamily> {
    let band = h.band();
    check_nonnegative(&h)?;
    let label = format!("moment(a={a}, h={})", match &h {
        BorelMeasure::Density(d) => d.density().label(),
        _ => String::from("?"),
    });
    let fam = SuperoscFamily::new(label, band, a, IndexKind::Integer, move |idx, policy| {
        let n = idx.as_n().expect("integer index");
        Ok(moment_family(&h, n, a, policy)?.measure)
    })?;
    Ok(fam.taylor_matched(true))
}

/// `int_alpha^beta ln h(k) / sqrt((beta-k)(k-alpha)) dk`, computed as
/// `int_0^pi ln h(c + r cos t) dt` after `k = c + r cos t`.
///
/// A weight that vanishes on a subinterval makes the logarithm infinite and
/// is reported as [`Error::QuadratureNonConvergence`].
pub fn szego_check(h: &Density, alpha: f64, beta: f64, prec: u32) -> Result<Float> {
    crate::numerics::check_precision(prec)?;
    if !(alpha < beta) {
        return Err(Error::InvalidInput(format!("need alpha < beta, got [{alpha}, {beta}]")));
    }
    let c = Float::with_val(prec, alpha + beta) / 2u32;
    let r = Float::with_val(prec, beta - alpha) / 2u32;
    let pi = Float::with_val(prec, Constant::Pi);
    // t = theta / pi keeps the interval ends exact
    let v = quadrature::integrate(&QuadratureSpec::default(), prec, 0.0, 1.0, &[], |t| {
        let theta = Float::with_val(prec, t * &pi);
        let k = Float::with_val(prec, &r * theta.cos()) + &c;
        let hv = h.eval(&k)?;
        if !hv.imag().is_zero() {
            return Err(Error::InvalidInput(format!("weight {} is not real", h.label())));
        }
        Ok(complex(prec, 0.0, 0.0) + Float::with_val(prec, hv.real().ln_ref()))
    })?;
    Ok(Float::with_val(prec, v.real()) * pi)
}
