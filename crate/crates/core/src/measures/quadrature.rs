//! Globally adaptive Gauss-Legendre quadrature at arbitrary precision.
//!
//! Each panel is integrated once whole and once as two halves; the difference
//! is the panel's error estimate and the halves are kept as its value. The
//! panel with the largest estimate is bisected until the summed estimate falls
//! below `max(rel_tol*|I|, abs_tol, 2^{8-p} * int|f|)`. The last term stops
//! refinement once cancellation inside the integral, not discretization,
//! limits what the working precision can resolve.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{abs, is_finite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    /// Plain adaptive Gauss-Legendre panels in the integration variable.
    GaussLegendre,
    /// Substitutes `k = c + r cos(theta)` first, which absorbs inverse
    /// square-root endpoint singularities; panels live in `theta`.
    ChebyshevEndpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadratureRule,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rule: QuadratureRule::GaussLegendre,
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_panels: 4096,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_rule(mut self, rule: QuadratureRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_panels < 1 || self.abs_tol < 0.0 {
            return Err(Error::InvalidInput(format!(
                "bad quadrature spec: rel_tol {} abs_tol {} max_panels {}",
                self.rel_tol, self.abs_tol, self.max_panels
            )));
        }
        Ok(())
    }
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussRule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

/// Rule order used at a given precision.
pub fn order_for_precision(prec: u32) -> usize {
    (prec as usize / 4).clamp(16, 96)
}

/// Memoized Gauss-Legendre rule of order `m` at `prec` bits.
pub fn gauss_rule(m: usize, prec: u32) -> Arc<GaussRule> {
    static RULES: OnceLock<Mutex<HashMap<(usize, u32), Arc<GaussRule>>>> = OnceLock::new();
    let cache = RULES.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache poisoned").get(&(m, prec)) {
        return r.clone();
    }
    let rule = Arc::new(compute_gauss_rule(m, prec));
    cache
        .lock()
        .expect("rule cache poisoned")
        .entry((m, prec))
        .or_insert(rule)
        .clone()
}

fn legendre_with_derivative(m: usize, x: &Float, wp: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(wp, 1);
    let mut p1 = x.clone();
    for k in 1..m {
        let k = k as u32;
        let t = Float::with_val(wp, x * &p1) * (2 * k + 1);
        let p2 = (t - Float::with_val(wp, &p0 * k)) / (k + 1);
        p0 = p1;
        p1 = p2;
    }
    // P'_m = m (x P_m - P_{m-1}) / (x^2 - 1)
    let num = (Float::with_val(wp, x * &p1) - &p0) * m as u32;
    let den = Float::with_val(wp, x.square_ref()) - 1u32;
    (p1, num / den)
}

fn compute_gauss_rule(m: usize, prec: u32) -> GaussRule {
    let wp = prec + 32;
    let pi = Float::with_val(wp, Constant::Pi);
    let tol = Float::with_val(wp, Float::i_exp(1, 6 - wp as i32));
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    // roots in decreasing order from the Tricomi-style initial guesses
    for i in 0..m {
        let guess = Float::with_val(wp, &pi * (4 * i as u32 + 3)) / (4 * m as u32 + 2);
        let mut x = guess.cos();
        for _ in 0..200 {
            let (p, d) = legendre_with_derivative(m, &x, wp);
            let dx = Float::with_val(wp, &p / &d);
            x -= &dx;
            if Float::with_val(wp, dx.abs_ref()) < tol {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(m, &x, wp);
        let one_minus = Float::with_val(wp, 1u32) - Float::with_val(wp, x.square_ref());
        let w = Float::with_val(wp, 2u32) / (one_minus * Float::with_val(wp, dp.square_ref()));
        nodes.push(Float::with_val(prec, &x));
        weights.push(Float::with_val(prec, &w));
    }
    nodes.reverse();
    weights.reverse();
    GaussRule { nodes, weights }
}

struct Panel {
    lo: Float,
    hi: Float,
    left: (Complex, Float),
    right: (Complex, Float),
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

struct Engine<'a, F> {
    rule: Arc<GaussRule>,
    prec: u32,
    f: &'a F,
}

impl<F> Engine<'_, F>
where
    F: Fn(&Float) -> Result<Complex>,
{
    /// Rule value and rule applied to `|f|` on `[lo, hi]`.
    fn apply(&self, lo: &Float, hi: &Float) -> Result<(Complex, Float)> {
        let p = self.prec;
        let c = Float::with_val(p, lo + hi) / 2u32;
        let h = Float::with_val(p, hi - lo) / 2u32;
        let mut sum = Complex::new(p);
        let mut sabs = Float::new(p);
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let k = Float::with_val(p, &h * x) + &c;
            let v = (self.f)(&k)?;
            if !is_finite(&v) {
                return Err(Error::QuadratureNonConvergence(format!(
                    "integrand is not finite at {}",
                    k.to_f64()
                )));
            }
            sabs += Float::with_val(p, abs(&v) * w);
            sum += Complex::with_val(p, &v * w);
        }
        Ok((sum * &h, sabs * h))
    }

    fn panel(&self, lo: Float, hi: Float, whole: Complex) -> Result<Panel> {
        let p = self.prec;
        let mid = Float::with_val(p, &lo + &hi) / 2u32;
        let left = self.apply(&lo, &mid)?;
        let right = self.apply(&mid, &hi)?;
        let est = Complex::with_val(p, &left.0 + &right.0);
        let err = abs(&Complex::with_val(p, &whole - &est)).to_f64();
        Ok(Panel {
            lo,
            hi,
            left,
            right,
            err,
        })
    }
}

/// `int_lo^hi f(k) dk`, splitting at `breakpoints` strictly inside the interval.
pub fn integrate<F>(
    spec: &QuadratureSpec,
    prec: u32,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    f: F,
) -> Result<Complex>
where
    F: Fn(&Float) -> Result<Complex>,
{
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::InvalidInput(format!("bad interval [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(Complex::new(prec));
    }
    match spec.rule {
        QuadratureRule::GaussLegendre => {
            let lo = Float::with_val(prec, lo);
            let hi = Float::with_val(prec, hi);
            let cuts: Vec<Float> = breakpoints
                .iter()
                .map(|&b| Float::with_val(prec, b))
                .collect();
            adaptive(spec, prec, &lo, &hi, &cuts, &f)
        }
        QuadratureRule::ChebyshevEndpoint => {
            let wp = prec;
            let c = Float::with_val(wp, lo + hi) / 2u32;
            let r = Float::with_val(wp, hi - lo) / 2u32;
            let pi = Float::with_val(wp, Constant::Pi);
            // theta runs over [0, pi]; k = c + r cos(theta) decreases with theta
            let cuts: Vec<Float> = breakpoints
                .iter()
                .filter(|&&b| b > lo && b < hi)
                .map(|&b| {
                    let t = (Float::with_val(wp, b) - &c) / &r;
                    t.acos()
                })
                .collect();
            let g = |theta: &Float| -> Result<Complex> {
                let (s, co) = theta.clone().sin_cos(Float::new(wp));
                let k = Float::with_val(wp, &r * &co) + &c;
                let v = f(&k)?;
                Ok(v * Float::with_val(wp, &r * &s))
            };
            adaptive(spec, prec, &Float::new(wp), &pi, &cuts, &g)
        }
    }
}

fn adaptive<F>(
    spec: &QuadratureSpec,
    prec: u32,
    lo: &Float,
    hi: &Float,
    cuts: &[Float],
    f: &F,
) -> Result<Complex>
where
    F: Fn(&Float) -> Result<Complex>,
{
    let engine = Engine {
        rule: gauss_rule(order_for_precision(prec), prec),
        prec,
        f,
    };
    let mut edges: Vec<Float> = vec![lo.clone()];
    let mut inner: Vec<Float> = cuts
        .iter()
        .filter(|b| *b > lo && *b < hi)
        .cloned()
        .collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    inner.dedup();
    edges.extend(inner);
    edges.push(hi.clone());

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        let whole = engine.apply(&w[0], &w[1])?.0;
        heap.push(engine.panel(w[0].clone(), w[1].clone(), whole)?);
    }
    let guard = 2f64.powi(8 - prec as i32);
    loop {
        let mut total = Complex::new(prec);
        let mut total_abs = Float::new(prec);
        let mut err = 0.0;
        for p in heap.iter() {
            total += &p.left.0;
            total += &p.right.0;
            total_abs += &p.left.1;
            total_abs += &p.right.1;
            err += p.err;
        }
        let tol = (spec.rel_tol * abs(&total).to_f64())
            .max(spec.abs_tol)
            .max(total_abs.to_f64() * guard);
        if err <= tol {
            return Ok(total);
        }
        if heap.len() >= spec.max_panels {
            return Err(Error::QuadratureNonConvergence(format!(
                "{} panels used, error estimate {err:.3e} above tolerance {tol:.3e}",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("nonempty panel heap");
        let mid = Float::with_val(prec, &worst.lo + &worst.hi) / 2u32;
        heap.push(engine.panel(worst.lo, mid.clone(), worst.left.0)?);
        heap.push(engine.panel(mid, worst.hi, worst.right.0)?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let p = 128;
        for m in [16usize, 17, 32] {
            let r = gauss_rule(m, p);
            assert_eq!(r.nodes.len(), m);
            // int_{-1}^{1} x^{2j} = 2/(2j+1) for 2j <= 2m-1
            for j in 0..m as u32 {
                let s: Float = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(x, w)| Float::with_val(p, x.pow(2 * j)) * w)
                    .fold(Float::new(p), |a, b| a + b);
                let exact = Float::with_val(p, 2u32) / (2 * j + 1);
                let d = Float::with_val(p, &s - &exact).abs().to_f64();
                assert!(d < 1e-35, "m {m} j {j} d {d}");
            }
        }
    }

    #[test]
    fn adaptive_oscillatory_integral() {
        let p = 128;
        let spec = QuadratureSpec::default();
        // int_{-1}^{1} e^{i 40 k} dk = 2 sin(40)/40
        let v = integrate(&spec, p, -1.0, 1.0, &[], |k| {
            let z = Complex::with_val(p, (0, Float::with_val(p, k * 40u32)));
            Ok(z.exp())
        })
        .unwrap();
        let exact = 2.0 * 40f64.sin() / 40.0;
        assert!((v.real().to_f64() - exact).abs() < 1e-14);
        assert!(v.imag().to_f64().abs() < 1e-14);
    }

    #[test]
    fn chebyshev_rule_removes_endpoint_singularity() {
        let p = 128;
        let spec = QuadratureSpec::default().with_rule(QuadratureRule::ChebyshevEndpoint);
        // int_{-1}^{1} 1/sqrt(1-k^2) dk = pi
        let v = integrate(&spec, p, -1.0, 1.0, &[], |k| {
            let s = (Float::with_val(p, 1u32) - Float::with_val(p, k.square_ref())).sqrt();
            Ok(Complex::with_val(p, (s.recip(), 0)))
        })
        .unwrap();
        assert!((v.real().to_f64() - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let p = 128;
        let spec = QuadratureSpec {
            max_panels: 2,
            ..QuadratureSpec::default()
        };
        let r = integrate(&spec, p, 0.0, 1.0, &[], |k| {
            // |k - 1/3|^{1/2} has a derivative singularity inside
            let d = Float::with_val(p, k - Float::with_val(p, 1) / 3u32).abs().sqrt();
            Ok(Complex::with_val(p, (d, 0)))
        });
        assert!(matches!(r, Err(Error::QuadratureNonConvergence(_))));
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let p = 128;
        let r = integrate(&QuadratureSpec::default(), p, 0.0, 1.0, &[], |_| {
            Ok(Complex::with_val(p, (f64::NEG_INFINITY, 0)))
        });
        assert!(matches!(r, Err(Error::QuadratureNonConvergence(_))));
    }
}
