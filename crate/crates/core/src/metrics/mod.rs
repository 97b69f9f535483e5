//! Quantitative checks on families: grid estimates of the weighted sup
//! distance, Taylor defects at the origin, the explicit error bound for
//! prescribed-frequency families, separation constants and local wavenumbers.

pub mod identities;
pub mod report;

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::BorelMeasure;
use crate::numerics::{abs, check_precision, complex, i_pow};

pub use identities::{run_identity, IdentityCase, IdentityConfig, IdentityName, IdentityReport};
pub use report::{convergence_report, ConvergenceReport, DefectRow, ReportOptions, Verdict};

/// Sampling points `z = r e^{i theta}`: `r = 0` plus the geometric radii
/// `r_max / 2^{n_radii - 1}, ..., r_max / 2, r_max`, each with `n_angles`
/// equispaced angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub r_max: f64,
    pub n_radii: usize,
    pub n_angles: usize,
}

impl Default for PolarGrid {
    fn default() -> Self {
        Self { r_max: 4.0, n_radii: 8, n_angles: 32 }
    }
}

impl PolarGrid {
    pub fn new(r_max: f64, n_radii: usize, n_angles: usize) -> Result<Self> {
        let g = Self { r_max, n_radii, n_angles };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::InvalidInput(format!("r_max = {} must be positive", self.r_max)));
        }
        if self.n_radii == 0 || self.n_angles == 0 {
            return Err(Error::InvalidInput("grid sizes must be at least 1".into()));
        }
        if self.n_radii > 1000 {
            return Err(Error::InvalidInput(format!("{} radii underflow the geometric schedule", self.n_radii)));
        }
        Ok(())
    }

    /// `rmax:nr:na`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidInput(format!("complex grid '{s}' is not rmax:n_radii:n_angles"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let r_max = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
        let n_radii = parts[1].trim().parse::<usize>().map_err(|_| bad())?;
        let n_angles = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
        Self::new(r_max, n_radii, n_angles)
    }

    /// Radii in increasing order, starting with 0.
    pub fn radii(&self) -> Vec<f64> {
        let mut r = vec![0.0];
        r.extend((0..self.n_radii).map(|i| self.r_max / 2f64.powi((self.n_radii - 1 - i) as i32)));
        r
    }

    pub fn points(&self, prec: u32) -> Vec<Complex> {
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let mut pts = vec![complex(prec, 0.0, 0.0)];
        for r in self.radii().into_iter().skip(1) {
            for j in 0..self.n_angles {
                let theta = Float::with_val(prec, &two_pi * j as u32) / self.n_angles as u32;
                let (s, c) = theta.sin_cos(Float::new(prec));
                pts.push(Complex::with_val(prec, (c * r, s * r)));
            }
        }
        pts
    }
}

/// A sampled function of one complex variable.
pub type Sampled<'a> = &'a (dyn Fn(&Complex) -> Result<Complex> + Send + Sync);

/// Grid estimate of `sup_z |F(z) - G(z)| e^{-B|z|}` together with the point
/// where it is attained.
///
/// The value is a maximum over finitely many points and therefore a lower
/// bound on the true supremum.
pub fn a1_sup(f: Sampled, g: Sampled, b: f64, grid: &PolarGrid, prec: u32) -> Result<(Float, Complex)> {
    check_precision(prec)?;
    grid.validate()?;
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::InvalidInput(format!("B = {b} must be a nonnegative number")));
    }
    let pts = grid.points(prec);
    let vals: Vec<Result<Float>> = pts
        .par_iter()
        .map(|z| {
            let d = Complex::with_val(prec, f(z)? - g(z)?);
            let az = abs(z);
            let w = Float::with_val(prec, -(az * b)).exp();
            Ok(abs(&d) * w)
        })
        .collect();
    let mut best = (Float::new(prec), pts[0].clone());
    for (v, z) in vals.into_iter().zip(pts) {
        let v = v?;
        if v > best.0 {
            best = (v, z);
        }
    }
    Ok(best)
}

/// Grid estimate of the weighted sup distance; see [`a1_sup`].
pub fn a1_distance(f: Sampled, g: Sampled, b: f64, grid: &PolarGrid, prec: u32) -> Result<Float> {
    a1_sup(f, g, b, grid, prec).map(|(v, _)| v)
}

/// `i^l M_l - (ia)^l = F^{(l)}(0) - (ia)^l` in exact arithmetic, as
/// `(re, im)`, when the moment is known exactly.
pub fn taylor_defect_exact(m: &BorelMeasure, a: &Rational, l: u32) -> Option<(Rational, Rational)> {
    let d = m.exact_moment(l)? - Rational::from(a.pow(l));
    Some(match l % 4 {
        0 => (d, Rational::new()),
        1 => (Rational::new(), d),
        2 => (-d, Rational::new()),
        _ => (Rational::new(), -d),
    })
}

/// `F^{(l)}(0) - (ia)^l` from the `l`-th moment, exact when possible.
pub fn taylor_defect(m: &BorelMeasure, a: f64, l: u32) -> Result<Complex> {
    let p = m.precision();
    if let Some(ar) = Rational::from_f64(a) {
        if let Some((re, im)) = taylor_defect_exact(m, &ar, l) {
            return Ok(Complex::with_val(p, (Float::with_val(p, &re), Float::with_val(p, &im))));
        }
    }
    let lhs = Complex::with_val(p, m.moment(l)? * i_pow(p, l % 4));
    let rhs = Complex::with_val(p, (0, Float::with_val(p, a))).pow(l);
    Ok(lhs - rhs)
}

/// `((n+1) x^n + 1) / (x (1+x)^n) e^{|a|(1+x)|z|}` with `x = kappa1 kappa2`.
pub fn growth_error_bound(kappa1: f64, kappa2: f64, n: u32, a: f64, z: &Complex) -> Result<Float> {
    if !(kappa1 > 0.0 && kappa2 > 0.0 && kappa1.is_finite() && kappa2.is_finite() && a.is_finite()) {
        return Err(Error::InvalidInput(format!("need positive finite constants, got {kappa1}, {kappa2}")));
    }
    let p = z.prec().0.max(128);
    let x = Float::with_val(p, kappa1) * kappa2;
    let xn = Float::with_val(p, (&x).pow(n));
    let num = xn * (n + 1) + 1u32;
    let den = Float::with_val(p, &x * Float::with_val(p, Float::with_val(p, &x + 1u32).pow(n)));
    let growth = Float::with_val(p, Float::with_val(p, &x + 1u32) * a.abs()) * abs(z);
    Ok(num / den * growth.exp())
}

/// `min_{n <= n_max, j} (prod_{l != j} |k_l(n) - k_j(n)|)^{1/n}`; lists are
/// keyed by `n` and must hold `n + 1` distinct frequencies. `n = 0` is skipped.
pub fn separation_kappa(freqs_per_n: &BTreeMap<u32, Vec<Rational>>, n_max: u32) -> Result<f64> {
    let p = 128;
    let mut best: Option<Float> = None;
    for (&n, freqs) in freqs_per_n.range(1..=n_max) {
        if freqs.len() != n as usize + 1 {
            return Err(Error::InvalidInput(format!("index n = {n} needs {} frequencies, got {}", n + 1, freqs.len())));
        }
        for (j, kj) in freqs.iter().enumerate() {
            let mut log = Float::new(p);
            for (l, kl) in freqs.iter().enumerate() {
                if l == j {
                    continue;
                }
                let d = Rational::from(kl - kj).abs();
                if d == 0 {
                    return Err(Error::DuplicateFrequency(format!("n = {n}: frequencies {j} and {l} coincide at {kj}")));
                }
                log += Float::with_val(p, &d).ln();
            }
            let root = (log / n).exp();
            if best.as_ref().is_none_or(|b| root < *b) {
                best = Some(root);
            }
        }
    }
    best.map(|b| b.to_f64())
        .ok_or_else(|| Error::InvalidInput(format!("no frequency lists with 1 <= n <= {n_max}")))
}

/// [`separation_kappa`] for the equispaced nodes `k_j = 1 - 2j/n`.
pub fn equispaced_separation(n_max: u32) -> Result<f64> {
    let map = (1..=n_max).map(|n| (n, crate::families::equispaced_frequencies(n))).collect();
    separation_kappa(&map, n_max)
}

/// `Im[(F(x+h) - F(x-h)) / (2h F(x))]`, the central-difference estimate of
/// `Im (d/dx) log F`. Points where `|F(x)| <= 10 h |F'(x)|` are near a zero of
/// `F` and refused.
pub fn local_wavenumber(f: Sampled, x: f64, h: f64, prec: u32) -> Result<f64> {
    check_precision(prec)?;
    if !(h > 0.0 && h.is_finite() && x.is_finite()) {
        return Err(Error::InvalidInput(format!("need finite x and h > 0, got x = {x}, h = {h}")));
    }
    let xf = Float::with_val(prec, x);
    let hf = Float::with_val(prec, h);
    let at = |v: Float| f(&Complex::with_val(prec, (v, 0)));
    let f0 = at(xf.clone())?;
    let fp = at(Float::with_val(prec, &xf + &hf))?;
    let fm = at(Float::with_val(prec, &xf - &hf))?;
    let deriv = Complex::with_val(prec, fp - fm) / Float::with_val(prec, &hf * 2u32);
    let m0 = abs(&f0);
    if m0.is_zero() || m0 <= Float::with_val(prec, abs(&deriv) * h * 10u32) {
        return Err(Error::NearZeroSignal(format!(
            "|F({x})| = {:.3e} is within 10 h |F'| of zero",
            m0.to_f64()
        )));
    }
    Ok(Complex::with_val(prec, deriv / f0).imag().to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{lagrange_family, standard_measure};
    use crate::numerics::PrecisionPolicy;

    const P: u32 = 128;

    #[test]
    fn grid_layout() {
        let g = PolarGrid::new(4.0, 3, 4).unwrap();
        assert_eq!(g.radii(), vec![0.0, 1.0, 2.0, 4.0]);
        assert_eq!(g.points(P).len(), 13);
        assert_eq!(PolarGrid::parse("4:3:4").unwrap(), g);
        assert!(PolarGrid::parse("4:0:4").is_err());
    }

    #[test]
    fn distance_examples() {
        let f = |z: &Complex| Ok(Complex::with_val(P, z.square_ref()));
        let g = |z: &Complex| Ok(Complex::with_val(P, z.square_ref()) + 0.25f64);
        let grid = PolarGrid::default();
        assert_eq!(a1_distance(&f, &f, 0.0, &grid, P).unwrap(), 0);
        let d = a1_distance(&f, &g, 0.0, &grid, P).unwrap();
        assert!((d.to_f64() - 0.25).abs() < 1e-30);
    }

    #[test]
    fn defect_examples() {
        let m = lagrange_family(
            &[Rational::from(1), Rational::new(), Rational::from(-1)],
            &Rational::from(2),
            1.0,
            &PrecisionPolicy::default(),
        )
        .unwrap();
        for l in 0..=2 {
            assert_eq!(taylor_defect_exact(&m, &Rational::from(2), l), Some((Rational::new(), Rational::new())));
        }
        let s = standard_measure(2.0, 2, &PrecisionPolicy::default()).unwrap();
        assert_eq!(taylor_defect_exact(&s, &Rational::from(2), 2), Some((Rational::from((3, 2)), Rational::new())));
        let d = taylor_defect(&s, 2.0, 0).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn bound_examples() {
        let z0 = complex(P, 0.0, 0.0);
        assert_eq!(growth_error_bound(1.0, 1.0, 1, 2.0, &z0).unwrap(), 1.5);
        let vals: Vec<Float> = (1..=40).map(|n| growth_error_bound(1.0, 1.0, n, 2.0, &z0).unwrap()).collect();
        assert!(vals.windows(2).skip(1).all(|w| w[1] < w[0]));
        assert!(vals[39] < 1e-9);
    }

    #[test]
    fn separation_examples() {
        let mut map = BTreeMap::new();
        map.insert(2, crate::families::equispaced_frequencies(2));
        assert!((separation_kappa(&map, 2).unwrap() - 1.0).abs() < 1e-15);
        let mut c = BTreeMap::new();
        c.insert(1, vec![Rational::new(), Rational::from_f64(1e-6).unwrap()]);
        assert!((separation_kappa(&c, 1).unwrap() - 1e-6).abs() < 1e-20);
        c.insert(1, vec![Rational::new(), Rational::new()]);
        assert!(matches!(separation_kappa(&c, 1), Err(Error::DuplicateFrequency(_))));
    }

    #[test]
    fn wavenumber_of_plane_wave() {
        let f = |z: &Complex| Ok(Complex::with_val(P, z * complex(P, 0.0, 2.0)).exp());
        for x in [-3.0, 0.0, 1.7] {
            let k = local_wavenumber(&f, x, 1e-3, P).unwrap();
            assert!((k - 2.0).abs() < 1e-5);
        }
        let zero = |_: &Complex| Ok(complex(P, 0.0, 0.0));
        assert!(matches!(local_wavenumber(&zero, 0.0, 1e-3, P), Err(Error::NearZeroSignal(_))));
    }
}
