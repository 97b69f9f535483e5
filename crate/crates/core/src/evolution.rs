//! Generalized free Schrödinger evolution `i d/dt Psi = -H(-i d/dz) Psi` on
//! band-limited data.
//!
//! The operator `H(-i d/dz)` is never expanded as a series. Every action goes
//! through the spectral weight: `U_t F(z) = int e^{iH(k)t} e^{ikz} dmu(k)`.

use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::error::{Error, Result};
use crate::families::{EntireSymbol, Evaluator, SuperoscFamily};
use crate::measures::{BorelMeasure, Factor};
use crate::numerics::linalg::solve_rational;
use crate::numerics::{complex, format, PrecisionPolicy};

/// Band samples used to size the weight `e^{iH(k)t}` before it is applied.
const WEIGHT_SAMPLES: usize = 257;
/// Highest polynomial degree `pde_residual` builds stencils for.
pub const MAX_STENCIL_DEGREE: usize = 8;
/// Bits the residual must keep after finite-difference cancellation.
const STENCIL_GUARD_BITS: f64 = 30.0;

/// `U_t mu`: the base measure, the symbol and the accumulated time.
///
/// Propagating again under the same symbol adds the times instead of
/// stacking weights, so `U_{t2} U_{t1} mu` and `U_{t1+t2} mu` are the same
/// object whenever `t1 + t2` rounds to the same time.
#[derive(Debug, Clone)]
pub struct PropagatedMeasure {
    base: BorelMeasure,
    symbol: EntireSymbol,
    time: Complex,
    measure: BorelMeasure,
}

impl PropagatedMeasure {
    pub fn base(&self) -> &BorelMeasure {
        &self.base
    }

    pub fn symbol(&self) -> &EntireSymbol {
        &self.symbol
    }

    pub fn time(&self) -> &Complex {
        &self.time
    }

    /// `e^{iH(k)t} dmu(k)` as a measure.
    pub fn measure(&self) -> &BorelMeasure {
        &self.measure
    }

    pub fn eval(&self, z: &Complex) -> Result<Complex> {
        self.measure.eval_transform(z)
    }

    pub fn evaluator(&self) -> Evaluator {
        let m = self.measure.clone();
        std::sync::Arc::new(move |z: &Complex| m.eval_transform(z))
    }

    /// `U_dt` applied on top of this evolution.
    pub fn then(&self, dt: &Complex) -> Result<PropagatedMeasure> {
        let p = self.time.prec().0.max(dt.prec().0);
        let t = Complex::with_val(p, &self.time + dt);
        build(&self.base, &self.symbol, t)
    }
}

/// Largest `log2 |w(k)|` over the atoms (discrete) or a band grid (otherwise).
fn weight_growth(m: &BorelMeasure, w: &Factor) -> Result<f64> {
    let p = m.precision();
    let points: Vec<Complex> = match m.as_discrete() {
        Some(d) => d.atoms().iter().map(|a| crate::numerics::from_real(&a.location)).collect(),
        None => {
            let b = m.band();
            (0..WEIGHT_SAMPLES)
                .map(|i| complex(p, -b + 2.0 * b * i as f64 / (WEIGHT_SAMPLES - 1) as f64, 0.0))
                .collect()
        }
    };
    let mut g = f64::NEG_INFINITY;
    for k in &points {
        let v = w.eval(k)?;
        let l = Float::with_val(64, v.abs_ref()).log2().to_f64();
        g = g.max(l);
    }
    Ok(g)
}

/// Applies `w` to `m`, first raising the precision by the bits a weight of
/// size `2^growth` can cancel away.
fn apply_weight(m: &BorelMeasure, w: Factor) -> Result<BorelMeasure> {
    let growth = weight_growth(m, &w)?;
    let base = m.precision();
    if growth <= 0.0 {
        return m.with_factor(w);
    }
    let cap = PrecisionPolicy::from_env(base)?.max_bits;
    let want = base as f64 + growth.ceil();
    if want > cap as f64 {
        return Err(Error::Overflow(format!(
            "weight {} reaches 2^{growth:.0} on the band; resolving it needs {want} bits, cap is {cap}",
            w.label()
        )));
    }
    m.with_precision(want as u32)?.with_factor(w)
}

fn build(base: &BorelMeasure, symbol: &EntireSymbol, time: Complex) -> Result<PropagatedMeasure> {
    let measure = if time.is_zero() {
        base.clone()
    } else {
        apply_weight(base, Factor::Phase { symbol: symbol.clone(), time: time.clone() })?
    };
    Ok(PropagatedMeasure { base: base.clone(), symbol: symbol.clone(), time, measure })
}

/// `U_t mu` for the symbol `H`. Complex `t` is allowed; weights that cannot
/// be resolved within the precision cap are reported as [`Error::Overflow`].
pub fn propagate(m: &BorelMeasure, h: &EntireSymbol, t: &Complex) -> Result<PropagatedMeasure> {
    build(m, h, t.clone())
}

/// `H(a)` for real `a`, at precision `prec`.
fn value_at(h: &EntireSymbol, a: f64, prec: u32) -> Complex {
    h.eval(&complex(prec, a, 0.0))
}

/// The first derived family: weights multiplied by `e^{H(k) - H(a)}`.
/// The band and the limit `e^{iaz}` are unchanged.
pub fn family_one(m: &BorelMeasure, h: &EntireSymbol, a: f64) -> Result<BorelMeasure> {
    let shift = value_at(h, a, m.precision());
    apply_weight(m, Factor::Growth { symbol: h.clone(), shift })
}

/// `h0` and `H(a)` after checking that `H` declares an image bound and that
/// `H(a)` is real and outside `[-h0, h0]`.
fn second_family_target(h: &EntireSymbol, a: f64) -> Result<(f64, f64)> {
    let h0 = h.band_image_bound().ok_or_else(|| {
        Error::HypothesisViolation(format!("symbol {} declares no image bound h0", h.label()))
    })?;
    let ha = value_at(h, a, 128);
    let (re, im) = (ha.real().to_f64(), ha.imag().to_f64());
    if im.abs() > 1e-12 * re.abs().max(1.0) {
        return Err(Error::HypothesisViolation(format!(
            "{}({a}) = {} is not real",
            h.label(),
            format::complex_short(&ha)
        )));
    }
    if re.abs() <= h0 {
        return Err(Error::HypothesisViolation(format!(
            "|{}({a})| = {} does not exceed h0 = {h0}",
            h.label(),
            re.abs()
        )));
    }
    Ok((h0, re))
}

/// The second derived family: the image of `mu` under `H`, with band `h0`
/// and limit `e^{iH(a)z}`.
pub fn family_two(m: &BorelMeasure, h: &EntireSymbol, a: f64) -> Result<BorelMeasure> {
    let (h0, _) = second_family_target(h, a)?;
    m.pushforward(h, h0).map_err(|e| match e {
        Error::ImageBoundViolation(msg) => Error::HypothesisViolation(msg),
        other => other,
    })
}

/// [`family_one`] applied to every member of `fam`.
pub fn family_one_sequence(fam: &SuperoscFamily, h: &EntireSymbol) -> Result<SuperoscFamily> {
    let a = fam.target();
    let (base, sym) = (fam.clone(), h.clone());
    let label = format!("one[{}; H={}]", fam.label(), h.label());
    let out = SuperoscFamily::new(label, fam.band(), a, fam.index_kind(), move |idx, policy| {
        let m = base.clone().with_policy(*policy).measure(idx)?;
        family_one(&m, &sym, a)
    })?;
    Ok(out.with_policy(*fam.policy()))
}

/// [`family_two`] applied to every member of `fam`; band `h0`, target `H(a)`.
pub fn family_two_sequence(fam: &SuperoscFamily, h: &EntireSymbol) -> Result<SuperoscFamily> {
    let a = fam.target();
    let (h0, target) = second_family_target(h, a)?;
    let (base, sym) = (fam.clone(), h.clone());
    let label = format!("two[{}; H={}]", fam.label(), h.label());
    let out = SuperoscFamily::new(label, h0, target, fam.index_kind(), move |idx, policy| {
        let m = base.clone().with_policy(*policy).measure(idx)?;
        family_two(&m, &sym, a)
    })?;
    Ok(out.with_policy(*fam.policy()))
}

/// Weights `w_j`, `j = -p..p`, with `sum_j w_j f(x + jh) = h^l f^{(l)}(x) + O(h^{l+2})`.
///
/// The symmetric stencil with `p = ceil(l/2)` is exact on polynomials of
/// degree `2p`, and symmetry removes the odd error term.
fn central_stencil(l: usize) -> Result<Vec<Rational>> {
    if l == 0 {
        return Ok(vec![Rational::from(1)]);
    }
    let p = l.div_ceil(2) as i64;
    let nodes: Vec<i64> = (-p..=p).collect();
    let size = nodes.len();
    let mat: Vec<Vec<Rational>> = (0..size)
        .map(|m| nodes.iter().map(|&j| Rational::from(j).pow(m as u32)).collect())
        .collect();
    let mut fact = Rational::from(1);
    for i in 2..=l {
        fact *= i as u32;
    }
    let rhs: Vec<Rational> = (0..size).map(|m| if m == l { fact.clone() } else { Rational::new() }).collect();
    solve_rational(&mat, &rhs)
}

/// `|i dPsi/dt + H(-i d/dz) Psi|` at `(t, z)` for `Psi(t, .) = U_t F`, with
/// every derivative replaced by a second-order central difference of width
/// `step`. `H` must be a polynomial of degree at most [`MAX_STENCIL_DEGREE`].
pub fn pde_residual(m: &BorelMeasure, h: &EntireSymbol, t: f64, z: &Complex, step: f64) -> Result<Float> {
    let coeffs = h.poly_coeffs().ok_or_else(|| {
        Error::InvalidInput(format!("pde_residual needs a polynomial symbol, got {}", h.label()))
    })?;
    let d = coeffs.len().saturating_sub(1);
    if d > MAX_STENCIL_DEGREE {
        return Err(Error::StencilOverflow(format!(
            "degree {d} exceeds the largest supported stencil order {MAX_STENCIL_DEGREE}"
        )));
    }
    if !(step > 0.0 && step.is_finite() && t.is_finite()) {
        return Err(Error::InvalidInput(format!("need finite t and step > 0, got t = {t}, step = {step}")));
    }
    let prec = m.precision().max(z.prec().0);
    let zmag = Float::with_val(64, z.abs_ref()).to_f64();
    // bits to place z + j*step distinctly, plus bits the l-th difference cancels
    let needed = (zmag + t.abs() + 1.0).log2() - step.log2() + d.max(1) as f64 * (-step.log2()).max(0.0) + STENCIL_GUARD_BITS;
    if !needed.is_finite() || needed > prec as f64 {
        return Err(Error::StencilOverflow(format!(
            "at |z| = {zmag:.3e} with step {step:.1e} the stencil needs {needed:.0} bits, have {prec}"
        )));
    }

    let at = |tt: Float| -> Result<PropagatedMeasure> { propagate(m, h, &Complex::with_val(prec, (tt, 0))) };
    let hs = Float::with_val(prec, step);
    let tf = Float::with_val(prec, t);

    // i dPsi/dt
    let plus = at(Float::with_val(prec, &tf + &hs))?.eval(z)?;
    let minus = at(Float::with_val(prec, &tf - &hs))?.eval(z)?;
    let dt = Complex::with_val(prec, &plus - &minus) / Float::with_val(prec, &hs * 2u32);
    let mut total = dt * complex(prec, 0.0, 1.0);

    // H(-i d/dz) Psi = sum_l h_l (-i)^l d^l Psi
    let now = at(tf)?;
    let reach = d.div_ceil(2) as i64;
    let mut samples = Vec::with_capacity(2 * reach as usize + 1);
    for j in -reach..=reach {
        let zj = Complex::with_val(prec, z + Float::with_val(prec, &hs * j));
        samples.push(now.eval(&zj)?);
    }
    for (l, &(re, im)) in coeffs.iter().enumerate() {
        if re == 0.0 && im == 0.0 {
            continue;
        }
        let w = central_stencil(l)?;
        let p = (w.len() / 2) as i64;
        let mut deriv = Complex::new(prec);
        for (i, wi) in w.iter().enumerate() {
            if *wi != 0 {
                let s = &samples[(reach - p) as usize + i];
                deriv += Complex::with_val(prec, s * Float::with_val(prec, wi));
            }
        }
        deriv /= Float::with_val(prec, (&hs).pow(l as u32));
        let rot = crate::numerics::i_pow(prec, (4 - l % 4) as u32 % 4);
        total += Complex::with_val(prec, deriv * rot) * complex(prec, re, im);
    }
    Ok(Float::with_val(prec, total.abs_ref()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{standard_closed_form, standard_measure};
    use crate::measures::{Atom, DiscreteMeasure};
    use crate::numerics::rel_diff;

    const P: u32 = 128;

    fn atom(k: f64, band: f64) -> BorelMeasure {
        BorelMeasure::Discrete(
            DiscreteMeasure::new(vec![Atom { location: Float::with_val(P, k), weight: complex(P, 1.0, 0.0) }], band)
                .unwrap(),
        )
    }

    #[test]
    fn stencils() {
        let r = |v: &[(i64, i64)]| v.iter().map(|&(p, q)| Rational::from((p, q))).collect::<Vec<_>>();
        assert_eq!(central_stencil(1).unwrap(), r(&[(-1, 2), (0, 1), (1, 2)]));
        assert_eq!(central_stencil(2).unwrap(), r(&[(1, 1), (-2, 1), (1, 1)]));
        assert_eq!(central_stencil(4).unwrap(), r(&[(1, 1), (-4, 1), (6, 1), (-4, 1), (1, 1)]));
    }

    #[test]
    fn transport_is_translation() {
        let m = standard_measure(2.0, 3, &PrecisionPolicy::default()).unwrap();
        let u = propagate(&m, &EntireSymbol::identity(), &complex(P, 1.0, 0.0)).unwrap();
        for z in [complex(P, 0.0, 0.0), complex(P, 0.7, -0.2)] {
            let shifted = Complex::with_val(P, &z + 1u32);
            assert!(rel_diff(&u.eval(&z).unwrap(), &m.eval_transform(&shifted).unwrap()) < 1e-30);
        }
    }

    #[test]
    fn brute_force_standard_n4() {
        let m = standard_measure(2.0, 4, &PrecisionPolicy::default()).unwrap();
        let u = propagate(&m, &EntireSymbol::square(), &complex(P, 0.3, 0.0)).unwrap();
        // direct five-term sum with C_j = binom(4,j) (3/2)^{4-j} (-1/2)^j at k_j = 1 - j/2
        let mut s = Complex::new(P);
        for j in 0..=4u32 {
            let binom = [1.0, 4.0, 6.0, 4.0, 1.0][j as usize];
            let c = binom * 1.5f64.powi(4 - j as i32) * (-0.5f64).powi(j as i32);
            let k = Float::with_val(P, 1.0 - j as f64 / 2.0);
            let arg = Float::with_val(P, k.square_ref()) * Float::with_val(P, 0.3) + &k;
            let phase = Complex::with_val(P, (0, arg)).exp();
            s += phase * c;
        }
        assert!(rel_diff(&u.eval(&complex(P, 1.0, 0.0)).unwrap(), &s) < 1e-30);
    }

    #[test]
    fn semigroup_and_identity() {
        let m = standard_measure(2.0, 5, &PrecisionPolicy::default()).unwrap();
        let h = EntireSymbol::square();
        let u0 = propagate(&m, &h, &complex(P, 0.0, 0.0)).unwrap();
        assert_eq!(u0.measure().as_discrete().unwrap().atoms(), m.as_discrete().unwrap().atoms());
        let twice = propagate(&m, &h, &complex(P, 0.25, 0.0)).unwrap().then(&complex(P, 0.5, 0.0)).unwrap();
        let once = propagate(&m, &h, &complex(P, 0.75, 0.0)).unwrap();
        assert_eq!(twice.measure().as_discrete().unwrap().atoms(), once.measure().as_discrete().unwrap().atoms());
    }

    #[test]
    fn plane_wave_eigenrelation() {
        let m = atom(0.5, 1.0);
        let t = complex(P, 0.4, -0.1);
        let u = propagate(&m, &EntireSymbol::square(), &t).unwrap();
        let factor = Complex::with_val(P, Complex::with_val(P, &t * 0.25f64) * complex(P, 0.0, 1.0)).exp();
        for z in [complex(P, 0.0, 0.0), complex(P, 2.0, 1.0)] {
            let expect = m.eval_transform(&z).unwrap() * &factor;
            assert!(rel_diff(&u.eval(&z).unwrap(), &expect) < 1e-30);
        }
    }

    #[test]
    fn first_family_weights() {
        let m = standard_measure(2.0, 3, &PrecisionPolicy::default()).unwrap();
        let one = family_one(&m, &EntireSymbol::square(), 2.0).unwrap();
        let base = m.as_discrete().unwrap().atoms();
        let mut sum = Complex::new(P);
        for (a, b) in base.iter().zip(one.as_discrete().unwrap().atoms()) {
            let k2 = Float::with_val(P, a.location.square_ref());
            let expect = Complex::with_val(P, &a.weight * (k2 - 4u32).exp());
            assert!(rel_diff(&b.weight, &expect) < 1e-30);
            sum += expect;
        }
        assert!(rel_diff(&one.eval_transform(&complex(P, 0.0, 0.0)).unwrap(), &sum) < 1e-30);
        let unchanged = family_one(&m, &EntireSymbol::constant(3.0), 2.0).unwrap();
        assert!(rel_diff(&unchanged.eval_transform(&complex(P, 1.0, 0.0)).unwrap(), &m.eval_transform(&complex(P, 1.0, 0.0)).unwrap()) < 1e-30);
    }

    #[test]
    fn second_family() {
        let m = standard_measure(2.0, 2, &PrecisionPolicy::default()).unwrap();
        let h = EntireSymbol::square().with_image_bound(1.0).unwrap();
        let two = family_two(&m, &h, 2.0).unwrap();
        let locs: Vec<f64> = two.as_discrete().unwrap().atoms().iter().map(|a| a.location.to_f64()).collect();
        assert_eq!(locs, vec![1.0, 0.0]);
        assert!(matches!(family_two(&m, &h, 0.9), Err(Error::HypothesisViolation(_))));
        assert!(matches!(family_two(&m, &EntireSymbol::square(), 2.0), Err(Error::HypothesisViolation(_))));
        let id = EntireSymbol::identity().with_image_bound(1.0).unwrap();
        let same = family_two(&m, &id, 2.0).unwrap();
        let z = complex(P, 0.3, 0.1);
        assert!(rel_diff(&same.eval_transform(&z).unwrap(), &standard_closed_form(2.0, 2, &z).unwrap()) < 1e-30);
    }

    #[test]
    fn residual_orders() {
        let m = atom(0.5, 1.0);
        let h = EntireSymbol::square();
        let z = complex(P, 0.2, 0.0);
        let r: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&s| pde_residual(&m, &h, 0.1, &z, s).unwrap().to_f64())
            .collect();
        for w in r.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((slope - 2.0).abs() < 0.1, "{r:?}");
        }
        let tr = pde_residual(&m, &EntireSymbol::identity(), 0.1, &z, 1e-2).unwrap();
        assert!(tr.to_f64() < 1e-30);
        let deg9 = EntireSymbol::real_polynomial(&[0.0; 10].iter().chain(&[1.0]).copied().collect::<Vec<_>>());
        assert!(matches!(pde_residual(&m, &deg9, 0.1, &z, 1e-2), Err(Error::StencilOverflow(_))));
        assert!(matches!(pde_residual(&m, &h, 0.1, &complex(P, 1e40, 0.0), 1e-2), Err(Error::StencilOverflow(_))));
    }

    #[test]
    fn overflow_reported() {
        let m = atom(0.5, 1.0);
        let r = propagate(&m, &EntireSymbol::square(), &complex(P, 0.0, -1e30));
        assert!(matches!(r, Err(Error::Overflow(_))));
    }
}
