//! Concrete superoscillating constructions.
//!
//! Every construction is exposed two ways: as free functions producing a
//! single [`BorelMeasure`] (or coefficient list), and as a [`SuperoscFamily`]
//! indexed by `n` or `delta` that the verification code in
//! [`crate::metrics`] consumes.

pub mod berry;
pub mod lagrange;
pub mod moment;
pub mod sinc;
pub mod spec;
pub mod standard;
pub mod symbol;

use std::fmt;
use std::sync::Arc;

use rug::Complex;

use crate::error::{Error, Result};
use crate::measures::BorelMeasure;
use crate::numerics::{format, PrecisionPolicy};

pub use berry::{berry_eval, berry_family, berry_measure, BerrySpec};
pub use lagrange::{
    equispaced_frequencies, lagrange_equispaced_family, lagrange_family, lagrange_family_float,
    lagrange_fixed_family, lagrange_weights_exact, vandermonde_solve, vandermonde_solve_exact,
};
pub use moment::{moment_family, moment_sequence, szego_check, MomentFamily};
pub use sinc::{
    sinc_delta_closed_form, sinc_delta_family, sinc_delta_measure, sinc_interpolation,
    SincInterpolation,
};
pub use spec::FamilySpec;
pub use standard::{standard_closed_form, standard_exact, standard_family, standard_measure};
pub use symbol::{builtin_symbol, EntireSymbol, SymbolSpec};

/// A complex function of one complex variable, as sampled by the metrics.
pub type Evaluator = Arc<dyn Fn(&Complex) -> Result<Complex> + Send + Sync>;

type Generator = Arc<dyn Fn(Index, &PrecisionPolicy) -> Result<BorelMeasure> + Send + Sync>;
type ClosedForm = Arc<dyn Fn(Index, &Complex) -> Result<Complex> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexKind {
    /// `n = 1, 2, ...`, convergence as `n -> infinity`.
    Integer,
    /// `delta > 0`, convergence as `delta -> 0`.
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Index {
    N(u32),
    Delta(f64),
}

impl Index {
    pub fn kind(&self) -> IndexKind {
        match self {
            Index::N(_) => IndexKind::Integer,
            Index::Delta(_) => IndexKind::Real,
        }
    }

    pub fn as_n(&self) -> Option<u32> {
        match *self {
            Index::N(n) => Some(n),
            Index::Delta(_) => None,
        }
    }

    pub fn as_delta(&self) -> Option<f64> {
        match *self {
            Index::Delta(d) => Some(d),
            Index::N(_) => None,
        }
    }

    /// Parses `"8"` for integer families and `"0.25"` for real ones.
    pub fn parse(s: &str, kind: IndexKind) -> Result<Self> {
        let t = s.trim();
        match kind {
            IndexKind::Integer => t
                .parse::<u32>()
                .map(Index::N)
                .map_err(|_| Error::Spec(format!("index '{t}' is not a nonnegative integer"))),
            IndexKind::Real => match t.parse::<f64>() {
                Ok(d) if d > 0.0 && d.is_finite() => Ok(Index::Delta(d)),
                _ => Err(Error::Spec(format!("index '{t}' is not a positive real"))),
            },
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::N(n) => write!(f, "{n}"),
            Index::Delta(d) => write!(f, "{d}"),
        }
    }
}

/// An indexed sequence of band-limited measures with a common band `k0`
/// converging to the plane wave `e^{i a z}`, `|a| > k0`.
#[derive(Clone)]
pub struct SuperoscFamily {
    label: String,
    band: f64,
    target: f64,
    index_kind: IndexKind,
    generator: Generator,
    closed_form: Option<ClosedForm>,
    policy: PrecisionPolicy,
    taylor_matched: bool,
}

impl fmt::Debug for SuperoscFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SuperoscFamily")
            .field("label", &self.label)
            .field("band", &self.band)
            .field("target", &self.target)
            .field("index_kind", &self.index_kind)
            .field("closed_form", &self.closed_form.is_some())
            .finish()
    }
}

impl SuperoscFamily {
    pub fn new<G>(label: impl Into<String>, band: f64, target: f64, index_kind: IndexKind, generator: G) -> Result<Self>
    where
        G: Fn(Index, &PrecisionPolicy) -> Result<BorelMeasure> + Send + Sync + 'static,
    {
        if !(band > 0.0 && band.is_finite() && target.is_finite()) {
            return Err(Error::InvalidInput(format!("band {band} / target {target} not usable")));
        }
        if target.abs() <= band {
            return Err(Error::HypothesisViolation(format!(
                "target |a| = {} does not exceed the band k0 = {band}",
                target.abs()
            )));
        }
        Ok(Self {
            label: label.into(),
            band,
            target,
            index_kind,
            generator: Arc::new(generator),
            closed_form: None,
            policy: PrecisionPolicy::default(),
            taylor_matched: false,
        })
    }

    /// The single plane wave `e^{iaz}` as a one-atom measure on `[-|a|, |a|]`.
    /// It is its own limit and not superoscillating; it serves as a reference
    /// signal for sampling and wavenumber checks.
    pub fn plane_wave(a: f64) -> Result<Self> {
        if !(a.is_finite() && a != 0.0) {
            return Err(Error::InvalidInput(format!("plane wave frequency {a} must be nonzero")));
        }
        let band = a.abs();
        let gen = move |_: Index, policy: &PrecisionPolicy| {
            let p = policy.base_bits;
            let atom = crate::measures::Atom {
                location: rug::Float::with_val(p, a),
                weight: crate::numerics::complex(p, 1.0, 0.0),
            };
            Ok(BorelMeasure::Discrete(crate::measures::DiscreteMeasure::new(vec![atom], band)?))
        };
        Ok(Self {
            label: format!("plane_wave(a={a})"),
            band,
            target: a,
            index_kind: IndexKind::Integer,
            generator: Arc::new(gen),
            closed_form: None,
            policy: PrecisionPolicy::default(),
            taylor_matched: true,
        })
    }

    pub fn with_closed_form<C>(mut self, f: C) -> Self
    where
        C: Fn(Index, &Complex) -> Result<Complex> + Send + Sync + 'static,
    {
        self.closed_form = Some(Arc::new(f));
        self
    }

    pub fn with_policy(mut self, policy: PrecisionPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn taylor_matched(mut self, yes: bool) -> Self {
        self.taylor_matched = yes;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn band(&self) -> f64 {
        self.band
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn index_kind(&self) -> IndexKind {
        self.index_kind
    }

    pub fn policy(&self) -> &PrecisionPolicy {
        &self.policy
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_form.is_some()
    }

    /// True when the construction forces `F^{(l)}(0) = (ia)^l` for `l <= n`.
    pub fn is_taylor_matched(&self) -> bool {
        self.taylor_matched
    }

    fn check_index(&self, idx: Index) -> Result<()> {
        if idx.kind() != self.index_kind {
            return Err(Error::InvalidInput(format!(
                "family {} expects {:?} indices, got {idx}",
                self.label, self.index_kind
            )));
        }
        Ok(())
    }

    /// The measure `mu_idx`, checked against the family band.
    pub fn measure(&self, idx: Index) -> Result<BorelMeasure> {
        self.check_index(idx)?;
        let m = (self.generator)(idx, &self.policy)?;
        if m.band() != self.band {
            return Err(Error::InvalidInput(format!(
                "generated measure has band {} instead of {}",
                m.band(),
                self.band
            )));
        }
        Ok(m)
    }

    /// `F_idx` via the measure.
    pub fn transform_evaluator(&self, idx: Index) -> Result<Evaluator> {
        let m = Arc::new(self.measure(idx)?);
        let label = self.label.clone();
        Ok(Arc::new(move |z: &Complex| {
            m.eval_transform(z).map_err(|e| annotate(e, &label, idx, z))
        }))
    }

    /// `F_idx`, preferring the closed form when one exists.
    pub fn evaluator(&self, idx: Index) -> Result<Evaluator> {
        self.check_index(idx)?;
        match &self.closed_form {
            Some(cf) => {
                let cf = cf.clone();
                let prec = self.measure(idx)?.precision();
                let label = self.label.clone();
                Ok(Arc::new(move |z: &Complex| {
                    let zp = Complex::with_val(prec, z);
                    cf(idx, &zp).map_err(|e| annotate(e, &label, idx, z))
                }))
            }
            None => self.transform_evaluator(idx),
        }
    }

    /// The limit `z -> e^{i a z}` at `prec` bits.
    pub fn target_evaluator(&self, prec: u32) -> Evaluator {
        let a = self.target;
        Arc::new(move |z: &Complex| {
            let iaz = Complex::with_val(prec, z * Complex::with_val(prec, (0, a)));
            crate::numerics::ensure_finite(iaz.exp(), || {
                format!("e^(iaz) overflows at z = {}", format::complex_short(z))
            })
        })
    }
}

/// Prefixes an evaluation error with the family, index and point.
fn annotate(e: Error, label: &str, idx: Index, z: &Complex) -> Error {
    let ctx = format!("{label}, index {idx}, z = {}", format::complex_short(z));
    match e {
        Error::Overflow(m) => Error::Overflow(format!("{ctx}: {m}")),
        Error::QuadratureNonConvergence(m) => Error::QuadratureNonConvergence(format!("{ctx}: {m}")),
        other => other,
    }
}
