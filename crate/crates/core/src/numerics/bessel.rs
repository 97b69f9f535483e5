//! Bessel function of the first kind, order zero, at arbitrary precision.
//!
//! Small and moderate arguments use the ascending series with enough guard
//! bits to absorb its cancellation (terms peak near `e^|x|`). Large arguments
//! use Hankel's asymptotic expansion truncated at its smallest term, which is
//! below `e^{-2|x|}`.

use rug::float::Constant;
use rug::Float;

/// `J0(x)` at the precision of `x`.
///
/// Absolute error is at most `2^{8-p} * max(1, |J0(x)|)` for precision `p`.
pub fn bessel_j0(x: &Float) -> Float {
    let prec = x.prec();
    let ax = Float::with_val(prec, x.abs_ref());
    let axf = ax.to_f64();
    if axf > asymptotic_threshold(prec) {
        Float::with_val(prec, j0_asymptotic(&ax, prec + 16))
    } else {
        Float::with_val(prec, j0_series(&ax, prec))
    }
}

fn asymptotic_threshold(prec: u32) -> f64 {
    0.5 * prec as f64 + 20.0
}

fn j0_series(x: &Float, prec: u32) -> Float {
    let guard = (x.to_f64() * std::f64::consts::LOG2_E).ceil() as u32 + 16;
    let wp = prec + guard;
    let x = Float::with_val(wp, x);
    let q = Float::with_val(wp, x.square_ref()) / 4u32;
    let mut term = Float::with_val(wp, 1);
    let mut sum = Float::with_val(wp, 1);
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let xf = x.to_f64();
    let mut k: u32 = 0;
    loop {
        k += 1;
        term *= &q;
        term /= k * k;
        term = -term;
        sum += &term;
        if (k as f64) > xf / 2.0 + 1.0 && Float::with_val(wp, term.abs_ref()) < eps {
            break;
        }
    }
    sum
}

fn j0_asymptotic(x: &Float, wp: u32) -> Float {
    let x = Float::with_val(wp, x);
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut p = Float::with_val(wp, 1);
    let mut q = Float::with_val(wp, 0);
    let mut t = Float::with_val(wp, 1);
    let mut prev_abs = Float::with_val(wp, 1);
    let mut k: u32 = 1;
    loop {
        // t_k = t_{k-1} (2k-1)^2 / (8 k x)
        t *= (2 * k - 1) * (2 * k - 1);
        t /= 8 * k;
        t /= &x;
        let ta = Float::with_val(wp, t.abs_ref());
        if ta > prev_abs || ta < eps {
            break;
        }
        // a_k(0) carries (-1)^k, P and Q alternate on top of that
        let negative = (k + k / 2) % 2 == 1;
        let signed = if negative { -t.clone() } else { t.clone() };
        if k % 2 == 0 {
            p += &signed;
        } else {
            q += &signed;
        }
        prev_abs = ta;
        k += 1;
    }
    let pi = Float::with_val(wp, Constant::Pi);
    let chi = Float::with_val(wp, &x - Float::with_val(wp, &pi / 4u32));
    let (s, c) = chi.sin_cos(Float::new(wp));
    let amp = (Float::with_val(wp, 2u32) / (pi * &x)).sqrt();
    amp * (p * c - q * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mpfr_j0(x: &Float) -> Float {
        x.clone().j0()
    }

    #[test]
    fn examples() {
        let p = 128;
        assert_eq!(bessel_j0(&Float::with_val(p, 0)), 1);
        // ascending series summed independently in f64
        let mut s = 0.0;
        let mut t = 1.0;
        for k in 1..40 {
            s += t;
            t *= -0.25 / (k as f64 * k as f64);
        }
        let j1 = bessel_j0(&Float::with_val(p, 1)).to_f64();
        assert!((j1 - s).abs() < 1e-15);
        assert!((j1 - 0.765_197_686_6).abs() < 1e-10);
        let z = bessel_j0(&Float::with_val(p, 2.404_825_557_7)).to_f64();
        assert!(z.abs() <= 1e-9);
    }

    #[test]
    fn agrees_with_mpfr_across_regimes() {
        for &prec in &[53u32, 128, 256] {
            for &x in &[0.1, 0.9, 3.7, 9.0, 25.5, 60.0, 90.0, 150.0, 400.0, -7.25] {
                let xv = Float::with_val(prec, x);
                let ours = bessel_j0(&xv);
                let reference = mpfr_j0(&Float::with_val(prec + 64, x));
                let err = Float::with_val(prec + 64, &ours - &reference).abs();
                let scale = Float::with_val(prec, reference.abs_ref()).max(&Float::with_val(prec, 1));
                let bound = Float::with_val(prec + 64, Float::i_exp(1, 8 - prec as i32)) * scale;
                assert!(err <= bound, "prec {prec} x {x}: err {err}");
            }
        }
    }
}
