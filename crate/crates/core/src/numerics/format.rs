//! Locale-independent decimal rendering of high-precision values.

use rug::float::Round;
use rug::{Complex, Float};

/// Significant decimal digits used for a value carried at `bits` precision.
pub fn digits_for_bits(bits: u32) -> usize {
    (bits as f64 * 0.302).ceil() as usize + 2
}

/// Decimal string with `digits_for_bits(x.prec())` significant digits and
/// trailing zeros removed. Plain notation for moderate exponents, `d.ddde±N`
/// otherwise.
pub fn decimal(x: &Float) -> String {
    decimal_with_digits(x, digits_for_bits(x.prec()))
}

pub fn decimal_with_digits(x: &Float, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf".into() } else { "inf".into() };
    }
    if x.is_zero() {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let (neg, mantissa, exp) = x.to_sign_string_exp_round(10, Some(digits), Round::Nearest);
    let exp = exp.expect("finite nonzero value has an exponent");
    let mantissa = mantissa.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    // value = 0.<mantissa> * 10^exp
    let n = mantissa.len() as i32;
    if (-6..=digits as i32).contains(&exp) {
        if exp <= 0 {
            format!("{sign}0.{}{}", "0".repeat((-exp) as usize), mantissa)
        } else if exp >= n {
            format!("{sign}{}{}", mantissa, "0".repeat((exp - n) as usize))
        } else {
            let (int, frac) = mantissa.split_at(exp as usize);
            format!("{sign}{int}.{frac}")
        }
    } else {
        let (lead, rest) = mantissa.split_at(1);
        let e = exp - 1;
        if rest.is_empty() {
            format!("{sign}{lead}e{e}")
        } else {
            format!("{sign}{lead}.{rest}e{e}")
        }
    }
}

/// Short human-readable form used in error messages.
pub fn complex_short(z: &Complex) -> String {
    format!(
        "{}{:+}i",
        decimal_with_digits(z.real(), 12),
        z.imag().to_f64()
    )
}

/// Parses a decimal string produced by [`decimal`] at `prec` bits.
pub fn parse_decimal(s: &str, prec: u32) -> Option<Float> {
    let t = s.trim();
    match t {
        "inf" | "-inf" | "nan" => return None,
        _ => {}
    }
    Float::parse(t).ok().map(|p| Float::with_val(prec, p))
}
