//! Scalar traits shared by the generic algebra, plus exact rational parsing.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Ordered field-like scalar: the coefficient type of [`crate::poly::Poly`].
///
/// Exact algorithms (gcd, squarefree decomposition, Sturm counts) are only
/// meaningful for exact instantiations such as [`BigRational`]; float
/// instantiations are used for evaluation in numerical oracles.
pub trait Scalar: Clone + Num + Signed + PartialOrd + Debug {}

impl<T> Scalar for T where T: Clone + Num + Signed + PartialOrd + Debug {}

/// Parse a rational from `"a"`, `"a/b"`, or a decimal such as `"-0.6"` or `"1e-9"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if s.contains('/') {
        return BigRational::from_str(s).map_err(|_| Error::Parse(format!("bad rational {s:?}")));
    }
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if all_digits.is_empty() {
        "0"
    } else {
        &all_digits
    })
    .map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Best-effort conversion to `f64` for display and numerical oracles.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `2^-k` as a rational.
pub fn dyadic(numer: i64, log2_denom: u32) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::one() << log2_denom)
}

/// Exact rational value of a finite float.
pub fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_rational("-4/6").unwrap(), q(-2, 3));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational("0.6").unwrap(), q(3, 5));
        assert_eq!(parse_rational("-.25").unwrap(), q(-1, 4));
        assert_eq!(parse_rational("1e-9").unwrap(), q(1, 1_000_000_000));
        assert_eq!(parse_rational("2.5e2").unwrap(), q(250, 1));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0x", ".", "1.2.3", "--1"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn float_roundtrip_is_exact() {
        let x = 0.1f64;
        assert_eq!(rational_to_f64(&f64_to_rational(x)), x);
        assert_eq!(dyadic(3, 2), q(3, 4));
    }
}
