//! Scalar abstraction shared by metrics, closed forms and the adaptive
//! policy.
//!
//! Every quantity in this crate is a ratio of small integers, so a scalar
//! only has to be constructible from an integer fraction. Exact rationals
//! reproduce the published values bit for bit; floats are provided for
//! quick sweeps and plotting.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

use crate::error::{Error, Result};
use crate::Rational;

pub trait Scalar: Clone + Debug + Display + PartialOrd + Num + Sum + Send + Sync + 'static {
    /// `numer / denom`; `denom` must be non-zero.
    fn from_ratio(numer: i128, denom: i128) -> Self;

    fn to_f64(&self) -> f64;

    /// Smallest integer not below `self`.
    fn ceil_int(&self) -> i64;

    fn from_count(count: usize) -> Self {
        Self::from_ratio(count as i128, 1)
    }

    fn from_rational(r: &Rational) -> Self {
        Self::from_ratio(*r.numer(), *r.denom())
    }
}

impl Scalar for f64 {
    fn from_ratio(numer: i128, denom: i128) -> Self {
        numer as f64 / denom as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn ceil_int(&self) -> i64 {
        self.ceil() as i64
    }
}

impl Scalar for f32 {
    fn from_ratio(numer: i128, denom: i128) -> Self {
        (numer as f64 / denom as f64) as f32
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn ceil_int(&self) -> i64 {
        self.ceil() as i64
    }
}

macro_rules! impl_ratio_scalar {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            fn from_ratio(numer: i128, denom: i128) -> Self {
                Ratio::new(numer as $int, denom as $int)
            }
            fn to_f64(&self) -> f64 {
                ratio_to_f64(self)
            }
            fn ceil_int(&self) -> i64 {
                self.ceil().to_integer() as i64
            }
        }
    };
}

impl_ratio_scalar!(i64);
impl_ratio_scalar!(i128);

impl Scalar for Ratio<BigInt> {
    fn from_ratio(numer: i128, denom: i128) -> Self {
        Ratio::new(BigInt::from(numer), BigInt::from(denom))
    }
    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn ceil_int(&self) -> i64 {
        self.ceil().to_integer().to_i64().unwrap_or(i64::MAX)
    }
}

fn ratio_to_f64<T>(r: &Ratio<T>) -> f64
where
    T: Clone + Integer + ToPrimitive,
{
    let approx = |x: &T| ToPrimitive::to_f64(x).unwrap_or(f64::NAN);
    approx(r.numer()) / approx(r.denom())
}

/// Render with `sig` significant digits, without exponent and without
/// trailing zeros (`0.4375`, `21.4286`, `3.996`).
pub fn format_decimal(value: f64, sig: usize) -> String {
    if value == 0.0 || !value.is_finite() {
        return if value.is_finite() {
            "0".into()
        } else {
            value.to_string()
        };
    }
    let exponent = value.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - exponent).max(0) as usize;
    let mut s = format!("{value:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Parse `p/q`, an integer, or a plain decimal (`0.25`, `1e-3`) into an
/// exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = |reason: &str| Error::Parse {
        token: text.to_string(),
        reason: reason.to_string(),
    };
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p
            .trim()
            .parse()
            .map_err(|_| bad("numerator is not an integer"))?;
        let q: i128 = q
            .trim()
            .parse()
            .map_err(|_| bad("denominator is not an integer"))?;
        if q == 0 {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| bad("malformed exponent"))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad("empty number"));
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(bad("not a number"));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value =
        Rational::from_integer(digits.parse::<i128>().map_err(|_| bad("too many digits"))?);
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(10);
    if scale.unsigned_abs() > 36 {
        return Err(bad("exponent out of range"));
    }
    for _ in 0..scale.unsigned_abs() {
        value = if scale > 0 { value * ten } else { value / ten };
    }
    Ok(if neg { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(0.4375, 6), "0.4375");
        assert_eq!(format_decimal(150.0 / 7.0, 6), "21.4286");
        assert_eq!(format_decimal(3.996001, 6), "3.996");
        assert_eq!(format_decimal(6.0, 6), "6");
        assert_eq!(format_decimal(0.0, 6), "0");
        assert_eq!(format_decimal(-2.5, 6), "-2.5");
        assert_eq!(format_decimal(1234567.0, 6), "1234567");
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/12").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("2").unwrap(), Rational::from_integer(2));
        assert_eq!(parse_rational("1e-3").unwrap(), Rational::new(1, 1000));
        assert_eq!(
            parse_rational("-1.5E1").unwrap(),
            Rational::from_integer(-15)
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn scalars_agree_on_a_fraction() {
        let exact = Rational::from_ratio(49, 16);
        let big = BigRational::from_ratio(49, 16);
        let small = Ratio::<i64>::from_ratio(49, 16);
        assert_eq!(Scalar::to_f64(&exact), 3.0625);
        assert_eq!(Scalar::to_f64(&big), 3.0625);
        assert_eq!(Scalar::to_f64(&small), 3.0625);
        assert_eq!(f64::from_ratio(49, 16), 3.0625);
        assert_eq!(f32::from_ratio(49, 16), 3.0625f32);
        assert_eq!(exact.ceil_int(), 4);
        assert_eq!(f64::from_ratio(-1, 2).ceil_int(), 0);
    }

    use crate::BigRational;
}
