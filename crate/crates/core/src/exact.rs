//! Exact rational inputs for certifying zero tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

/// Parses a JSON decimal literal (`-12`, `0.25`, `1.5e-3`) into an exact rational.
pub fn parse_decimal(literal: &str) -> Option<BigRational> {
    let s = literal.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * Pow::pow(&ten, scale as u64))
    } else {
        BigRational::new(numer, Pow::pow(&ten, scale.unsigned_abs()))
    };
    Some(value)
}

/// Lossy conversion used only for reporting exact residuals.
pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Masses and weights carried as exact rationals alongside the floating-point copies.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalInputs {
    pub masses: Vec<BigRational>,
    pub u: Vec<BigRational>,
}

impl RationalInputs {
    pub fn u_squared(&self) -> Vec<BigRational> {
        self.u.iter().map(|v| v * v).collect()
    }
}

pub fn max_abs(values: &[BigRational]) -> BigRational {
    values
        .iter()
        .map(|v| v.abs())
        .fold(BigRational::zero(), |acc, v| if v > acc { v } else { acc })
}

pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_and_fraction_forms() {
        assert_eq!(parse_decimal("3"), Some(rational(3, 1)));
        assert_eq!(parse_decimal("0.25"), Some(rational(1, 4)));
        assert_eq!(parse_decimal("-1.5"), Some(rational(-3, 2)));
        assert_eq!(parse_decimal("0.1"), Some(rational(1, 10)));
    }

    #[test]
    fn exponent_forms() {
        assert_eq!(parse_decimal("1.5e-3"), Some(rational(3, 2000)));
        assert_eq!(parse_decimal("2E2"), Some(rational(200, 1)));
        assert_eq!(parse_decimal("5e+1"), Some(rational(50, 1)));
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(parse_decimal(""), None);
        assert_eq!(parse_decimal("."), None);
        assert_eq!(parse_decimal("1x"), None);
        assert_eq!(parse_decimal("NaN"), None);
    }
}
