//! Exact probabilities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Reads `p/q`, an integer, or a decimal such as `0.25` as an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Syntax {
        offset: 0,
        message: format!("`{text}` is not a rational number"),
    };
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let mut numer = int_part.abs() * &scale + frac_part;
        if negative {
            numer = -numer;
        }
        return Ok(BigRational::new(numer, scale));
    }
    let n: BigInt = text.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Renders `p/q`, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders a terminating decimal such as `0.8`, falling back to `p/q`.
pub fn format_decimal(r: &Rational) -> String {
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut d = r.denom().clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format_rational(r);
    }
    let digits = twos.max(fives);
    if digits == 0 {
        return r.numer().to_string();
    }
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (r * BigRational::from_integer(scale.clone())).to_integer();
    let sign = if scaled.is_negative() { "-" } else { "" };
    let scaled = scaled.abs();
    let int = &scaled / &scale;
    let frac = format!(
        "{:0>width$}",
        (&scaled % &scale).to_string(),
        width = digits
    );
    format!("{sign}{int}.{}", frac.trim_end_matches('0'))
}

pub fn is_probability(r: &Rational) -> bool {
    r.is_positive() && r < &Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(&rat(4, 5)), "0.8");
        assert_eq!(format_decimal(&rat(1, 8)), "0.125");
        assert_eq!(format_decimal(&rat(-3, 2)), "-1.5");
        assert_eq!(format_decimal(&rat(1, 3)), "1/3");
        assert_eq!(format_decimal(&rat(2, 1)), "2");
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("0.2").unwrap(), rat(1, 5));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("1").unwrap(), one());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn formatting() {
        assert_eq!(format_rational(&rat(4, 5)), "4/5");
        assert_eq!(format_rational(&rat(2, 2)), "1");
    }
}
