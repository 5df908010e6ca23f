//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational used throughout.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational `{0}`")]
pub struct RatParseError(pub String);

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Parses `NAT` or `NAT/NAT` (an optional leading `-` is accepted so callers can
/// report range errors instead of syntax errors).
pub fn parse_rat(text: &str) -> Result<Rat, RatParseError> {
    let err = || RatParseError(text.to_string());
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let (num, den) = match body.split_once('/') {
        Some((n, d)) if digits(n) && digits(d) => (n, d),
        None if digits(body) => (body, "1"),
        _ => return Err(err()),
    };
    let n: BigInt = num.parse().map_err(|_| err())?;
    let d: BigInt = den.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    let r = Rat::new(n, d);
    Ok(if neg { -r } else { r })
}

/// Always `p/q` in lowest terms, including integers (`1/1`).
pub fn fmt_fraction(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Compact form: integers without denominator.
pub fn fmt_compact(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        fmt_fraction(r)
    }
}

/// Exact square root of a non-negative rational if it is a perfect square.
pub fn rational_sqrt(r: &Rat) -> Option<Rat> {
    if r < &Rat::zero() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rat::new(n, d))
}

pub fn in_unit_interval(r: &Rat) -> bool {
    r >= &Rat::zero() && r <= &Rat::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reduce() {
        assert_eq!(parse_rat("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("3").unwrap(), int(3));
        assert_eq!(parse_rat("-1/3").unwrap(), rat(-1, 3));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("1.5").is_err());
        assert!(parse_rat("/2").is_err());
        assert_eq!(fmt_fraction(&parse_rat("2/4").unwrap()), "1/2");
        assert_eq!(fmt_fraction(&int(1)), "1/1");
        assert_eq!(fmt_compact(&int(1)), "1");
    }

    #[test]
    fn square_roots() {
        assert_eq!(rational_sqrt(&rat(169, 225)), Some(rat(13, 15)));
        assert_eq!(rational_sqrt(&rat(199, 255)), None);
        assert_eq!(rational_sqrt(&rat(1, 4)), Some(rat(1, 2)));
    }
}
