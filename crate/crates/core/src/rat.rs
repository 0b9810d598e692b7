//! Exact rationals. The core never touches floating point.

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// 2^e for a possibly negative exponent.
pub fn pow2(e: i64) -> Rational {
    let p = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

pub fn is_in_unit_interval(v: &Rational) -> bool {
    !v.is_negative() && *v <= Rational::one()
}

/// Renders in lowest terms, as `p/q` or a plain integer.
pub fn format_rat(v: &Rational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parses `p`, `-p`, `p/q` or `-p/q`.
pub fn parse_rat(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rational::from_integer(n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_signs() {
        assert_eq!(pow2(3), int(8));
        assert_eq!(pow2(0), int(1));
        assert_eq!(pow2(-2), rat(1, 4));
    }

    #[test]
    fn parse_format_roundtrip() {
        for s in ["3/4", "-7/2", "5", "-12", "0"] {
            let v = parse_rat(s).unwrap();
            assert_eq!(format_rat(&v), s);
        }
        assert_eq!(parse_rat("6/8").unwrap(), rat(3, 4));
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }
}
