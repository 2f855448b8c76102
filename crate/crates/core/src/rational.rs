//! Exact rational scalars and small helpers shared by every module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(num: i64) -> Q {
    Q::from_integer(BigInt::from(num))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `"p/q"` or `"p"`; rejects zero denominators.
pub fn parse_fraction(text: &str) -> Option<Q> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => text.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

/// Canonical fraction string, always `p/q` with `q > 0` in lowest terms.
pub fn format_fraction(value: &Q) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn to_f64(value: &Q) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(if value.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_strings() {
        assert_eq!(parse_fraction("2/3"), Some(q(2, 3)));
        assert_eq!(parse_fraction(" 4/6 "), Some(q(2, 3)));
        assert_eq!(parse_fraction("1"), Some(qi(1)));
        assert_eq!(parse_fraction("-1/2"), Some(q(-1, 2)));
        assert_eq!(parse_fraction("1/0"), None);
        assert_eq!(parse_fraction("x"), None);
        assert_eq!(format_fraction(&q(4, 6)), "2/3");
        assert_eq!(format_fraction(&qi(1)), "1/1");
        assert_eq!(format_fraction(&zero()), "0/1");
    }
}
