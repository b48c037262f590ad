//! Exact rational scalars and their text form.

use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational.
pub type Q = num_rational::BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// `10^(-k)`.
pub fn pow10_neg(k: u32) -> Q {
    Q::new(BigInt::one(), num_traits::pow(BigInt::from(10), k as usize))
}

/// Formats as `p/q` with `q > 0`, always including the denominator.
pub fn to_pq(x: &Q) -> String {
    alloc::format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or `p`; accepts the unicode minus sign.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim().replace('\u{2212}', "-");
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.as_str(), "1"),
    };
    let n = BigInt::from_str(n).ok()?;
    let d = BigInt::from_str(d).ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

/// Bit size of numerator plus denominator.
pub fn bits(x: &Q) -> u64 {
    x.numer().bits() + x.denom().bits()
}

pub fn max_bits<'a, I: IntoIterator<Item = &'a Q>>(xs: I) -> u64 {
    xs.into_iter().map(bits).max().unwrap_or(0)
}

/// Decimal rendering rounded half away from zero to `digits` fractional digits.
pub fn to_decimal(x: &Q, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = x.abs() * Q::from_integer(scale.clone());
    let (iq, rem) = scaled.numer().div_rem(scaled.denom());
    let mut int = iq;
    if rem * BigInt::from(2) >= *scaled.denom() {
        int += BigInt::one();
    }
    let neg = x.is_negative() && !int.is_zero();
    let (whole, frac) = int.div_rem(&scale);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&alloc::format!("{}", whole));
    if digits > 0 {
        let f = alloc::format!("{}", frac);
        out.push('.');
        for _ in f.len()..digits {
            out.push('0');
        }
        out.push_str(&f);
    }
    out
}

pub fn sum(xs: &[Q]) -> Q {
    xs.iter().fold(Q::zero(), |a, b| a + b)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |s, (x, y)| s + x * y)
}

pub fn scale(a: &[Q], s: &Q) -> Vec<Q> {
    a.iter().map(|x| x * s).collect()
}

pub fn centroid(points: &[&[Q]]) -> Vec<Q> {
    let d = points.first().map_or(0, |p| p.len());
    let mut c = alloc::vec![Q::zero(); d];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p.iter()) {
            *ci += pi;
        }
    }
    let k = q(points.len() as i64);
    c.iter().map(|x| x / &k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pq_round_trip() {
        for (n, d) in [(-1, 2), (3, 1), (0, 5), (7, -14)] {
            let x = qf(n, d);
            assert_eq!(parse_q(&to_pq(&x)), Some(x));
        }
        assert_eq!(to_pq(&qf(2, -4)), "-1/2");
        assert_eq!(parse_q("\u{2212}1/2"), Some(qf(-1, 2)));
        assert_eq!(parse_q("1/0"), None);
    }

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&qf(1, 3), 3), "0.333");
        assert_eq!(to_decimal(&qf(-2, 3), 3), "-0.667");
        assert_eq!(to_decimal(&qf(-1, 10000), 2), "0.00");
        assert_eq!(to_decimal(&q(5), 0), "5");
        assert_eq!(to_decimal(&qf(1, 20), 1), "0.1");
    }
}
