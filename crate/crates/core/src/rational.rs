//! Exact rational helpers on top of `num-rational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qpow(base: &Q, exp: u32) -> Q {
    let mut r = Q::one();
    for _ in 0..exp {
        r *= base;
    }
    r
}

pub fn floor_i64(x: &Q) -> i64 {
    x.floor().to_integer().to_i64().expect("rational out of i64 range")
}

pub fn ceil_i64(x: &Q) -> i64 {
    x.ceil().to_integer().to_i64().expect("rational out of i64 range")
}

pub fn is_integral(x: &Q) -> bool {
    x.is_integer()
}

/// `1/x` as an integer when `x` is the reciprocal of one.
pub fn reciprocal_int(x: &Q) -> Option<i64> {
    if x.is_positive() && x.numer().is_one() {
        x.denom().to_i64()
    } else {
        None
    }
}

/// Parses `"p/q"` or a plain integer.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("bad rational {s:?}"))?;
    let d: BigInt = d.parse().map_err(|_| format!("bad rational {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Q::new(n, d))
}

pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Least common multiple of the denominators, as an i64.
pub fn common_denominator(xs: &[&Q]) -> i64 {
    let l = xs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    l.to_i64().expect("denominator out of i64 range")
}
