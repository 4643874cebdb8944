//! Exact rational scalars.
//!
//! `Rat` is `num_rational::BigRational`, which already keeps every value
//! reduced with a positive denominator. The helpers here pin down the
//! canonical text form used across fixtures, JSON output and the DSL:
//! `"n"` for integers and `"n/d"` otherwise, with the sign on the numerator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rat = BigRational;

/// Integer-valued rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact conversion to `i64`; `None` for non-integers and out-of-range values.
pub fn rat_to_i64(x: &Rat) -> Option<i64> {
    if !x.is_integer() {
        return None;
    }
    x.to_integer().to_i64()
}

/// `n / d`, reduced. Panics on `d == 0`; callers pass literal denominators.
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"a"` or `"a/b"` with optional sign on either part. The result is
/// reduced and the denominator made positive, so `"3/-6"` parses to `-1/2`.
pub fn rat_parse(text: &str) -> Result<Rat> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num_s
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {num_s:?} in rational {s:?}")))?;
    let den: BigInt = den_s
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {den_s:?} in rational {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in rational {s:?}")));
    }
    Ok(Rat::new(num, den))
}

/// Canonical text form: `"n"` when the denominator is 1, else `"n/d"`.
pub fn rat_render(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Least common multiple of the denominators of a slice, as a positive BigInt.
pub fn denominator_lcm(xs: &[Rat]) -> BigInt {
    let mut lcm = BigInt::one();
    for x in xs {
        lcm = num_integer::lcm(lcm, x.denom().clone());
    }
    lcm.abs()
}
