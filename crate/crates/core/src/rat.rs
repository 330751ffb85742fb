//! Exact rational scalars.
//!
//! Every scalar in the crate is a `BigRational`: always reduced, denominator
//! positive, no rounding anywhere. Helpers here cover construction, parsing
//! of the `num/den` wire format and the fractional-part / floor arithmetic the
//! charge computations need.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rat = num_rational::BigRational;

/// Rational from an integer pair. Panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Fractional part `x - floor(x)`, always in `[0, 1)`.
pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

/// True when `x` is an integer.
pub fn is_integer(x: &Rat) -> bool {
    x.denom().is_one()
}

/// `x` as i64 if it is an integer in range.
pub fn to_i64(x: &Rat) -> Option<i64> {
    if !is_integer(x) {
        return None;
    }
    let n = x.numer();
    i64::try_from(n.clone()).ok()
}

/// Ceiling of `a / b` for positive integers.
pub fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if r.is_zero() || (a.is_negative() != b.is_negative()) {
        q
    } else {
        q + 1
    }
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n as u64 {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

/// Canonical wire format: `num/den` with den omitted when 1.
pub fn format_rat(x: &Rat) -> String {
    if is_integer(x) {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse the wire format. Accepts `p`, `p/q` and surrounding whitespace.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
        Some((p, q)) => {
            let p = p.trim().parse::<BigInt>().ok()?;
            let q = q.trim().parse::<BigInt>().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rat::new(p, q))
            }
        }
    }
}
