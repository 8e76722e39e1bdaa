//! Integer helpers shared across the crate: generalized binomial
//! coefficients and decimal-string conversions for JSON interchange.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Generalized binomial coefficient `C(x, r) = x(x-1)...(x-r+1) / r!`,
/// defined for any integer `x` and nonnegative `r`.
pub fn binomial(x: &BigInt, r: u64) -> BigInt {
    let mut num = BigInt::one();
    for t in 0..r {
        num *= x - BigInt::from(t);
    }
    for t in 1..=r {
        num /= BigInt::from(t);
    }
    num
}

/// `C(x, r)` for machine-sized `x`.
pub fn binomial_i64(x: i64, r: u64) -> BigInt {
    binomial(&BigInt::from(x), r)
}

/// `C(n, r)` for nonnegative arguments, as an unsigned big integer.
pub fn binomial_u64(n: u64, r: u64) -> BigUint {
    binomial_i64(n as i64, r)
        .to_biguint()
        .expect("binomial of nonnegative arguments is nonnegative")
}

/// Renders a big integer as the decimal string used in all JSON formats.
pub fn to_decimal(n: &BigInt) -> String {
    n.to_str_radix(10)
}

pub fn biguint_to_decimal(n: &BigUint) -> String {
    n.to_str_radix(10)
}

/// Parses the decimal-string encoding back into a big integer.
pub fn from_decimal(s: &str) -> Result<BigInt> {
    s.parse::<BigInt>()
        .map_err(|e| Error::Json(format!("bad decimal string {s:?}: {e}")))
}

pub fn biguint_from_decimal(s: &str) -> Result<BigUint> {
    let n = from_decimal(s)?;
    n.to_biguint()
        .ok_or_else(|| Error::Json(format!("expected nonnegative decimal string, got {s:?}")))
}

/// Largest power of two dividing `n`; `None` for `n = 0`.
pub fn two_adic_valuation(n: &BigUint) -> Option<u64> {
    if n.is_zero() {
        None
    } else {
        Some(n.trailing_zeros().unwrap_or(0))
    }
}

/// `|x|` component sums are used as word-length budgets in several places.
pub fn l1_norm(xs: &[BigInt]) -> BigUint {
    let mut acc = BigUint::zero();
    for x in xs {
        acc += x.abs().to_biguint().unwrap();
    }
    acc
}
