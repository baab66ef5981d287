//! Conversions between exact big-integer arithmetic and floating point.
//!
//! Count tables routinely hold values far beyond the range of `f64`
//! (e.g. factorials past 170!), so ratios are converted by normalizing
//! numerator and denominator separately and tracking the binary exponent.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Mantissa/exponent split: returns `(m, e)` with `x ≈ m * 2^e` and
/// `m` carrying the top 64 bits of `x`.
fn split(x: &BigUint) -> (f64, i64) {
    let bits = x.bits();
    if bits <= 64 {
        (x.to_u64().unwrap() as f64, 0)
    } else {
        let shift = bits - 64;
        let top: BigUint = x >> shift;
        (top.to_u64().unwrap() as f64, shift as i64)
    }
}

/// `num / den` as `f64`, correct to f64 precision even when both sides
/// overflow `f64` on their own. Returns 0.0 for a zero numerator,
/// infinity for a zero denominator.
pub fn biguint_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    if den.is_zero() {
        return f64::INFINITY;
    }
    let (mn, en) = split(num);
    let (md, ed) = split(den);
    let delta = en - ed;
    if delta > 2000 {
        return f64::INFINITY;
    }
    if delta < -2000 {
        return 0.0;
    }
    (mn / md) * (delta as f64).exp2()
}

/// Exact rational to nearest `f64`, via [`biguint_ratio_to_f64`].
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let v = biguint_ratio_to_f64(
        r.numer().abs().to_biguint().as_ref().unwrap(),
        r.denom().abs().to_biguint().as_ref().unwrap(),
    );
    if r.is_negative() {
        -v
    } else {
        v
    }
}

/// Rational from a non-negative big integer.
pub fn rational_from_biguint(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}
