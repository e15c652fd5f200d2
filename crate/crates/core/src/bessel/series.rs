//! Ascending series for J_n(x) evaluated in exact rational arithmetic.
//!
//! The alternating series loses up to e^x of cancellation, which no fixed
//! floating precision survives uniformly; since x is a dyadic rational, every
//! partial sum is an exact rational and the only rounding happens in the
//! final conversion to double-double.

use crate::dd::DoubleDouble as DD;
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// log2 of |r|, approximately (integer-resolution is all we need).
fn bits(r: &BigRational) -> i64 {
    if r.numer().is_zero() {
        return i64::MIN / 2;
    }
    r.numer().bits() as i64 - r.denom().bits() as i64
}

/// Round num/den to double-double: shift so the integer quotient carries at
/// least ~220 bits, take the top 110 exactly, split into two doubles.
fn ratio_to_dd(r: &BigRational) -> DD {
    if r.numer().is_zero() {
        return DD::ZERO;
    }
    let negative = r.numer().sign() == Sign::Minus;
    let num = r.numer().abs();
    let den = r.denom().clone();
    let shift = 220i64 + (den.bits() as i64 - num.bits() as i64).max(0);
    let q: BigInt = (num << shift) / den;
    let qb = q.bits() as i64;
    let drop = (qb - 110).max(0);
    let top = (q >> drop).to_u128().expect("top word fits 128 bits");
    let hi = top as f64;
    let lo = (top as i128 - hi as i128) as f64;
    let v = DD::new(hi, lo).ldexp((drop - shift) as i32);
    if negative {
        -v
    } else {
        v
    }
}

/// Exact-series value of J_n(x) plus a bound on the truncation tail.
pub(crate) fn series_value(order: u32, x: f64) -> (DD, f64) {
    debug_assert!(x.is_finite() && x >= 0.0);
    if x == 0.0 {
        let v = if order == 0 { DD::ONE } else { DD::ZERO };
        return (v, 0.0);
    }
    let n = order as i64;
    let half = BigRational::from_float(x).expect("finite x") / BigInt::from(2);
    // leading term (x/2)^n / n!
    let mut fact = BigInt::from(1);
    for i in 2..=n {
        fact *= i;
    }
    let mut term = half.pow(order as i32) / fact;
    let mut sum = term.clone();
    let neg_half_sq = -(half.clone() * half.clone());
    let half_sq_f = (x / 2.0) * (x / 2.0);
    let mut peak = bits(&term);
    let mut j = 0i64;
    loop {
        term = term * neg_half_sq.clone() / BigInt::from((j + 1) * (n + j + 1));
        sum += term.clone();
        j += 1;
        let b = bits(&term);
        peak = peak.max(b);
        // past the growth peak and 280 bits below it: the tail is dominated
        // by a geometric series with ratio < 1/2
        if half_sq_f < ((j + 1) * (n + j + 1)) as f64 / 2.0 && b < peak - 280 {
            break;
        }
        debug_assert!(j < 5_000, "series failed to terminate");
    }
    let tail_bound = 2f64.powi((peak - 278).clamp(-1060, 0) as i32);
    (ratio_to_dd(&sum), tail_bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(order: u32, x: f64, want: f64, rel: f64) {
        let (v, tail) = series_value(order, x);
        let got = v.to_f64();
        assert!(
            (got - want).abs() <= rel * want.abs() + tail,
            "J_{order}({x}) = {got:e}, want {want:e}"
        );
    }

    #[test]
    fn series_anchor_values() {
        check(0, 0.5, 0.9384698072408129, 1e-14);
        check(1, 1.0, 0.44005058574493355, 1e-14);
        check(2, 1.0, 0.11490348493190048, 1e-14);
        check(7, 3.5, 0.006743000315638399, 1e-14);
        check(10, 12.0, 0.3004760352712693, 1e-14);
        check(21, 2.1, 5.186131403303314e-20, 1e-13);
        check(21, 10.5, 7.160430188889938e-6, 1e-13);
    }

    #[test]
    fn series_survives_heavy_cancellation() {
        // J_0(60): terms peak near 1e24 while the value is ~0.09; exactness
        // is what keeps the answer at full precision
        check(0, 60.0, -0.09147180408906187, 1e-13);
        check(5, 60.0, 0.0274547442283441, 1e-13);
    }

    #[test]
    fn ratio_to_dd_roundtrips() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(3));
        let v = ratio_to_dd(&r);
        let third = DD::ONE / DD::from_f64(3.0);
        assert!((v - third).abs().hi < 1e-31);
        let neg = BigRational::new(BigInt::from(-7), BigInt::from(16));
        assert_eq!(ratio_to_dd(&neg).to_f64(), -0.4375);
    }
}
