//! Double-double arithmetic: an unevaluated sum of two `f64`s giving roughly
//! 32 significant decimal digits.
//!
//! The quadrature and product accumulations in this crate need more headroom
//! than `f64` offers, and every certified error bound downstream leans on the
//! working precision established here. Algorithms are the classical
//! error-free transformations (Knuth two-sum, Dekker split/product) plus
//! table-free Taylor kernels for the transcendentals; argument reduction for
//! trig uses a three-leg value of pi/2 so phases up to ~1e7 keep ~40 digits.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Copy, Clone, Debug, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

pub type DD = DoubleDouble;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    // 2^27 + 1; valid while |a| < 2^996, far beyond anything used here
    let t = 134217729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl DoubleDouble {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };
    pub const PI: DD = DD {
        hi: 3.141592653589793,
        lo: 1.2246467991473532e-16,
    };
    pub const TWO_PI: DD = DD {
        hi: 6.283185307179586,
        lo: 2.4492935982947064e-16,
    };
    pub const FRAC_PI_2: DD = DD {
        hi: 1.5707963267948966,
        lo: 6.123233995736766e-17,
    };
    pub const LN_2: DD = DD {
        hi: 0.6931471805599453,
        lo: 2.3190468138462996e-17,
    };

    /// Third legs extending the constants above for argument reduction.
    const PI_2_LO3: f64 = -1.4973849048591698e-33;
    const LN_2_LO3: f64 = 5.707708438416212e-34;

    /// Effective unit roundoff, 2^-106.
    pub const EPS: f64 = 1.232595164407831e-32;

    #[inline]
    pub fn new(hi: f64, lo: f64) -> DD {
        let (s, e) = quick_two_sum(hi, lo);
        DD { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(x: f64) -> DD {
        DD { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn from_u64(x: u64) -> DD {
        let hi = x as f64;
        // hi rounds to nearest; the residual fits in f64 exactly
        let lo = if hi >= 9.007199254740992e15 {
            let r = hi as u128;
            let x = x as u128;
            if x >= r {
                (x - r) as f64
            } else {
                -((r - x) as f64)
            }
        } else {
            0.0
        };
        DD::new(hi, lo)
    }

    #[inline]
    pub fn from_i64(x: i64) -> DD {
        if x < 0 {
            -DD::from_u64(x.unsigned_abs())
        } else {
            DD::from_u64(x as u64)
        }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn abs(self) -> DD {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn is_zero_dd(self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }

    /// Exact scaling by a power of two.
    #[inline]
    pub fn ldexp(self, k: i32) -> DD {
        let f = libm_exp2(k);
        DD {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn sqrt(self) -> DD {
        if self.is_zero_dd() {
            return DD::ZERO;
        }
        debug_assert!(self.hi > 0.0, "sqrt of negative double-double");
        // Karp/Markstein: one correction step from the f64 seed reaches full width
        let s = self.hi.sqrt();
        let sd = DD::from_f64(s);
        let e = (self - sd * sd) / (DD::from_f64(2.0) * sd);
        sd + e
    }

    pub fn powi(self, n: i32) -> DD {
        if n == 0 {
            return DD::ONE;
        }
        let mut base = if n < 0 { DD::ONE / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = DD::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn exp(self) -> DD {
        // e^x = 2^k * e^r with r = x - k ln 2, |r| <= (ln 2)/2
        if self.hi > 709.0 {
            return DD::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DD::ZERO;
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let mut r = self - DD::from_f64(k) * DD::LN_2;
        r = r - DD::from_f64(k * Self::LN_2_LO3);
        // Taylor with term recurrence; |r| < 0.35 so ~26 terms reach 2^-110
        let mut term = DD::ONE;
        let mut sum = DD::ONE;
        for i in 1..=26 {
            term = term * r / DD::from_f64(i as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        sum.ldexp(k as i32)
    }

    pub fn ln(self) -> DD {
        debug_assert!(self.hi > 0.0, "ln of non-positive double-double");
        // Newton on exp: y <- y + x e^-y - 1, started from the f64 log
        let mut y = DD::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - DD::ONE;
        }
        y
    }

    /// Reduce to `r` in [-pi/4, pi/4] with quadrant index mod 4.
    fn trig_reduce(self) -> (DD, i64) {
        let q = (self.hi * std::f64::consts::FRAC_2_PI).round();
        if q == 0.0 {
            return (self, 0);
        }
        debug_assert!(q.abs() < 9.0e15, "trig argument too large to reduce");
        // subtract q * pi/2 leg by leg, largest first, keeping each partial
        // product exact so the big cancellation costs no precision
        let (p1h, p1l) = two_prod(q, DD::FRAC_PI_2.hi);
        let (p2h, p2l) = two_prod(q, DD::FRAC_PI_2.lo);
        let mut r = self - DD::from_f64(p1h);
        r = r - DD::from_f64(p1l);
        r = r - DD::new(p2h, p2l);
        r = r - DD::from_f64(q * Self::PI_2_LO3);
        (r, (q as i64).rem_euclid(4))
    }

    fn sin_taylor(r: DD) -> DD {
        let r2 = r * r;
        let mut term = r;
        let mut sum = r;
        let mut k = 1.0f64;
        for _ in 0..16 {
            term = -term * r2 / DD::from_f64((k + 1.0) * (k + 2.0));
            k += 2.0;
            sum = sum + term;
            if term.hi.abs() < 1e-35 * (sum.hi.abs() + 1e-300) {
                break;
            }
        }
        sum
    }

    fn cos_taylor(r: DD) -> DD {
        let r2 = r * r;
        let mut term = DD::ONE;
        let mut sum = DD::ONE;
        let mut k = 0.0f64;
        for _ in 0..16 {
            term = -term * r2 / DD::from_f64((k + 1.0) * (k + 2.0));
            k += 2.0;
            sum = sum + term;
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        sum
    }

    pub fn sin(self) -> DD {
        let (r, q) = self.trig_reduce();
        match q {
            0 => Self::sin_taylor(r),
            1 => Self::cos_taylor(r),
            2 => -Self::sin_taylor(r),
            _ => -Self::cos_taylor(r),
        }
    }

    pub fn cos(self) -> DD {
        let (r, q) = self.trig_reduce();
        match q {
            0 => Self::cos_taylor(r),
            1 => -Self::sin_taylor(r),
            2 => -Self::cos_taylor(r),
            _ => Self::sin_taylor(r),
        }
    }
}

/// 2^k as f64 without string formatting; exact for |k| <= 1023.
#[inline]
fn libm_exp2(k: i32) -> f64 {
    f64::from_bits(((1023 + k.clamp(-1022, 1023)) as u64) << 52)
}

impl Add for DoubleDouble {
    type Output = DD;
    #[inline]
    fn add(self, o: DD) -> DD {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        DD { hi: s1, lo: s2 }
    }
}

impl Sub for DoubleDouble {
    type Output = DD;
    #[inline]
    fn sub(self, o: DD) -> DD {
        self + (-o)
    }
}

impl Neg for DoubleDouble {
    type Output = DD;
    #[inline]
    fn neg(self) -> DD {
        DD {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for DoubleDouble {
    type Output = DD;
    #[inline]
    fn mul(self, o: DD) -> DD {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let (s, e) = quick_two_sum(p1, p2 + self.hi * o.lo + self.lo * o.hi);
        DD { hi: s, lo: e }
    }
}

impl Div for DoubleDouble {
    type Output = DD;
    fn div(self, o: DD) -> DD {
        let q1 = self.hi / o.hi;
        let mut r = self - DD::from_f64(q1) * o;
        let q2 = r.hi / o.hi;
        r = r - DD::from_f64(q2) * o;
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        DD::new(s, e + q3)
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, o: &DD) -> bool {
        self.hi == o.hi && self.lo == o.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, o: &DD) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: DD, want_hi: f64, want_lo: f64, tol: f64) {
        let w = DD::new(want_hi, want_lo);
        let d = (a - w).abs().hi;
        let scale = w.hi.abs().max(1e-300);
        assert!(
            d / scale < tol,
            "got {:?}, want {:?} (rel err {:.3e})",
            a,
            w,
            d / scale
        );
    }

    #[test]
    fn add_mul_exact_cases() {
        let a = DD::from_f64(1.0) / DD::from_f64(3.0);
        let b = a + a + a;
        close(b, 1.0, 0.0, 1e-31);
        let c = DD::from_f64(0.1) * DD::from_f64(10.0);
        // 0.1 is not exactly representable; product differs from 1 at ~1e-17
        assert!((c - DD::ONE).abs().hi < 1e-16);
        let d = DD::from_u64(u64::MAX);
        close(d, 1.8446744073709552e19, -1.0, 1e-31);
    }

    #[test]
    fn division_and_sqrt() {
        let x = DD::from_f64(2.0).sqrt();
        close(x, 1.4142135623730951, -9.667293313452913e-17, 1e-31);
        let y = DD::from_f64(12345.6789).sqrt();
        close(y, 111.11111060555555, 5.570016418579378e-15, 1e-31);
        let z = x * x - DD::from_f64(2.0);
        assert!(z.abs().hi < 1e-31);
        let q = DD::ONE / DD::from_f64(7.0) * DD::from_f64(7.0);
        close(q, 1.0, 0.0, 1e-31);
    }

    #[test]
    fn exponential_and_log() {
        close(DD::ONE.exp(), 2.718281828459045, 1.4456468917292502e-16, 1e-30);
        close(
            DD::from_f64(10.0).exp(),
            22026.465794806718,
            -1.3780134700517372e-12,
            1e-30,
        );
        close(
            DD::from_f64(-3.5).exp(),
            0.0301973834223185,
            -1.2760102183793106e-19,
            1e-30,
        );
        close(
            DD::from_f64(0.125).exp(),
            1.1331484530668263,
            -5.370737708558031e-18,
            1e-30,
        );
        close(DD::from_f64(2.0).ln(), 0.6931471805599453, 2.3190468138462996e-17, 1e-30);
        close(DD::from_f64(7.0).ln(), 1.9459101490553132, 7.323586207904907e-17, 1e-30);
        close(DD::from_f64(1e6).ln(), 13.815510557964274, 4.739031053709008e-16, 1e-30);
        for &x in &[0.001, 0.5, 3.25, 55.0, 600.0] {
            let v = DD::from_f64(x);
            close(v.exp().ln(), x, 0.0, 1e-29);
        }
    }

    #[test]
    fn trig_small_arguments() {
        close(DD::ONE.sin(), 0.8414709848078965, 1.776845092935536e-18, 1e-30);
        close(DD::ONE.cos(), 0.5403023058681398, -4.760954612604417e-17, 1e-30);
        close(DD::from_f64(0.5).sin(), 0.479425538604203, -5.103969860556013e-18, 1e-30);
        close(
            DD::from_f64(3.140625).sin(),
            0.0009676534387822795,
            6.480677570817388e-21,
            1e-27,
        );
        close(
            DD::from_f64(1.5703125).cos(),
            0.0004838267760202487,
            1.0366074917108348e-20,
            1e-27,
        );
        close(DD::from_f64(-7.25).sin(), -0.8230808790115055, 4.782695371371335e-17, 1e-30);
        close(DD::from_f64(-7.25).cos(), 0.5679241732886948, 4.202033681904503e-17, 1e-30);
    }

    #[test]
    fn trig_large_arguments() {
        close(DD::from_f64(1e6).sin(), -0.34999350217129294, -1.5952848809323968e-17, 1e-28);
        close(DD::from_f64(1e6).cos(), 0.9367521275331447, 4.637088260214747e-17, 1e-28);
        close(
            DD::from_f64(123456.78125).sin(),
            -0.9990345494825916,
            -2.2073440927163793e-17,
            1e-27,
        );
        close(
            DD::from_f64(98765.4375).cos(),
            0.9988646465717863,
            -2.9788545804584046e-17,
            1e-27,
        );
    }

    #[test]
    fn pythagorean_identity_grid() {
        let mut x = -300.0f64;
        while x <= 300.0 {
            let v = DD::from_f64(x);
            let s = v.sin();
            let c = v.cos();
            let r = s * s + c * c - DD::ONE;
            assert!(r.abs().hi < 1e-30, "identity failed at x={x}: {r:?}");
            x += 7.3125;
        }
    }

    #[test]
    fn powi_matches_repeated_multiplication() {
        let x = DD::from_f64(1.5).sqrt();
        let mut acc = DD::ONE;
        for _ in 0..13 {
            acc = acc * x;
        }
        close(x.powi(13), acc.hi, acc.lo, 1e-30);
        close(x.powi(-3) * x.powi(3), 1.0, 0.0, 1e-30);
    }
}
