//! Scalar abstraction so the numeric kernels (exponential-sum accumulation,
//! quadrature, series) can run at either native or extended precision.

use crate::dd::DoubleDouble;
use num_traits::{One, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + Clone
    + PartialEq
    + PartialOrd
    + std::fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn from_u64(x: u64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn pi() -> Self;
    fn two_pi() -> Self;
    /// Unit roundoff used when charging accumulation error.
    fn unit_roundoff() -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(x: f64) -> f64 {
        x
    }
    #[inline]
    fn from_u64(x: u64) -> f64 {
        x as f64
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
    #[inline]
    fn sin(self) -> f64 {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> f64 {
        f64::cos(self)
    }
    #[inline]
    fn exp(self) -> f64 {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> f64 {
        f64::ln(self)
    }
    #[inline]
    fn powi(self, n: i32) -> f64 {
        f64::powi(self, n)
    }
    #[inline]
    fn pi() -> f64 {
        std::f64::consts::PI
    }
    #[inline]
    fn two_pi() -> f64 {
        std::f64::consts::TAU
    }
    #[inline]
    fn unit_roundoff() -> f64 {
        f64::EPSILON * 0.5
    }
}

impl Scalar for DoubleDouble {
    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    #[inline]
    fn from_u64(x: u64) -> Self {
        DoubleDouble::from_u64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    #[inline]
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    #[inline]
    fn sin(self) -> Self {
        DoubleDouble::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        DoubleDouble::cos(self)
    }
    #[inline]
    fn exp(self) -> Self {
        DoubleDouble::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        DoubleDouble::ln(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        DoubleDouble::powi(self, n)
    }
    #[inline]
    fn pi() -> Self {
        DoubleDouble::PI
    }
    #[inline]
    fn two_pi() -> Self {
        DoubleDouble::TWO_PI
    }
    #[inline]
    fn unit_roundoff() -> f64 {
        DoubleDouble::EPS
    }
}

impl Zero for DoubleDouble {
    #[inline]
    fn zero() -> Self {
        DoubleDouble::ZERO
    }
    #[inline]
    fn is_zero(&self) -> bool {
        self.is_zero_dd()
    }
}

impl One for DoubleDouble {
    #[inline]
    fn one() -> Self {
        DoubleDouble::ONE
    }
}
