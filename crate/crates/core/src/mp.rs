//! Fixed-point complex arithmetic on big integers.
//!
//! The disentangled squeeze products sum terms that are many orders of
//! magnitude larger than the result, so their entries are accumulated with
//! a working precision chosen from the largest term.

use crate::C64;
use num_bigint::BigInt;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use std::ops::{Add, AddAssign, Neg, Sub};

/// Binary fixed point with `bits` fractional bits.
#[derive(Clone, Copy, Debug)]
pub struct Fixed {
    pub bits: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cx {
    pub re: BigInt,
    pub im: BigInt,
}

impl Fixed {
    pub fn new(bits: u32) -> Self {
        Self { bits }
    }

    /// Working precision that keeps `guard` bits below the unit when the
    /// largest intermediate magnitude is `2^max_log2`.
    pub fn for_range(max_log2: f64, guard: u32) -> Self {
        Self::new(guard + max_log2.max(0.0).ceil() as u32 + 8)
    }

    pub fn one(&self) -> BigInt {
        BigInt::from(1u8) << self.bits
    }

    pub fn from_f64(&self, x: f64) -> BigInt {
        let scaled = x * 2f64.powi(self.bits.min(1000) as i32);
        let v = BigInt::from_f64(scaled.trunc()).unwrap_or_else(BigInt::zero);
        if self.bits > 1000 {
            v << (self.bits - 1000)
        } else {
            v
        }
    }

    pub fn to_f64(&self, v: &BigInt) -> f64 {
        let keep = 100u32.min(self.bits);
        let shifted: BigInt = v >> (self.bits - keep);
        shifted.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(keep as i32))
    }

    pub fn from_int(&self, n: u64) -> BigInt {
        BigInt::from(n) << self.bits
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }

    pub fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.bits) / b
    }

    pub fn div_int(&self, a: &BigInt, n: u64) -> BigInt {
        a / BigInt::from(n)
    }

    pub fn sqrt(&self, a: &BigInt) -> BigInt {
        assert!(!a.is_negative(), "square root of a negative fixed-point value");
        (a << self.bits).sqrt()
    }

    /// sqrt(n) for a non-negative integer.
    pub fn sqrt_int(&self, n: u64) -> BigInt {
        (BigInt::from(n) << (2 * self.bits)).sqrt()
    }

    pub fn cx(&self, z: C64) -> Cx {
        Cx { re: self.from_f64(z.re), im: self.from_f64(z.im) }
    }

    pub fn cx_to_c64(&self, z: &Cx) -> C64 {
        C64::new(self.to_f64(&z.re), self.to_f64(&z.im))
    }

    pub fn cmul(&self, a: &Cx, b: &Cx) -> Cx {
        Cx {
            re: (&a.re * &b.re - &a.im * &b.im) >> self.bits,
            im: (&a.re * &b.im + &a.im * &b.re) >> self.bits,
        }
    }

    pub fn scale(&self, a: &Cx, s: &BigInt) -> Cx {
        Cx { re: self.mul(&a.re, s), im: self.mul(&a.im, s) }
    }

    pub fn scale_div_int(&self, a: &Cx, n: u64) -> Cx {
        Cx { re: self.div_int(&a.re, n), im: self.div_int(&a.im, n) }
    }
}

impl Cx {
    pub fn zero() -> Self {
        Cx { re: BigInt::zero(), im: BigInt::zero() }
    }
}

impl Add for &Cx {
    type Output = Cx;
    fn add(self, o: &Cx) -> Cx {
        Cx { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &Cx {
    type Output = Cx;
    fn sub(self, o: &Cx) -> Cx {
        Cx { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl AddAssign<&Cx> for Cx {
    fn add_assign(&mut self, o: &Cx) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx { re: -self.re, im: -self.im }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_and_arithmetic() {
        let fx = Fixed::new(200);
        let a = fx.from_f64(0.375);
        assert_eq!(fx.to_f64(&a), 0.375);
        let two = fx.sqrt_int(2);
        let back = fx.mul(&two, &two);
        assert!((fx.to_f64(&back) - 2.0).abs() < 1e-50);
        let q = fx.div(&fx.from_int(1), &fx.from_int(3));
        assert!((fx.to_f64(&q) - 1.0 / 3.0).abs() < 1e-16);
        let z = fx.cx(C64::new(0.5, -0.25));
        let w = fx.cmul(&z, &z);
        let e = C64::new(0.5, -0.25) * C64::new(0.5, -0.25);
        assert!((fx.cx_to_c64(&w) - e).norm() < 1e-16);
    }

    #[test]
    fn survives_large_cancellation() {
        let fx = Fixed::for_range(300.0, 64);
        let big = fx.from_int(1) << 300;
        let tiny = fx.from_f64(1e-10);
        let back = (&big + &tiny) - &big;
        assert!((fx.to_f64(&back) - 1e-10).abs() < 1e-25);
    }
}
