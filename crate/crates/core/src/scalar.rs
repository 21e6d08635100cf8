//! Multiprecision real and complex scalars.

use rug::float::Constant;
pub use rug::Float;
use std::fmt;

/// Real number at `bits` of precision.
pub fn real(bits: u32, v: f64) -> Float {
    Float::with_val(bits, v)
}

pub fn pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi)
}

/// Full-precision decimal rendering, enough digits to round-trip.
pub fn to_decimal(x: &Float) -> String {
    let digits = (f64::from(x.prec()) * std::f64::consts::LOG10_2).ceil() as usize + 2;
    x.to_string_radix(10, Some(digits))
}

pub fn parse_decimal(bits: u32, s: &str) -> Option<Float> {
    Float::parse(s).ok().map(|p| Float::with_val(bits, p))
}

#[derive(Clone, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:e}, {:e})", self.re.to_f64(), self.im.to_f64())
    }
}

impl Complex {
    pub fn zero(bits: u32) -> Self {
        Complex { re: Float::new(bits), im: Float::new(bits) }
    }

    pub fn one(bits: u32) -> Self {
        Complex::from_f64(bits, 1.0, 0.0)
    }

    pub fn from_f64(bits: u32, re: f64, im: f64) -> Self {
        Complex { re: real(bits, re), im: real(bits, im) }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Complex { re, im }
    }

    /// e^{iθ}
    pub fn cis(theta: &Float) -> Self {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        Complex { re: c, im: s }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> Float {
        let mut n = Float::with_val(self.prec(), self.re.square_ref());
        n += &self.im * &self.im;
        n
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn conj(&self) -> Self {
        Complex { re: self.re.clone(), im: Float::with_val(self.prec(), -&self.im) }
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        let b = self.prec();
        let mut re = Float::with_val(b, &self.re * &o.re);
        re -= &self.im * &o.im;
        let mut im = Float::with_val(b, &self.re * &o.im);
        im += &self.im * &o.re;
        Complex { re, im }
    }

    pub fn add(&self, o: &Complex) -> Complex {
        let b = self.prec();
        Complex { re: Float::with_val(b, &self.re + &o.re), im: Float::with_val(b, &self.im + &o.im) }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        let b = self.prec();
        Complex { re: Float::with_val(b, &self.re - &o.re), im: Float::with_val(b, &self.im - &o.im) }
    }

    pub fn scale(&self, s: &Float) -> Complex {
        let b = self.prec();
        Complex { re: Float::with_val(b, &self.re * s), im: Float::with_val(b, &self.im * s) }
    }

    /// Multiply by i.
    pub fn mul_i(&self) -> Complex {
        Complex { re: Float::with_val(self.prec(), -&self.im), im: self.re.clone() }
    }

    pub fn div(&self, o: &Complex) -> Complex {
        let d = o.norm_sqr();
        let n = self.mul(&o.conj());
        Complex { re: n.re / &d, im: n.im / &d }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn with_prec(&self, bits: u32) -> Complex {
        Complex { re: Float::with_val(bits, &self.re), im: Float::with_val(bits, &self.im) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_arithmetic() {
        let a = Complex::from_f64(128, 1.0, 2.0);
        let b = Complex::from_f64(128, 3.0, -1.0);
        assert_eq!(a.mul(&b).to_f64(), (5.0, 5.0));
        let q = a.mul(&b).div(&b);
        assert!((q.re.to_f64() - 1.0).abs() < 1e-30 && (q.im.to_f64() - 2.0).abs() < 1e-30);
        assert_eq!(a.mul_i().to_f64(), (-2.0, 1.0));
    }

    #[test]
    fn decimal_round_trip() {
        let x = Float::with_val(384, 2).sqrt() / 7;
        let s = to_decimal(&x);
        assert_eq!(parse_decimal(384, &s).unwrap(), x);
    }
}
