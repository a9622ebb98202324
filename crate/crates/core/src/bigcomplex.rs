//! Arbitrary-precision complex numbers carrying their working precision.

use std::ops::{Add, Div, Mul, Sub};

use rug::float::Round;
use rug::ops::CompleteRound;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary precision used for `digits` decimal digits, with guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    value: Complex,
    digits: u32,
}

impl BigComplex {
    pub fn new(value: Complex, digits: u32) -> Self {
        let prec = bits_for_digits(digits);
        let value = if value.prec() == (prec, prec) {
            value
        } else {
            Complex::with_val(prec, value)
        };
        Self { value, digits }
    }

    pub fn from_f64(re: f64, im: f64, digits: u32) -> Self {
        Self::new(Complex::with_val(bits_for_digits(digits), (re, im)), digits)
    }

    /// Parses decimal strings for the real and imaginary parts.
    pub fn parse(re: &str, im: &str, digits: u32) -> Result<Self> {
        let prec = bits_for_digits(digits);
        let parse = |s: &str| {
            Float::parse(s.trim())
                .map(|p| p.complete(prec))
                .map_err(|e| Error::Parse(format!("decimal {s:?}: {e}")))
        };
        Ok(Self::new(
            Complex::with_val(prec, (parse(re)?, parse(im)?)),
            digits,
        ))
    }

    pub fn value(&self) -> &Complex {
        &self.value
    }

    pub fn into_value(self) -> Complex {
        self.value
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn prec(&self) -> u32 {
        self.value.prec().0
    }

    pub fn re(&self) -> &Float {
        self.value.real()
    }

    pub fn im(&self) -> &Float {
        self.value.imag()
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.value.abs_ref())
    }

    /// log10 |z|, or -inf for zero.
    pub fn log10_abs(&self) -> f64 {
        let a = self.abs();
        if a.is_zero() {
            return f64::NEG_INFINITY;
        }
        a.log10().to_f64()
    }

    /// Relative distance |a - b| / max(|a|, |b|) as log10.
    pub fn log10_rel_diff(&self, other: &Self) -> f64 {
        let d = (self - other).log10_abs();
        let m = self.log10_abs().max(other.log10_abs());
        if m.is_finite() {
            d - m
        } else {
            d
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn re_string(&self) -> String {
        decimal(self.re(), self.digits)
    }

    pub fn im_string(&self) -> String {
        decimal(self.im(), self.digits)
    }
}

pub(crate) fn decimal(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix_round(10, Some(digits as usize), Round::Nearest)
}

#[derive(Serialize, Deserialize)]
struct BigComplexJson {
    re: String,
    im: String,
    digits: u32,
}

impl Serialize for BigComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BigComplexJson {
            re: self.re_string(),
            im: self.im_string(),
            digits: self.digits,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BigComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = BigComplexJson::deserialize(d)?;
        BigComplex::parse(&j.re, &j.im, j.digits).map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl<'a> $tr<&'a BigComplex> for &'a BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &BigComplex) -> BigComplex {
                let digits = self.digits.max(rhs.digits);
                let prec = bits_for_digits(digits);
                let v = Complex::with_val(prec, (&self.value).$m(&rhs.value));
                BigComplex { value: v, digits }
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let z = BigComplex::parse("1.25", "-3.5", 60).unwrap();
        let text = serde_json::to_string(&z).unwrap();
        let back: BigComplex = serde_json::from_str(&text).unwrap();
        assert!(back.log10_rel_diff(&z) < -50.0);
        assert!(text.contains("\"digits\":60"));
    }

    #[test]
    fn mixed_precision_uses_max() {
        let a = BigComplex::from_f64(1.0, 0.0, 50);
        let b = BigComplex::from_f64(2.0, 0.0, 200);
        assert_eq!((&a + &b).digits(), 200);
    }
}
