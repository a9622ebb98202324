//! Exact elements of cyclotomic fields Q(zeta_f), stored in the power basis
//! 1, zeta, ..., zeta^(phi(f)-1) modulo the f-th cyclotomic polynomial.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer as _;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};

/// The cyclotomic polynomial of one conductor, shared by all numbers that
/// live in that field.
pub(crate) struct Field {
    conductor: u32,
    /// Monic integer coefficients of Phi_f, lowest degree first.
    minpoly: Vec<i64>,
}

impl Field {
    fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }
}

fn cyclotomic_poly(f: u32, cache: &mut HashMap<u32, Arc<Field>>) -> Vec<i64> {
    if let Some(field) = cache.get(&f) {
        return field.minpoly.clone();
    }
    // x^f - 1 divided by Phi_d for every proper divisor d.
    let mut num = vec![0i64; f as usize + 1];
    num[0] = -1;
    num[f as usize] = 1;
    for d in 1..f {
        if f % d == 0 {
            let den = cyclotomic_poly(d, cache);
            cache.entry(d).or_insert_with(|| {
                Arc::new(Field {
                    conductor: d,
                    minpoly: den.clone(),
                })
            });
            num = div_exact_monic(&num, &den);
        }
    }
    num
}

fn div_exact_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] = rem[i + j]
                    .checked_sub(c.checked_mul(dj).expect("cyclotomic coefficient overflow"))
                    .expect("cyclotomic coefficient overflow");
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

pub(crate) fn field(f: u32) -> Arc<Field> {
    assert!(f >= 1, "conductor must be positive");
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Field>>>> = OnceLock::new();
    let mut cache = CACHE
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .expect("cyclotomic cache poisoned");
    if let Some(field) = cache.get(&f) {
        return field.clone();
    }
    let minpoly = cyclotomic_poly(f, &mut cache);
    let field = Arc::new(Field {
        conductor: f,
        minpoly,
    });
    cache.insert(f, field.clone());
    field
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// An exact element of Q(zeta_f), zeta_f = exp(2 pi i / f).
#[derive(Clone)]
pub struct CyclotomicNumber {
    field: Arc<Field>,
    coeffs: Vec<Rational>,
}

impl CyclotomicNumber {
    pub fn zero(conductor: u32) -> Self {
        let field = field(conductor);
        let n = field.degree();
        Self {
            field,
            coeffs: vec![Rational::new(); n],
        }
    }

    pub fn one(conductor: u32) -> Self {
        Self::from_rational(conductor, Rational::from(1))
    }

    pub fn from_rational(conductor: u32, value: Rational) -> Self {
        let mut out = Self::zero(conductor);
        out.coeffs[0] = value;
        out
    }

    pub fn from_int(conductor: u32, value: i64) -> Self {
        Self::from_rational(conductor, Rational::from(value))
    }

    /// zeta_f^k for any integer k.
    pub fn root_of_unity(conductor: u32, k: i64) -> Self {
        Self::from_power_terms(conductor, [(k, Rational::from(1))])
    }

    /// Sum of `a * zeta_f^k` over the given terms; exponents are taken mod f.
    pub fn from_power_terms<I>(conductor: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let f = conductor as i64;
        let mut dense = vec![Rational::new(); conductor as usize];
        for (k, a) in terms {
            dense[k.rem_euclid(f) as usize] += a;
        }
        Self::from_dense(conductor, dense)
    }

    /// Reduces an arbitrary-degree polynomial in zeta_f.
    pub fn from_dense(conductor: u32, mut poly: Vec<Rational>) -> Self {
        let field = field(conductor);
        reduce_in_place(&field, &mut poly);
        Self {
            field,
            coeffs: poly,
        }
    }

    /// Same as [`from_dense`](Self::from_dense) for integer coefficient vectors.
    pub fn from_dense_ints(conductor: u32, poly: &[i128]) -> Self {
        let field = field(conductor);
        let n = field.degree();
        let mut poly = poly.to_vec();
        for i in (n..poly.len()).rev() {
            let c = std::mem::take(&mut poly[i]);
            if c == 0 {
                continue;
            }
            for (j, &m) in field.minpoly[..n].iter().enumerate() {
                if m != 0 {
                    let t = poly[i - n + j]
                        .checked_sub(c * m as i128)
                        .expect("coefficient overflow in reduction");
                    poly[i - n + j] = t;
                }
            }
        }
        poly.truncate(n);
        let dense = poly
            .iter()
            .map(|&c| Rational::from(rug::Integer::from(c)))
            .collect();
        Self::from_dense(conductor, dense)
    }

    pub fn conductor(&self) -> u32 {
        self.field.conductor
    }

    /// Power-basis coefficients, length phi(f).
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| *q == 1)
    }

    /// Re-expresses the number in Q(zeta_{f'}); requires f | f'.
    pub fn embed(&self, target: u32) -> Result<Self> {
        let f = self.conductor();
        if target % f != 0 {
            return Err(Error::ConductorMismatch { from: f, to: target });
        }
        if target == f {
            return Ok(self.clone());
        }
        let step = (target / f) as usize;
        let mut dense = vec![Rational::new(); target as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            dense[i * step] = c.clone();
        }
        Ok(Self::from_dense(target, dense))
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let l = self.conductor().lcm(&other.conductor());
        (
            self.embed(l).expect("lcm is a multiple"),
            other.embed(l).expect("lcm is a multiple"),
        )
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| Rational::from(c * q)).collect(),
        }
    }

    /// Multiplicative inverse, by solving the multiplication-matrix system over Q.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(self.conductor(), q.clone().recip()));
        }
        let n = self.coeffs.len();
        let f = self.conductor();
        // Column j holds the coordinates of self * zeta^j.
        let mut rows: Vec<Vec<Rational>> = vec![vec![Rational::new(); n + 1]; n];
        for j in 0..n {
            let col = self * &Self::root_of_unity(f, j as i64);
            for (i, c) in col.coeffs.into_iter().enumerate() {
                rows[i][j] = c;
            }
        }
        rows[0][n] = Rational::from(1);
        let solution = solve_square(rows).ok_or(Error::DivisionByZero)?;
        Ok(Self {
            field: self.field.clone(),
            coeffs: solution,
        })
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one(self.conductor());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// The automorphism zeta_f -> zeta_f^d, gcd(d, f) = 1.
    pub fn galois(&self, d: i64) -> Result<Self> {
        let f = self.conductor() as i64;
        if d.gcd(&f) != 1 {
            return Err(Error::InvalidArgument(format!(
                "{d} is not a unit modulo {f}"
            )));
        }
        Ok(Self::from_power_terms(
            self.conductor(),
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i64 * d, c.clone())),
        ))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        let f = self.conductor() as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let a = c.to_f64();
            let t = 2.0 * std::f64::consts::PI * i as f64 / f;
            re += a * t.cos();
            im += a * t.sin();
        }
        (re, im)
    }

    /// Complex value at `prec` bits, with zeta_f = exp(2 pi i / f).
    pub fn to_complex(&self, prec: u32) -> Complex {
        let zeta = unit_root(self.conductor(), prec);
        let mut power = Complex::with_val(prec, 1);
        let mut acc = Complex::with_val(prec, 0);
        for c in &self.coeffs {
            if !c.is_zero() {
                acc += Complex::with_val(prec, &power * Float::with_val(prec, c));
            }
            power *= &zeta;
        }
        acc
    }
}

/// exp(2 pi i / f) at `prec` bits.
pub(crate) fn unit_root(f: u32, prec: u32) -> Complex {
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let angle = Float::with_val(prec, 2 * pi) / f;
    let (s, c) = angle.sin_cos(Float::new(prec));
    Complex::with_val(prec, (c, s))
}

fn reduce_in_place(field: &Field, poly: &mut Vec<Rational>) {
    let n = field.degree();
    for i in (n..poly.len()).rev() {
        if poly[i].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut poly[i]);
        for (j, &m) in field.minpoly[..n].iter().enumerate() {
            if m != 0 {
                poly[i - n + j] -= Rational::from(&c * m);
            }
        }
    }
    poly.resize(n, Rational::new());
}

/// Gaussian elimination on an augmented n x (n+1) system.
fn solve_square(mut rows: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let n = rows.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, pivot);
        let inv = rows[col][col].clone().recip();
        for x in rows[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= Rational::from(&factor * p);
            }
        }
    }
    Some(rows.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor() == other.conductor() {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.aligned(other);
        a.coeffs == b.coeffs
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo[f={}]({})", self.conductor(), self)
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                _ => write!(f, "({c})*z{}^{i}", self.conductor())?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&CyclotomicNumber> for CyclotomicNumber {
    fn add_assign(&mut self, rhs: &CyclotomicNumber) {
        if self.conductor() != rhs.conductor() {
            let (a, b) = self.aligned(rhs);
            *self = a;
            *self += &b;
            return;
        }
        for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *x += y;
        }
    }
}

impl SubAssign<&CyclotomicNumber> for CyclotomicNumber {
    fn sub_assign(&mut self, rhs: &CyclotomicNumber) {
        if self.conductor() != rhs.conductor() {
            let (a, b) = self.aligned(rhs);
            *self = a;
            *self -= &b;
            return;
        }
        for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *x -= y;
        }
    }
}

impl<'a> Mul<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        if self.conductor() != rhs.conductor() {
            let (a, b) = self.aligned(rhs);
            return &a * &b;
        }
        let n = self.coeffs.len();
        if n == 1 {
            return CyclotomicNumber {
                field: self.field.clone(),
                coeffs: vec![Rational::from(&self.coeffs[0] * &rhs.coeffs[0])],
            };
        }
        // Multiply integer numerators over a common denominator; Integer
        // arithmetic avoids a gcd per operation.
        let (an, ad) = integral_form(&self.coeffs);
        let (bn, bd) = integral_form(&rhs.coeffs);
        let mut prod = vec![Integer::new(); 2 * n - 1];
        for (i, a) in an.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in bn.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let m = &self.field.minpoly;
        for i in (n..prod.len()).rev() {
            if prod[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut prod[i]);
            for (j, &mj) in m[..n].iter().enumerate() {
                if mj != 0 {
                    prod[i - n + j] -= &c * mj;
                }
            }
        }
        prod.truncate(n);
        let den = ad * bd;
        CyclotomicNumber {
            field: self.field.clone(),
            coeffs: prod
                .into_iter()
                .map(|x| Rational::from((x, den.clone())))
                .collect(),
        }
    }
}

/// Integer numerators and common denominator of a rational vector.
fn integral_form(v: &[Rational]) -> (Vec<Integer>, Integer) {
    let mut den = Integer::from(1);
    for x in v {
        if *x.denom() != 1 {
            den.lcm_mut(x.denom());
        }
    }
    let nums = v
        .iter()
        .map(|x| {
            if den == 1 {
                x.numer().clone()
            } else {
                Integer::from(x.numer() * Integer::from(&den / x.denom()))
            }
        })
        .collect();
    (nums, den)
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(field(1).minpoly, vec![-1, 1]);
        assert_eq!(field(4).minpoly, vec![1, 0, 1]);
        assert_eq!(field(6).minpoly, vec![1, -1, 1]);
        assert_eq!(field(8).minpoly, vec![1, 0, 0, 0, 1]);
        assert_eq!(field(12).minpoly, vec![1, 0, -1, 0, 1]);
        assert_eq!(field(105).minpoly.len() - 1, 48);
        assert!(field(105).minpoly.contains(&-2));
    }

    #[test]
    fn embed_one_is_one() {
        for f in [1, 3, 8, 12, 288] {
            assert!(CyclotomicNumber::one(1).embed(f).unwrap().is_one());
        }
    }

    #[test]
    fn zeta4_is_zeta8_squared() {
        let z4 = CyclotomicNumber::root_of_unity(4, 1);
        let z8sq = CyclotomicNumber::root_of_unity(8, 2);
        assert_eq!(z4.embed(8).unwrap().coeffs(), z8sq.coeffs());
    }

    #[test]
    fn zeta3_plus_square_is_minus_one_in_q_zeta6() {
        let x = &CyclotomicNumber::root_of_unity(3, 1) + &CyclotomicNumber::root_of_unity(3, 2);
        let e = x.embed(6).unwrap();
        assert_eq!(e.as_rational(), Some(&Rational::from(-1)));
    }

    #[test]
    fn embed_rejects_non_multiple() {
        let x = CyclotomicNumber::root_of_unity(4, 1);
        assert_eq!(x.embed(6), Err(Error::ConductorMismatch { from: 4, to: 6 }));
    }

    #[test]
    fn roots_of_unity_multiply() {
        let a = CyclotomicNumber::root_of_unity(12, 5);
        let b = CyclotomicNumber::root_of_unity(12, 9);
        assert_eq!(&a * &b, CyclotomicNumber::root_of_unity(12, 2));
        assert!(CyclotomicNumber::root_of_unity(12, 12).is_one());
    }

    #[test]
    fn inverse_of_one_minus_zeta() {
        // 1/(1 - z) = -(1/N) sum k z^k for z^N = 1, z != 1.
        let n = 7u32;
        let x = &CyclotomicNumber::one(n) - &CyclotomicNumber::root_of_unity(n, 1);
        let expected = CyclotomicNumber::from_power_terms(
            n,
            (0..n as i64).map(|k| (k, q(-k, n as i64))),
        );
        assert_eq!(x.inv().unwrap(), expected);
        assert!((&x * &expected).is_one());
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(CyclotomicNumber::zero(5).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn galois_conjugation() {
        let x = &CyclotomicNumber::root_of_unity(8, 1) + &CyclotomicNumber::from_int(8, 3);
        let y = x.galois(5).unwrap();
        assert_eq!(
            y,
            &CyclotomicNumber::root_of_unity(8, 5) + &CyclotomicNumber::from_int(8, 3)
        );
        assert!(x.galois(2).is_err());
    }

    #[test]
    fn euler_phi_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(288), 96);
    }

    #[test]
    fn complex_value() {
        let x = CyclotomicNumber::root_of_unity(8, 1);
        let c = x.to_complex(200);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((c.real().to_f64() - h).abs() < 1e-15);
        assert!((c.imag().to_f64() - h).abs() < 1e-15);
    }
}
