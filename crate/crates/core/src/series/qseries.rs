//! Sparse truncated Puiseux series in q^(1/M) with cyclotomic coefficients.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use rug::{Complex, Float, Rational};

use super::cyclotomic::{unit_root, CyclotomicNumber};
use crate::error::{Error, Result};

/// Exponents and truncation orders are small rationals.
pub type Exponent = Ratio<i64>;

pub fn exponent(n: i64, d: i64) -> Exponent {
    Ratio::new(n, d)
}

/// `sum c_e q^e + O(q^trunc)` with every exponent in (1/denom) Z.
///
/// Exponents are stored as integer numerators over `denom`. All coefficients
/// share one conductor and every stored key is below `trunc`.
#[derive(Clone, Debug)]
pub struct QSeries {
    denom: i64,
    conductor: u32,
    coeffs: BTreeMap<i64, CyclotomicNumber>,
    trunc: i64,
}

impl QSeries {
    pub fn zero(trunc: Exponent) -> Self {
        Self {
            denom: *trunc.denom(),
            conductor: 1,
            coeffs: BTreeMap::new(),
            trunc: *trunc.numer(),
        }
    }

    pub fn one(trunc: Exponent) -> Self {
        Self::constant(CyclotomicNumber::one(1), trunc)
    }

    pub fn constant(c: CyclotomicNumber, trunc: Exponent) -> Self {
        Self::monomial(c, Exponent::from_integer(0), trunc)
    }

    pub fn monomial(c: CyclotomicNumber, exp: Exponent, trunc: Exponent) -> Self {
        Self::from_terms([(exp, c)], trunc)
    }

    /// Builds a series from (exponent, coefficient) pairs; repeated exponents
    /// are summed and terms at or beyond `trunc` are dropped.
    pub fn from_terms<I>(terms: I, trunc: Exponent) -> Self
    where
        I: IntoIterator<Item = (Exponent, CyclotomicNumber)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let denom = terms
            .iter()
            .fold(*trunc.denom(), |m, (e, _)| m.lcm(e.denom()));
        let conductor = terms.iter().fold(1u32, |f, (_, c)| f.lcm(&c.conductor()));
        let mut map: BTreeMap<i64, CyclotomicNumber> = BTreeMap::new();
        for (e, c) in terms {
            let key = e.numer() * (denom / e.denom());
            let c = c.embed(conductor).expect("lcm conductor");
            match map.get_mut(&key) {
                Some(x) => *x += &c,
                None => {
                    map.insert(key, c);
                }
            }
        }
        Self::from_raw(denom, conductor, map, trunc.numer() * (denom / trunc.denom()))
    }

    /// Crate-internal constructor from grid keys. Coefficients must already
    /// live in `conductor`; zero and out-of-range terms are dropped.
    pub(crate) fn from_raw(
        denom: i64,
        conductor: u32,
        mut coeffs: BTreeMap<i64, CyclotomicNumber>,
        trunc: i64,
    ) -> Self {
        coeffs.retain(|&k, c| k < trunc && !c.is_zero());
        debug_assert!(coeffs.values().all(|c| c.conductor() == conductor));
        Self {
            denom,
            conductor,
            coeffs,
            trunc,
        }
        .normalized()
    }

    /// Shrinks the exponent grid to the coarsest one carrying every key.
    fn normalized(mut self) -> Self {
        let g = self
            .coeffs
            .keys()
            .fold(self.denom.gcd(&self.trunc), |g, k| g.gcd(k));
        if g > 1 {
            self.denom /= g;
            self.trunc /= g;
            self.coeffs = std::mem::take(&mut self.coeffs)
                .into_iter()
                .map(|(k, c)| (k / g, c))
                .collect();
        }
        self
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn trunc(&self) -> Exponent {
        Ratio::new(self.trunc, self.denom)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of q^e; `e` must lie below the truncation order.
    pub fn coeff(&self, e: Exponent) -> CyclotomicNumber {
        debug_assert!(
            e < self.trunc(),
            "coefficient of q^{e} requested but series is only known to O(q^{})",
            self.trunc()
        );
        let scaled = e * self.denom;
        if !scaled.is_integer() {
            return CyclotomicNumber::zero(self.conductor);
        }
        self.coeffs
            .get(&scaled.to_integer())
            .cloned()
            .unwrap_or_else(|| CyclotomicNumber::zero(self.conductor))
    }

    /// Rational value of the coefficient at q^e, if it is rational.
    pub fn coeff_rational(&self, e: Exponent) -> Option<Rational> {
        self.coeff(e).as_rational().cloned()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &CyclotomicNumber)> + '_ {
        self.coeffs
            .iter()
            .map(move |(&k, c)| (Ratio::new(k, self.denom), c))
    }

    pub fn leading(&self) -> Option<(Exponent, &CyclotomicNumber)> {
        self.terms().next()
    }

    pub fn leading_exponent(&self) -> Option<Exponent> {
        self.leading().map(|(e, _)| e)
    }

    /// Leading exponent, or the truncation order for a series that is zero
    /// as far as it is known.
    pub fn valuation(&self) -> Exponent {
        self.leading_exponent().unwrap_or_else(|| self.trunc())
    }

    /// True when every coefficient is a rational integer.
    pub fn has_integer_coefficients(&self) -> bool {
        self.coeffs
            .values()
            .all(|c| c.as_rational().is_some_and(|q| *q.denom() == 1))
    }

    fn regrid(&self, denom: i64) -> Self {
        debug_assert_eq!(denom % self.denom, 0);
        let m = denom / self.denom;
        Self {
            denom,
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|(&k, c)| (k * m, c.clone())).collect(),
            trunc: self.trunc * m,
        }
    }

    fn with_conductor(&self, f: u32) -> Self {
        if f == self.conductor {
            return self.clone();
        }
        Self {
            denom: self.denom,
            conductor: f,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&k, c)| (k, c.embed(f).expect("lcm conductor")))
                .collect(),
            trunc: self.trunc,
        }
    }

    fn aligned<'a>(&'a self, other: &'a Self) -> (Cow<'a, Self>, Cow<'a, Self>) {
        let m = self.denom.lcm(&other.denom);
        let f = self.conductor.lcm(&other.conductor);
        let fix = |s: &'a Self| {
            if s.denom == m && s.conductor == f {
                Cow::Borrowed(s)
            } else {
                Cow::Owned(s.regrid(m).with_conductor(f))
            }
        };
        (fix(self), fix(other))
    }

    /// Drops every term at or beyond `t`; `t` may not exceed the current order.
    pub fn truncate(&self, t: Exponent) -> Self {
        assert!(t <= self.trunc(), "cannot extend a truncated series");
        let m = self.denom.lcm(t.denom());
        let s = self.regrid(m);
        Self::from_raw(m, s.conductor, s.coeffs, t.numer() * (m / t.denom()))
    }

    pub fn scale(&self, c: &CyclotomicNumber) -> Self {
        let f = self.conductor.lcm(&c.conductor());
        let c = c.embed(f).expect("lcm conductor");
        let s = self.with_conductor(f);
        let coeffs = s.coeffs.iter().map(|(&k, x)| (k, x * &c)).collect();
        Self::from_raw(s.denom, f, coeffs, s.trunc)
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|(&k, x)| (k, x.scale(q))).collect();
        Self::from_raw(self.denom, self.conductor, coeffs, self.trunc)
    }

    /// Multiplies by q^e.
    pub fn shift(&self, e: Exponent) -> Self {
        let m = self.denom.lcm(e.denom());
        let s = self.regrid(m);
        let d = e.numer() * (m / e.denom());
        let coeffs = s.coeffs.into_iter().map(|(k, c)| (k + d, c)).collect();
        Self::from_raw(m, s.conductor, coeffs, s.trunc + d)
    }

    /// Substitutes q -> q^r (tau -> r tau) for a positive rational r.
    pub fn rescale(&self, r: Exponent) -> Self {
        assert!(r > Ratio::from_integer(0), "rescale factor must be positive");
        let (p, s) = (*r.numer(), *r.denom());
        let coeffs = self.coeffs.iter().map(|(&k, c)| (k * p, c.clone())).collect();
        Self::from_raw(self.denom * s, self.conductor, coeffs, self.trunc * p)
    }

    /// Applies zeta_f -> zeta_f^d to every coefficient; the identity on series
    /// with rational coefficients.
    pub fn galois(&self, d: i64) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (&k, c) in &self.coeffs {
            coeffs.insert(k, c.galois(d)?);
        }
        Ok(Self::from_raw(self.denom, self.conductor, coeffs, self.trunc))
    }

    /// Splits off the leading term: returns (e0, c0, unit part on the lattice
    /// step g, relative truncation in steps).
    fn unit_decomposition(&self) -> Result<(i64, CyclotomicNumber, i64, Vec<(i64, CyclotomicNumber)>, i64)> {
        let (&e0, c0) = self
            .coeffs
            .iter()
            .next()
            .ok_or(Error::ZeroLeadingCoefficient)?;
        let rel_trunc = self.trunc - e0;
        let g = self
            .coeffs
            .keys()
            .fold(rel_trunc, |g, &k| g.gcd(&(k - e0)))
            .max(1);
        let c0_inv = c0.inv()?;
        let unit: Vec<(i64, CyclotomicNumber)> = self
            .coeffs
            .iter()
            .skip(1)
            .map(|(&k, c)| ((k - e0) / g, c * &c0_inv))
            .collect();
        let steps = (rel_trunc + g - 1) / g;
        Ok((e0, c0.clone(), g, unit, steps))
    }

    /// Multiplicative inverse; the result has leading exponent equal to minus
    /// the leading exponent of `self`.
    pub fn inv(&self) -> Result<Self> {
        let (e0, c0, g, unit, steps) = self.unit_decomposition()?;
        let f = self.conductor;
        // b = 1/u with u = 1 + sum unit_k t^k, t = q^(g/denom).
        let mut b: Vec<CyclotomicNumber> = Vec::with_capacity(steps as usize);
        for n in 0..steps {
            if n == 0 {
                b.push(CyclotomicNumber::one(f));
                continue;
            }
            let mut acc = CyclotomicNumber::zero(f);
            for (k, u) in &unit {
                if *k > n {
                    break;
                }
                let prev = &b[(n - k) as usize];
                if !prev.is_zero() {
                    acc -= &(u * prev);
                }
            }
            b.push(acc);
        }
        let c0_inv = c0.inv()?;
        let coeffs = b
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| (n as i64 * g - e0, &c * &c0_inv))
            .collect();
        Ok(Self::from_raw(self.denom, f, coeffs, self.trunc - 2 * e0))
    }

    /// Integer power; negative powers need an invertible leading coefficient.
    /// Resulting order is (k - 1) * leading exponent + trunc.
    pub fn pow(&self, k: i64) -> Result<Self> {
        if self.is_zero() {
            if k > 0 {
                return Ok(Self::zero(self.trunc() * k));
            }
            return Err(Error::ZeroLeadingCoefficient);
        }
        let (e0, c0, g, unit, steps) = self.unit_decomposition()?;
        let f = self.conductor;
        // Power recurrence n G_n = sum_j ((k+1) j - n) u_j G_{n-j}.
        let mut out: Vec<CyclotomicNumber> = Vec::with_capacity(steps as usize);
        for n in 0..steps {
            if n == 0 {
                out.push(CyclotomicNumber::one(f));
                continue;
            }
            let mut acc = CyclotomicNumber::zero(f);
            for (j, u) in &unit {
                if *j > n {
                    break;
                }
                let prev = &out[(n - j) as usize];
                if prev.is_zero() {
                    continue;
                }
                let w = (k + 1) * j - n;
                if w != 0 {
                    acc += &(u * prev).scale(&Rational::from(w));
                }
            }
            out.push(acc.scale(&Rational::from((1, n))));
        }
        let lead = c0.pow(k)?;
        let coeffs = out
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| (n as i64 * g + k * e0, &c * &lead))
            .collect();
        Ok(Self::from_raw(
            self.denom,
            f,
            coeffs,
            (k - 1) * e0 + self.trunc,
        ))
    }

    /// Exact coefficientwise equality together with equal truncation orders.
    pub fn same_as(&self, other: &Self) -> bool {
        self.trunc() == other.trunc() && (self - other).is_zero()
    }

    /// Evaluates the truncated sum at q = exp(2 pi i tau).
    pub fn eval(&self, tau: &Complex) -> Complex {
        let prec = tau.prec().0;
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        // w = q^(1/denom)
        let arg = Complex::with_val(prec, tau * Complex::with_val(prec, (0, 2 * pi))) / self.denom;
        let w = arg.exp();
        let zeta = unit_root(self.conductor, prec);
        let phi = self
            .coeffs
            .values()
            .next()
            .map_or(1, |c| c.coeffs().len());
        let mut zeta_pows = Vec::with_capacity(phi);
        let mut z = Complex::with_val(prec, 1);
        for _ in 0..phi {
            zeta_pows.push(z.clone());
            z *= &zeta;
        }
        let mut acc = Complex::with_val(prec, 0);
        for (&k, c) in &self.coeffs {
            let mut cv = Complex::with_val(prec, 0);
            for (a, zp) in c.coeffs().iter().zip(&zeta_pows) {
                if !a.is_zero() {
                    cv += Complex::with_val(prec, zp * Float::with_val(prec, a));
                }
            }
            let wk = Complex::with_val(prec, rug::ops::Pow::pow(&w, k as i32));
            acc += cv * wk;
        }
        acc
    }
}

fn binary<F>(a: &QSeries, b: &QSeries, trunc: i64, op: F) -> QSeries
where
    F: Fn(&mut CyclotomicNumber, &CyclotomicNumber),
{
    let mut map = a.coeffs.clone();
    for (&k, c) in &b.coeffs {
        if k >= trunc {
            break;
        }
        match map.get_mut(&k) {
            Some(x) => op(x, c),
            None => {
                let mut z = CyclotomicNumber::zero(a.conductor);
                op(&mut z, c);
                map.insert(k, z);
            }
        }
    }
    QSeries::from_raw(a.denom, a.conductor, map, trunc)
}

impl<'a> Add<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        let (a, b) = self.aligned(rhs);
        let t = a.trunc.min(b.trunc);
        binary(&a, &b, t, |x, y| *x += y)
    }
}

impl<'a> Sub<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        let (a, b) = self.aligned(rhs);
        let t = a.trunc.min(b.trunc);
        binary(&a, &b, t, |x, y| *x -= y)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            denom: self.denom,
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|(&k, c)| (k, -c)).collect(),
            trunc: self.trunc,
        }
    }
}

impl<'a> Mul<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        let (a, b) = self.aligned(rhs);
        let va = a.coeffs.keys().next().copied().unwrap_or(a.trunc);
        let vb = b.coeffs.keys().next().copied().unwrap_or(b.trunc);
        let trunc = (va + b.trunc).min(vb + a.trunc);
        let mut acc: BTreeMap<i64, CyclotomicNumber> = BTreeMap::new();
        for (&ka, ca) in &a.coeffs {
            if ka + vb >= trunc {
                break;
            }
            for (&kb, cb) in &b.coeffs {
                let k = ka + kb;
                if k >= trunc {
                    break;
                }
                let p = ca * cb;
                match acc.get_mut(&k) {
                    Some(x) => *x += &p,
                    None => {
                        acc.insert(k, p);
                    }
                }
            }
        }
        QSeries::from_raw(a.denom, a.conductor, acc, trunc)
    }
}

impl PartialEq for QSeries {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in self.terms() {
            let cs = match c.as_rational() {
                Some(q) => q.to_string(),
                None => format!("({c})"),
            };
            if *e.numer() == 0 {
                write!(f, "{cs} + ")?;
            } else {
                write!(f, "{cs}*q^({e}) + ")?;
            }
        }
        write!(f, "O(q^({}))", self.trunc())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> CyclotomicNumber {
        CyclotomicNumber::from_int(1, n)
    }

    fn e(n: i64) -> Exponent {
        Exponent::from_integer(n)
    }

    fn poly(cs: &[i64], trunc: i64) -> QSeries {
        QSeries::from_terms(
            cs.iter().enumerate().map(|(i, &c)| (e(i as i64), int(c))),
            e(trunc),
        )
    }

    #[test]
    fn add_j_pieces() {
        let a = QSeries::from_terms([(e(-1), int(1)), (e(0), int(744))], e(5));
        let b = QSeries::monomial(int(196884), e(1), e(5));
        let s = &a + &b;
        assert_eq!(s.coeff_rational(e(-1)).unwrap(), 1);
        assert_eq!(s.coeff_rational(e(0)).unwrap(), 744);
        assert_eq!(s.coeff_rational(e(1)).unwrap(), 196884);
        assert_eq!(s.trunc(), e(5));
    }

    #[test]
    fn multiply_by_one() {
        let a = poly(&[3, 0, -2, 7], 10);
        assert_eq!(&a * &QSeries::one(e(10)), a);
    }

    #[test]
    fn one_minus_q_times_geometric() {
        let a = poly(&[1, -1], 20);
        let geo = poly(&[1; 20], 20);
        let p = &a * &geo;
        assert_eq!(p, QSeries::one(e(20)));
    }

    #[test]
    fn inverse_cases() {
        assert_eq!(QSeries::one(e(10)).inv().unwrap(), QSeries::one(e(10)));
        let m = QSeries::monomial(int(1), exponent(1, 24), e(3));
        let inv = m.inv().unwrap();
        assert_eq!(inv.leading_exponent(), Some(exponent(-1, 24)));
        assert_eq!(inv.num_terms(), 1);
        let g = poly(&[1, -1], 15).inv().unwrap();
        assert_eq!(g, poly(&[1; 15], 15));
        assert_eq!(QSeries::zero(e(4)).inv().unwrap_err(), Error::ZeroLeadingCoefficient);
    }

    #[test]
    fn powers() {
        let a = poly(&[1, -1], 10);
        assert_eq!(a.pow(0).unwrap(), QSeries::one(e(10)));
        assert_eq!(a.pow(2).unwrap(), poly(&[1, -2, 1], 10));
        let m = QSeries::monomial(int(1), exponent(1, 24), e(5));
        let p = m.pow(24).unwrap();
        assert_eq!(p.leading_exponent(), Some(e(1)));
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn rescale_monomial() {
        let m = QSeries::monomial(int(1), exponent(1, 24), e(3));
        let r = m.rescale(e(2));
        assert_eq!(r.leading_exponent(), Some(exponent(1, 12)));
        assert_eq!(r.trunc(), e(6));
        assert_eq!(m.rescale(e(1)), m);
    }

    #[test]
    fn cyclotomic_coefficients_mix() {
        let i = CyclotomicNumber::root_of_unity(4, 1);
        let a = QSeries::monomial(i.clone(), e(1), e(5));
        let b = QSeries::monomial(i, e(1), e(5));
        let p = &a * &b;
        assert_eq!(p.coeff_rational(e(2)).unwrap(), -1);
    }
}
