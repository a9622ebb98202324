//! High-precision evaluation of eta-quotients at CM points.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::factorize;
use crate::bigcomplex::{bits_for_digits, BigComplex};
use crate::error::{Error, Result};
use crate::eta::{ligozat_check, EtaQuotient};
use crate::mat2::Mat2;
use crate::reciprocity::{conjugates_of_invariant, min_poly_from_orbit, Invariant};

pub const DEFAULT_DIGITS: u32 = 300;
pub const MIN_DIGITS: u32 = 50;

/// The order of conductor N in K = Q(sqrt(d_K)), with tau_K a root of X^2 + BX + C.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImagQuadOrder {
    #[serde(rename = "d_K")]
    d_k: i64,
    #[serde(rename = "N")]
    conductor: u64,
    #[serde(rename = "B")]
    b: i64,
    #[serde(rename = "C")]
    c: i64,
}

pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let squarefree = |m: u64| factorize(m).iter().all(|&(_, e)| e == 1);
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

impl ImagQuadOrder {
    pub fn new(d_k: i64, conductor: u64) -> Result<Self> {
        if !is_fundamental(d_k) {
            return Err(Error::NotFundamental(d_k));
        }
        if conductor == 0 {
            return Err(Error::InvalidArgument("conductor must be positive".into()));
        }
        let (b, c) = if d_k.rem_euclid(4) == 1 {
            (1, (1 - d_k) / 4)
        } else {
            (0, -d_k / 4)
        };
        Ok(Self { d_k, conductor, b, c })
    }

    pub fn d_k(&self) -> i64 {
        self.d_k
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn with_conductor(&self, conductor: u64) -> Result<Self> {
        Self::new(self.d_k, conductor)
    }
}

/// tau_K = (-B + sqrt(d_K)) / 2.
pub fn tau_point(order: &ImagQuadOrder, digits: u32) -> BigComplex {
    let prec = bits_for_digits(digits);
    let im = Float::with_val(prec, -order.d_k).sqrt() / 2u32;
    let re = Float::with_val(prec, -order.b) / 2u32;
    BigComplex::new(Complex::with_val(prec, (re, im)), digits)
}

/// (a tau + b) / (c tau + d).
pub fn mobius(m: &Mat2, tau: &BigComplex) -> BigComplex {
    let prec = tau.prec();
    let num = Complex::with_val(prec, tau.value() * m.a) + m.b;
    let den = Complex::with_val(prec, tau.value() * m.c) + m.d;
    BigComplex::new(num / den, tau.digits())
}

fn check_upper(tau: &Complex) -> Result<()> {
    if tau.imag().is_sign_negative() || tau.imag().is_zero() || !tau.imag().is_finite() {
        return Err(Error::NonPositiveImaginaryPart);
    }
    Ok(())
}

/// Extra bits so that points close to the real line survive the reduction.
fn guard_bits(tau: &Complex) -> u32 {
    let im = tau.imag().to_f64();
    let lost = if im > 0.0 && im < 1.0 { (-im.log2()).ceil() as u32 } else { 0 };
    64 + 2 * lost
}

/// Result of moving tau into the standard fundamental domain:
/// eta(tau) = zeta_24^{root_index} * prod sqrt(-i sigma) * eta(z).
pub(crate) struct Reduction {
    pub z: Complex,
    pub root_index: i64,
    pub sigmas: Vec<Complex>,
}

pub(crate) fn reduce(tau: &Complex, prec: u32) -> Reduction {
    let mut z = Complex::with_val(prec, tau);
    let mut root_index = 0i64;
    let mut sigmas = Vec::new();
    let one_minus = Float::with_val(prec, 1) - Float::with_val(prec, Float::i_exp(1, -40));
    for _ in 0..100_000 {
        let n = Float::with_val(prec, z.real().round_ref());
        let shift = n.to_integer().and_then(|i| i.to_i64()).unwrap_or(0);
        z -= shift;
        root_index += shift;
        let norm = Float::with_val(prec, z.abs_ref());
        if norm < one_minus {
            let sigma = Complex::with_val(prec, -Complex::with_val(prec, z.recip_ref()));
            z = sigma.clone();
            sigmas.push(sigma);
        } else {
            break;
        }
    }
    Reduction { z, root_index, sigmas }
}

fn two_pi_i(prec: u32) -> Complex {
    let pi = Float::with_val(prec, Constant::Pi);
    Complex::with_val(prec, (0, 2 * pi))
}

/// q^{1/24} prod (1 - q^n) with the tail dropped below 10^{-digits-10}.
fn eta_product(z: &Complex, digits: u32, prec: u32) -> Complex {
    let im = z.imag().to_f64();
    let terms = (((digits + 10) as f64 * std::f64::consts::LN_10) / (2.0 * std::f64::consts::PI * im))
        .ceil() as usize
        + 1;
    let tpi = two_pi_i(prec);
    let q = Complex::with_val(prec, &tpi * z).exp();
    let mut acc = Complex::with_val(prec, &tpi * z) / 24u32;
    acc = acc.exp();
    let mut qn = Complex::with_val(prec, 1);
    for _ in 0..terms {
        qn *= &q;
        acc *= Complex::with_val(prec, 1 - &qn);
    }
    acc
}

fn root_of_unity_24(k: i64, prec: u32) -> Complex {
    let k = k.rem_euclid(24);
    let arg = Complex::with_val(prec, two_pi_i(prec) * k) / 24u32;
    arg.exp()
}

/// eta(tau), reducing into the fundamental domain first.
pub fn eval_eta(tau: &BigComplex, digits: u32) -> Result<BigComplex> {
    check_upper(tau.value())?;
    let prec = bits_for_digits(digits) + guard_bits(tau.value());
    let r = reduce(tau.value(), prec);
    let mut val = eta_product(&r.z, digits, prec);
    for sigma in &r.sigmas {
        let t = Complex::with_val(prec, sigma * Complex::with_val(prec, (0, -1)));
        val *= t.sqrt();
    }
    val *= root_of_unity_24(r.root_index, prec);
    Ok(BigComplex::new(val, digits))
}

/// eta(tau) straight from the product, without reduction.
pub fn eval_eta_direct(tau: &BigComplex, digits: u32) -> Result<BigComplex> {
    check_upper(tau.value())?;
    if tau.im().to_f64() < 1e-3 {
        return Err(Error::InvalidArgument(
            "direct eta evaluation needs Im(tau) >= 1e-3".into(),
        ));
    }
    let prec = bits_for_digits(digits) + 64;
    let z = Complex::with_val(prec, tau.value());
    Ok(BigComplex::new(eta_product(&z, digits, prec), digits))
}

/// prod eta(d tau)^{m_d}.
pub fn eval_eta_quotient(e: &EtaQuotient, tau: &BigComplex, digits: u32) -> Result<BigComplex> {
    check_upper(tau.value())?;
    let prec = bits_for_digits(digits) + 32;
    let mut acc = Complex::with_val(prec, 1);
    for (&d, &m) in e.exps() {
        let dt = BigComplex::new(Complex::with_val(prec, tau.value() * d), digits);
        let v = eval_eta(&dt, digits + 10)?;
        let p = Complex::with_val(prec, v.value().pow(m as i32));
        acc *= p;
    }
    Ok(BigComplex::new(acc, digits))
}

/// j(tau) = E4^3 / Delta evaluated in the fundamental domain.
pub fn eval_j(tau: &BigComplex, digits: u32) -> Result<BigComplex> {
    check_upper(tau.value())?;
    let prec = bits_for_digits(digits) + guard_bits(tau.value());
    let z = reduce(tau.value(), prec).z;
    let q = Complex::with_val(prec, two_pi_i(prec) * &z).exp();
    let im = z.imag().to_f64();
    let terms = (((digits + 20) as f64 * std::f64::consts::LN_10) / (2.0 * std::f64::consts::PI * im))
        .ceil() as u64
        + 1;
    let mut e4 = Complex::with_val(prec, 0);
    let mut qn = Complex::with_val(prec, 1);
    for n in 1..=terms {
        qn *= &q;
        let denom = Complex::with_val(prec, 1 - &qn);
        e4 += Complex::with_val(prec, &qn * (n * n * n)) / denom;
    }
    let e4 = Complex::with_val(prec, e4 * 240u32) + 1u32;
    let eta = eta_product(&z, digits + 10, prec);
    let delta = Complex::with_val(prec, eta.pow(24i32));
    let j = Complex::with_val(prec, e4.pow(3i32)) / delta;
    Ok(BigComplex::new(j, digits))
}

fn assert_real(v: BigComplex, digits: u32) -> Result<BigComplex> {
    let scale = v.log10_abs().max(0.0);
    let im = v.im().clone();
    let im_log = if im.is_zero() { f64::NEG_INFINITY } else { Float::with_val(v.prec(), im.abs_ref()).log10().to_f64() };
    if im_log - scale >= -(digits as f64) + 10.0 {
        return Err(Error::NotReal { imag_log10: im_log });
    }
    let prec = v.prec();
    Ok(BigComplex::new(Complex::with_val(prec, (v.re(), 0)), v.digits()))
}

/// The quotient eta(N tau)^8 / eta((N/4) tau)^8 at level N.
pub fn class_invariant_quotient(n: u64) -> Result<EtaQuotient> {
    if n % 4 != 0 || n == 0 {
        return Err(Error::ConductorNotDivisibleBy4(n));
    }
    EtaQuotient::new(n, [(n / 4, -8), (n, 8)])
}

/// 256 eta(N tau_K)^8 / eta((N/4) tau_K)^8, checked to be real.
pub fn class_invariant(order: &ImagQuadOrder, digits: u32) -> Result<BigComplex> {
    let e = class_invariant_quotient(order.conductor)?;
    let tau = tau_point(order, digits + 10);
    let v = eval_eta_quotient(&e, &tau, digits + 10)?;
    let prec = v.prec();
    let v = BigComplex::new(Complex::with_val(prec, v.value() * 256u32), digits);
    assert_real(v, digits)
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralityReport {
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "d_K")]
    pub d_k: i64,
    #[serde(rename = "N")]
    pub level: u64,
    /// tau_0 = (N / M) tau_K.
    pub tau0_scale: u64,
    /// Smallest k for which x^k is a modular function on Gamma0(N).
    pub power: u32,
    pub value: BigComplex,
    /// Polynomial of x^k from the Galois orbit, highest degree first.
    pub orbit_poly: Vec<String>,
    /// The same polynomial in X^k, which has x as a root.
    pub poly: Vec<String>,
    pub degree: usize,
    pub max_rounding_residual: String,
    pub monic_integral: bool,
    pub constant_divides: bool,
    pub digits: u32,
}

/// Integrality of x = M eta(M tau_0)^2 / eta(tau_0)^2 at tau_0 = (N/M) tau_K,
/// where N is the conductor of `order` and M must divide N.
pub fn integrality_check(m: u64, order: &ImagQuadOrder, digits: u32) -> Result<IntegralityReport> {
    if m < 2 {
        return Err(Error::InvalidArgument("M must be at least 2".into()));
    }
    let n = order.conductor;
    if n % m != 0 {
        return Err(Error::InvalidArgument(format!("M = {m} must divide the conductor {n}")));
    }
    let s = n / m;
    let base = EtaQuotient::new(n, [(s, -2), (n, 2)])?;
    let power = (1..=24u32)
        .find(|&k| ligozat_check(&base.pow(k as i64)).passes)
        .ok_or_else(|| Error::InvalidArgument("no power of x is modular on Gamma0(N)".into()))?;

    let tau = tau_point(order, digits + 10);
    let prec = bits_for_digits(digits + 10);
    let tau0 = BigComplex::new(Complex::with_val(prec, tau.value() * s), digits + 10);
    let single = EtaQuotient::new(m, [(1, -2), (m, 2)])?;
    let x = eval_eta_quotient(&single, &tau0, digits + 10)?;
    let x = BigComplex::new(Complex::with_val(prec, x.value() * m), digits);

    let inv = Invariant::new(Rational::from(Integer::from(m).pow(power)), base.pow(power as i64))?;
    let orbit = conjugates_of_invariant(order, &inv, digits)?;
    let mp = min_poly_from_orbit(&orbit, digits)?;

    let k = power as usize;
    let deg = mp.coeffs.len() - 1;
    let mut poly = vec![Integer::new(); deg * k + 1];
    for (i, c) in mp.coeffs.iter().enumerate() {
        poly[i * k] = c.clone();
    }
    let monic_integral = poly[0] == 1;
    let constant = poly.last().cloned().unwrap_or_default();
    let bound = Integer::from(m).pow((deg * k) as u32);
    let constant_divides = !constant.is_zero() && bound.is_divisible(&constant);

    Ok(IntegralityReport {
        m,
        d_k: order.d_k,
        level: n,
        tau0_scale: s,
        power,
        value: x,
        orbit_poly: mp.coeffs.iter().map(|c| c.to_string()).collect(),
        poly: poly.iter().map(|c| c.to_string()).collect(),
        degree: deg * k,
        max_rounding_residual: mp.max_rounding_residual.clone(),
        monic_integral,
        constant_divides,
        digits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::g04;
    use crate::elliptic::h_quotient;
    use crate::eta::eta_quotient_series;
    use crate::exponent;

    fn close(a: &BigComplex, b: &BigComplex, log10_tol: f64) -> bool {
        let d = a.log10_rel_diff(b);
        d < log10_tol
    }

    #[test]
    fn orders() {
        let o = ImagQuadOrder::new(-7, 12).unwrap();
        assert_eq!((o.b(), o.c()), (1, 2));
        let o = ImagQuadOrder::new(-4, 1).unwrap();
        assert_eq!((o.b(), o.c()), (0, 1));
        assert_eq!(ImagQuadOrder::new(-12, 1), Err(Error::NotFundamental(-12)));
        assert!(ImagQuadOrder::new(-9, 1).is_err());
        for d in [-3, -4, -7, -8, -11, -15, -20, -23, -24] {
            let o = ImagQuadOrder::new(d, 1).unwrap();
            assert_eq!(o.b() * o.b() - 4 * o.c(), d);
        }
    }

    #[test]
    fn tau_points() {
        let t = tau_point(&ImagQuadOrder::new(-4, 1).unwrap(), 60);
        assert!(t.re().is_zero());
        assert!((t.im().to_f64() - 1.0).abs() < 1e-15);
        let t = tau_point(&ImagQuadOrder::new(-8, 1).unwrap(), 60);
        assert!((t.im().to_f64() - 2f64.sqrt()).abs() < 1e-15);
        let t = tau_point(&ImagQuadOrder::new(-7, 1).unwrap(), 60);
        assert_eq!(t.re().to_f64(), -0.5);
    }

    #[test]
    fn eta_at_i_matches_gamma() {
        let digits = 120;
        let prec = bits_for_digits(digits);
        let tau = BigComplex::from_f64(0.0, 1.0, digits);
        let v = eval_eta(&tau, digits).unwrap();
        let g = Float::with_val(prec, 0.25).gamma();
        let pi = Float::with_val(prec, Constant::Pi);
        let expect = g / (Float::with_val(prec, pi.pow(Float::with_val(prec, 0.75))) * 2u32);
        let e = BigComplex::new(Complex::with_val(prec, (expect, 0)), digits);
        assert!(close(&v, &e, -(digits as f64) + 5.0));
    }

    #[test]
    fn eta_translation_phase() {
        let digits = 80;
        let prec = bits_for_digits(digits);
        for (x, y) in [(0.3, 0.2), (-1.7, 0.05), (0.49, 1.3)] {
            let t = BigComplex::from_f64(x, y, digits);
            let t1 = BigComplex::new(Complex::with_val(prec, t.value() + 1u32), digits);
            let a = eval_eta(&t1, digits).unwrap();
            let b = eval_eta(&t, digits).unwrap();
            let z = BigComplex::new(root_of_unity_24(1, prec), digits);
            assert!(close(&a, &(&z * &b), -(digits as f64) + 5.0));
        }
    }

    #[test]
    fn reduced_and_direct_agree() {
        let digits = 80;
        for (x, y) in [(0.0, 0.5), (0.21, 0.05), (-0.4, 0.11), (3.3, 2.0)] {
            let t = BigComplex::from_f64(x, y, digits);
            let a = eval_eta(&t, digits).unwrap();
            let b = eval_eta_direct(&t, digits).unwrap();
            assert!(close(&a, &b, -(digits as f64) + 5.0), "{x} {y}");
        }
        let t = BigComplex::from_f64(0.0, 1e-4, digits);
        assert!(eval_eta_direct(&t, digits).is_err());
        let t = BigComplex::from_f64(0.0, -1.0, digits);
        assert_eq!(eval_eta(&t, digits), Err(Error::NonPositiveImaginaryPart));
    }

    #[test]
    fn dual_route_quotient() {
        let digits = 80;
        let e = EtaQuotient::new(4, [(1, -8), (4, 8)]).unwrap();
        let tau = BigComplex::from_f64(0.0, 0.5, digits);
        let a = eval_eta_quotient(&e, &tau, digits).unwrap();
        let prec = bits_for_digits(digits);
        let t2 = BigComplex::new(Complex::with_val(prec, tau.value() * 4u32), digits);
        let num = eval_eta_direct(&t2, digits).unwrap();
        let den = eval_eta_direct(&tau, digits).unwrap();
        let b = BigComplex::new(
            Complex::with_val(prec, num.value().pow(8i32)) / Complex::with_val(prec, den.value().pow(8i32)),
            digits,
        );
        assert!(close(&a, &b, -(digits as f64) + 5.0));
        let empty = EtaQuotient::constant(4);
        let one = eval_eta_quotient(&empty, &tau, digits).unwrap();
        assert!(close(&one, &BigComplex::from_f64(1.0, 0.0, digits), -70.0));
    }

    #[test]
    fn product_matches_series() {
        let digits = 60;
        let tau = BigComplex::from_f64(0.0, 2.0, digits);
        let e = h_quotient(3);
        let a = eval_eta_quotient(&e, &tau, digits).unwrap();
        let s = eta_quotient_series(&e, exponent(200, 1));
        let prec = bits_for_digits(digits);
        let b = BigComplex::new(s.eval(tau.value()), digits);
        assert!(close(&a, &b, -30.0));

        let big = BigComplex::from_f64(0.1, 6.0, digits);
        let g = eval_eta_quotient(&g04(), &big, digits).unwrap();
        let q = Complex::with_val(prec, two_pi_i(prec) * big.value()).exp();
        let ratio = BigComplex::new(Complex::with_val(prec, g.value() / &q), digits);
        assert!(close(&ratio, &BigComplex::from_f64(1.0, 0.0, digits), -10.0));
    }

    #[test]
    fn j_values() {
        let digits = 60;
        let j = eval_j(&BigComplex::from_f64(0.0, 1.0, digits), digits).unwrap();
        assert!(close(&j, &BigComplex::from_f64(1728.0, 0.0, digits), -50.0));
        let t = tau_point(&ImagQuadOrder::new(-7, 1).unwrap(), digits);
        let j = eval_j(&t, digits).unwrap();
        assert!(close(&j, &BigComplex::from_f64(-3375.0, 0.0, digits), -50.0));
        let shifted = mobius(&Mat2::new(2, 1, 1, 1), &t);
        let j2 = eval_j(&shifted, digits).unwrap();
        assert!(close(&j, &j2, -50.0));
    }

    #[test]
    fn class_invariants_are_real() {
        let digits = 80;
        for (d, n) in [(-7, 12), (-4, 8), (-8, 4), (-11, 16), (-15, 20)] {
            let o = ImagQuadOrder::new(d, n).unwrap();
            let v = class_invariant(&o, digits).unwrap();
            assert!(v.im().is_zero());
            let e = class_invariant_quotient(n).unwrap();
            let tau = tau_point(&o, digits);
            let w = EtaQuotient::new(n, e.exps().iter().map(|(&d, &m)| (d, m / 4))).unwrap();
            let x = eval_eta_quotient(&w, &tau, digits).unwrap();
            let prec = bits_for_digits(digits);
            let x4 = BigComplex::new(Complex::with_val(prec, x.value() * 4u32).pow(4i32), digits);
            assert!(close(&v, &x4, -60.0));
        }
        let o = ImagQuadOrder::new(-7, 6).unwrap();
        assert_eq!(class_invariant(&o, 60), Err(Error::ConductorNotDivisibleBy4(6)));
    }

    #[test]
    fn class_invariant_stable_across_precision() {
        let o = ImagQuadOrder::new(-7, 12).unwrap();
        let a = class_invariant(&o, 100).unwrap();
        let b = class_invariant(&o, 250).unwrap();
        assert!(close(&a, &b, -90.0));
    }

    #[test]
    fn h_values_nonzero() {
        for d in [-7, -8, -4] {
            let o = ImagQuadOrder::new(d, 1).unwrap();
            let tau = tau_point(&o, 60);
            for m in 3..=6 {
                let v = eval_eta_quotient(&h_quotient(m), &tau, 60).unwrap();
                assert!(v.log10_abs() > -20.0);
            }
        }
    }

    #[test]
    fn integrality() {
        let r = integrality_check(2, &ImagQuadOrder::new(-4, 2).unwrap(), 100).unwrap();
        assert_eq!(r.power, 12);
        assert_eq!(r.orbit_poly, vec!["1", "-8"]);
        assert!(r.monic_integral && r.constant_divides);
        assert_eq!(r.degree, 12);
    }
}
