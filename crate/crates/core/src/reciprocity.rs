//! Galois conjugates of CM values through the group W_{K,N}.

use std::collections::{BTreeSet, HashSet};

use num_integer::Integer as _;
use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;

use crate::arith::{factorize, kronecker, mod_inverse};
use crate::bigcomplex::{bits_for_digits, BigComplex};
use crate::cm::{eval_eta_quotient, is_fundamental, mobius, tau_point, ImagQuadOrder};
use crate::elliptic::h_quotient;
use crate::error::{Error, Result};
use crate::eta::{ligozat_check, EtaQuotient};
use crate::mat2::Mat2;

/// Number of reduced primitive forms ax^2 + bxy + cy^2 of discriminant d.
pub fn class_number(d: i64) -> Result<u64> {
    if !is_fundamental(d) {
        return Err(Error::NotFundamental(d));
    }
    let dd = -d;
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= dd {
        for b in -a + 1..=a {
            let num = b * b + dd;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    Ok(h)
}

/// Index of the unit group of the order of conductor N in O_K^x.
pub fn unit_index(d_k: i64, conductor: u64) -> u64 {
    match (conductor, d_k) {
        (1, _) => 1,
        (_, -4) => 2,
        (_, -3) => 3,
        _ => 1,
    }
}

/// [H_{K,N} : K].
pub fn degree_formula(order: &ImagQuadOrder) -> Result<u64> {
    let n = order.conductor();
    let mut v = class_number(order.d_k())? * n;
    for (p, _) in factorize(n) {
        let chi = kronecker(order.d_k(), p);
        v = v / p * (p as i64 - chi) as u64;
    }
    Ok(v / unit_index(order.d_k(), n))
}

fn modulus(order: &ImagQuadOrder) -> Result<i64> {
    let n = order.conductor();
    if n < 2 {
        return Err(Error::InvalidArgument("conductor must be at least 2".into()));
    }
    Ok(n as i64)
}

fn w_element(order: &ImagQuadOrder, t: i64, s: i64, n: i64) -> Mat2 {
    Mat2::new(t - order.b() * s, -order.c() * s, s, t).reduce(n)
}

fn is_unit(x: i64, n: i64) -> bool {
    x.rem_euclid(n).gcd(&n) == 1
}

/// W_{K,N}: all [[t - Bs, -Cs], [s, t]] invertible mod N, for t then s.
pub fn build_w(order: &ImagQuadOrder) -> Result<Vec<Mat2>> {
    let n = modulus(order)?;
    let mut out = Vec::new();
    for t in 0..n {
        for s in 0..n {
            let g = w_element(order, t, s, n);
            if is_unit(g.det(), n) {
                out.push(g);
            }
        }
    }
    Ok(out)
}

/// Whether W is closed under multiplication mod N.
pub fn w_is_closed(order: &ImagQuadOrder) -> Result<bool> {
    let n = modulus(order)?;
    let w = build_w(order)?;
    let set: HashSet<Mat2> = w.iter().copied().collect();
    Ok(w.iter().all(|x| w.iter().all(|y| set.contains(&x.mul_mod(y, n)))))
}

/// Images of the roots of unity of O_K, reduced mod N.
pub fn kernel_matrices(d_k: i64, n: u64) -> Vec<Mat2> {
    let n = n as i64;
    let base: Vec<Mat2> = match d_k {
        -4 => vec![Mat2::IDENTITY, Mat2::new(0, -1, 1, 0)],
        -3 => vec![Mat2::IDENTITY, Mat2::new(-1, -1, 1, 0), Mat2::new(0, -1, 1, 1)],
        _ => vec![Mat2::IDENTITY],
    };
    let mut out = Vec::new();
    for m in base {
        for sign in [1, -1] {
            let x = m.scale_mod(sign, n);
            if !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// The subgroup generated by the kernel and the scalars t I.
fn reduction_subgroup(order: &ImagQuadOrder, n: i64) -> Vec<Mat2> {
    let mut out = BTreeSet::new();
    for k in kernel_matrices(order.d_k(), n as u64) {
        for t in 1..n {
            if is_unit(t, n) {
                out.insert(k.scale_mod(t, n));
            }
        }
    }
    out.into_iter().collect()
}

fn coset_key(g: &Mat2, h: &[Mat2], n: i64) -> Mat2 {
    h.iter().map(|x| x.mul_mod(g, n)).min().unwrap_or(*g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CosetRep {
    pub gamma: Mat2,
    /// det(gamma) mod N.
    pub diag_d: i64,
    /// diag(1, d)^{-1} gamma, of determinant 1 mod N.
    pub alpha: Mat2,
}

fn split(gamma: &Mat2, n: i64) -> CosetRep {
    let d = gamma.det().rem_euclid(n);
    let di = mod_inverse(d, n).unwrap_or(1);
    let alpha = Mat2::new(gamma.a, gamma.b, gamma.c * di, gamma.d * di).reduce(n);
    CosetRep { gamma: *gamma, diag_d: d, alpha }
}

/// One representative of each coset of W modulo kernel and scalars,
/// starting from the identity.
pub fn coset_reps(order: &ImagQuadOrder) -> Result<Vec<CosetRep>> {
    let n = modulus(order)?;
    let h = reduction_subgroup(order, n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let id = Mat2::IDENTITY.reduce(n);
    for g in std::iter::once(id).chain(build_w(order)?) {
        if seen.insert(coset_key(&g, &h, n)) {
            out.push(split(&g, n));
        }
    }
    Ok(out)
}

/// Whether two elements of W lie in the same coset.
pub fn same_coset(order: &ImagQuadOrder, x: &Mat2, y: &Mat2) -> Result<bool> {
    let n = modulus(order)?;
    let h = reduction_subgroup(order, n);
    Ok(coset_key(&x.reduce(n), &h, n) == coset_key(&y.reduce(n), &h, n))
}

fn symmetric(x: i64, n: i64) -> i64 {
    let r = x.rem_euclid(n);
    if 2 * r > n {
        r - n
    } else {
        r
    }
}

/// An integer matrix of determinant 1 congruent to alpha mod n.
///
/// The bottom row keeps c in [0, n) (or n when c = 0 and d is not +-1) and
/// moves d by multiples of n until gcd(c, d) = 1, which takes fewer than c
/// steps. The top row is then fixed by one extended gcd, so every entry is
/// bounded by about n^3.
pub fn sl2_lift(alpha: &Mat2, n: i64) -> Result<Mat2> {
    let r = alpha.reduce(n);
    if n < 1 || r.det().rem_euclid(n) != 1 % n {
        return Err(Error::NotUnimodular { modulus: n });
    }
    let (c, d) = if r.c == 0 {
        if r.d == 1 % n {
            (0, 1)
        } else if r.d == n - 1 {
            (0, -1)
        } else {
            (n, r.d)
        }
    } else {
        (r.c, r.d)
    };
    let mut dd = d;
    if c != 0 {
        let mut step = 0i64;
        loop {
            let cand = if step % 2 == 0 { d - (step / 2) * n } else { d + (step / 2 + 1) * n };
            if cand.gcd(&c) == 1 {
                dd = cand;
                break;
            }
            step += 1;
        }
    }
    let g = dd.extended_gcd(&c);
    let (a0, b0) = (g.x * g.gcd, -g.y * g.gcd);
    let x = r.a - a0;
    let y = r.b - b0;
    let k = symmetric(-b0 * x + a0 * y, n);
    let lift = Mat2::new(a0 + k * c, b0 + k * dd, c, dd);
    debug_assert_eq!(lift.det(), 1);
    debug_assert_eq!(lift.reduce(n), r);
    Ok(lift)
}

/// A rational multiple of a weight-zero eta-quotient that is a modular
/// function on Gamma0(level).
#[derive(Clone, Debug, PartialEq)]
pub struct Invariant {
    pub scale: Rational,
    pub quotient: EtaQuotient,
}

impl Invariant {
    pub fn new(scale: Rational, quotient: EtaQuotient) -> Result<Self> {
        let report = ligozat_check(&quotient);
        if !report.passes || *quotient.weight().numer() != 0 {
            return Err(Error::InvalidArgument(format!(
                "{quotient} is not a modular function on Gamma0({})",
                quotient.level()
            )));
        }
        Ok(Self { scale, quotient })
    }

    /// 256 eta(N tau)^8 / eta((N/4) tau)^8.
    pub fn class_invariant(n: u64) -> Result<Self> {
        Self::new(Rational::from(256), crate::cm::class_invariant_quotient(n)?)
    }

    pub fn level(&self) -> u64 {
        self.quotient.level()
    }

    pub fn eval(&self, tau: &BigComplex, digits: u32) -> Result<BigComplex> {
        let v = eval_eta_quotient(&self.quotient, tau, digits)?;
        let prec = v.prec();
        let s = Float::with_val(prec, &self.scale);
        Ok(BigComplex::new(Complex::with_val(prec, v.value() * s), digits))
    }
}

#[derive(Clone, Debug)]
pub struct GaloisOrbit {
    pub order: ImagQuadOrder,
    pub reps: Vec<(i64, Mat2)>,
    pub values: Vec<BigComplex>,
    pub digits: u32,
}

/// The conjugates of inv(tau_K) over H_K: inv(alpha~ tau_K) per coset rep.
pub fn conjugates_of_invariant(order: &ImagQuadOrder, inv: &Invariant, digits: u32) -> Result<GaloisOrbit> {
    let n = order.conductor();
    if n % inv.level() != 0 {
        return Err(Error::LevelMismatch { level: inv.level(), conductor: n });
    }
    let n = n as i64;
    let tau = tau_point(order, digits + 20);
    let reps = coset_reps(order)?;
    let lifts = reps
        .iter()
        .map(|r| sl2_lift(&r.alpha, n).map(|l| (r.diag_d, l)))
        .collect::<Result<Vec<_>>>()?;
    let values = std::thread::scope(|scope| {
        let handles: Vec<_> = lifts
            .iter()
            .map(|(_, l)| {
                let tau = &tau;
                scope.spawn(move || inv.eval(&mobius(l, tau), digits + 20))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("conjugate evaluation panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(GaloisOrbit { order: *order, reps: lifts, values, digits })
}

#[derive(Clone, Debug)]
pub struct MinPoly {
    /// Integer coefficients, highest degree first.
    pub coeffs: Vec<Integer>,
    pub residual_log10: f64,
    pub max_rounding_residual: String,
    pub max_imag_log10: f64,
}

fn log10_of(x: &Float) -> f64 {
    if x.is_zero() {
        f64::NEG_INFINITY
    } else {
        Float::with_val(x.prec(), x.abs_ref()).log10().to_f64()
    }
}

fn residual_string(x: &Float) -> String {
    if x.is_zero() {
        "0".into()
    } else {
        crate::bigcomplex::decimal(x, 3)
    }
}

/// Expands prod (X - v) and rounds every coefficient to an integer.
pub fn min_poly_from_orbit(orbit: &GaloisOrbit, digits: u32) -> Result<MinPoly> {
    let prec = orbit
        .values
        .iter()
        .map(|v| v.prec())
        .max()
        .unwrap_or(bits_for_digits(digits));
    let mut poly = vec![Complex::with_val(prec, 1)];
    for v in &orbit.values {
        let mut next = poly.clone();
        next.push(Complex::with_val(prec, 0));
        for i in 1..next.len() {
            let t = Complex::with_val(prec, &poly[i - 1] * v.value());
            next[i] -= t;
        }
        poly = next;
    }
    let mut coeffs = Vec::with_capacity(poly.len());
    let mut worst = Float::with_val(prec, 0);
    let mut worst_im = Float::with_val(prec, 0);
    for c in &poly {
        let rounded = c.real().to_integer().ok_or_else(|| Error::RoundingFailure {
            residual_log10: f64::INFINITY,
            digits,
        })?;
        let diff = Float::with_val(prec, c.real() - &rounded).abs();
        let im = Float::with_val(prec, c.imag().abs_ref());
        let r = if diff > im { diff } else { im.clone() };
        if r > worst {
            worst = r;
        }
        if im > worst_im {
            worst_im = im;
        }
        coeffs.push(rounded);
    }
    let residual_log10 = log10_of(&worst);
    if residual_log10 > -(digits as f64) / 2.0 {
        return Err(Error::RoundingFailure { residual_log10, digits });
    }
    Ok(MinPoly {
        coeffs,
        residual_log10,
        max_rounding_residual: residual_string(&worst),
        max_imag_log10: log10_of(&worst_im),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MinPolyReport {
    #[serde(rename = "d_K")]
    pub d_k: i64,
    #[serde(rename = "N")]
    pub n: u64,
    pub degree: usize,
    pub reps: Vec<(i64, [[i64; 2]; 2])>,
    pub values: Vec<BigComplex>,
    pub poly: Vec<String>,
    pub max_rounding_residual: String,
    #[serde(skip)]
    pub residual_log10: f64,
    pub digits: u32,
    /// Precision of the confirming recomputation.
    pub rung_digits: u32,
    pub rung_agrees: bool,
}

fn matrix_array(m: &Mat2) -> [[i64; 2]; 2] {
    [[m.a, m.b], [m.c, m.d]]
}

/// Minimal polynomial of the class invariant over K, recomputed at
/// digits + 150 to confirm the integers.
pub fn class_polynomial(order: &ImagQuadOrder, digits: u32) -> Result<MinPolyReport> {
    let inv = Invariant::class_invariant(order.conductor())?;
    let orbit = conjugates_of_invariant(order, &inv, digits)?;
    let mp = min_poly_from_orbit(&orbit, digits)?;
    let rung_digits = digits + 150;
    let orbit2 = conjugates_of_invariant(order, &inv, rung_digits)?;
    let mp2 = min_poly_from_orbit(&orbit2, rung_digits)?;
    Ok(MinPolyReport {
        d_k: order.d_k(),
        n: order.conductor(),
        degree: mp.coeffs.len() - 1,
        reps: orbit.reps.iter().map(|(d, m)| (*d, matrix_array(m))).collect(),
        values: orbit
            .values
            .iter()
            .map(|v| BigComplex::new(v.value().clone(), digits))
            .collect(),
        poly: mp.coeffs.iter().map(|c| c.to_string()).collect(),
        max_rounding_residual: mp.max_rounding_residual,
        residual_log10: mp.residual_log10,
        digits,
        rung_digits,
        rung_agrees: mp.coeffs == mp2.coeffs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SignFlipReport {
    pub m: u32,
    #[serde(rename = "d_K")]
    pub d_k: i64,
    pub gamma: Mat2,
    pub lift: Mat2,
    pub value: BigComplex,
    pub conjugate: BigComplex,
    pub residual_log10: f64,
    pub pass: bool,
}

/// Checks that h_m at alpha~ tau_K equals -h_m(tau_K), where alpha is the
/// SL2 part of gamma = [[1 - B 2^{m-1}, -C 2^{m-1}], [2^{m-1}, 1]].
pub fn verify_sign_flip(m: u32, order: &ImagQuadOrder, digits: u32) -> Result<SignFlipReport> {
    if m < 3 {
        return Err(Error::InvalidArgument("m must be at least 3".into()));
    }
    let n = 1i64 << m;
    if order.conductor() != n as u64 {
        return Err(Error::LevelMismatch { level: n as u64, conductor: order.conductor() });
    }
    let half = n / 2;
    let gamma = Mat2::new(1 - order.b() * half, -order.c() * half, half, 1).reduce(n);
    let rep = split(&gamma, n);
    let lift = sl2_lift(&rep.alpha, n)?;
    let inv = Invariant::new(Rational::from(1), h_quotient(m))?;
    let tau = tau_point(order, digits + 20);
    let value = inv.eval(&tau, digits + 20)?;
    let conjugate = inv.eval(&mobius(&lift, &tau), digits + 20)?;
    let sum = &value + &conjugate;
    let residual_log10 = sum.log10_abs() - value.log10_abs();
    Ok(SignFlipReport {
        m,
        d_k: order.d_k(),
        gamma,
        lift,
        value: BigComplex::new(value.into_value(), digits),
        conjugate: BigComplex::new(conjugate.into_value(), digits),
        residual_log10,
        pass: residual_log10 < -(digits as f64) / 2.0,
    })
}

/// log10 of |h_m(gamma tau) + h_m(tau)| / |h_m(tau)| with gamma = [[1,0],[2^{m-1},1]].
pub fn h_conjugate_residual(m: u32, tau: &BigComplex, digits: u32) -> Result<f64> {
    let g = Mat2::new(1, 0, 1 << (m - 1), 1);
    let e = h_quotient(m);
    let a = eval_eta_quotient(&e, tau, digits)?;
    let b = eval_eta_quotient(&e, &mobius(&g, tau), digits)?;
    Ok((&a + &b).log10_abs() - a.log10_abs())
}
