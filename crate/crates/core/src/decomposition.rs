//! Writing modular forms on Gamma0(2^n) as sums of eta-quotients, and the
//! rational expression of j(4 tau) in the level-4 hauptmodul.

use std::collections::{BTreeMap, HashSet};

use num_rational::Ratio;
use rug::{Complex, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::gamma0_index;
use crate::elliptic::h_quotient;
use crate::error::{Error, Result};
use crate::eta::{cusp_orders, eta_quotient_series, EtaQuotient};
use crate::series::serde_impl::parse_rational;
use crate::series::{CyclotomicNumber, Exponent, QSeries};

/// g_{0,4} = eta(4 tau)^8 / eta(tau)^8.
pub fn g04() -> EtaQuotient {
    EtaQuotient::new(4, [(1, -8), (4, 8)]).expect("divisors of 4")
}

/// eta(2 tau)^24 / (eta(4 tau)^16 eta(tau)^8).
pub fn level4_unit() -> EtaQuotient {
    EtaQuotient::new(4, [(1, -8), (2, 24), (4, -16)]).expect("divisors of 4")
}

/// Weight -2 quotient eta(2 tau)^4 / eta(4 tau)^8 used to clear the weight.
pub fn weight_shift() -> EtaQuotient {
    EtaQuotient::new(4, [(2, 4), (4, -8)]).expect("divisors of 4")
}

/// g_{0,4}, the level-4 unit and its inverse, then h_3, ..., h_n, all at level 2^n.
pub fn generator_set(n: u32) -> Vec<EtaQuotient> {
    assert!(n >= 2, "generator set needs n >= 2");
    let level = 1u64 << n;
    let mut out = vec![g04(), level4_unit(), level4_unit().inv()];
    for m in 3..=n {
        out.push(h_quotient(m));
    }
    out.into_iter()
        .map(|e| e.lift(level).expect("level divides 2^n"))
        .collect()
}

/// Sum over cusps of the largest pole order among the generators.
fn pole_allowance(level: u64) -> u64 {
    if level < 4 || !level.is_power_of_two() {
        return gamma0_index(level);
    }
    let gens = generator_set(level.trailing_zeros());
    let mut worst: BTreeMap<_, Exponent> = BTreeMap::new();
    for g in &gens {
        for (c, o) in cusp_orders(g) {
            let p = worst.entry(c).or_insert(Ratio::from_integer(0));
            if -o > *p {
                *p = -o;
            }
        }
    }
    let total: Exponent = worst.values().sum();
    total.ceil().to_integer() as u64
}

/// Number of leading coefficients compared when deciding equality of
/// modular objects built from at most `degree_bound` generator factors:
/// ceil(weight * index / 12) + degree_bound * allowance + 1.
pub fn sturm_truncation(level: u64, weight: u64, degree_bound: u64) -> u64 {
    let index = gamma0_index(level);
    (weight * index).div_ceil(12) + degree_bound * pole_allowance(level) + 1
}

/// Sum of rational multiples of eta-quotients sharing one level.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaCombination {
    pub level: u64,
    pub weight: i64,
    pub terms: Vec<(Rational, EtaQuotient)>,
}

impl EtaCombination {
    pub fn expand(&self, trunc: Exponent) -> QSeries {
        let mut acc = QSeries::zero(trunc);
        for (c, q) in &self.terms {
            let s = eta_quotient_series(q, trunc).scale_rational(c);
            acc = &acc + &s;
        }
        acc
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    quotient: EtaQuotient,
}

#[derive(Serialize, Deserialize)]
struct CombinationJson {
    level: u64,
    weight: i64,
    terms: Vec<TermJson>,
}

impl Serialize for EtaCombination {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CombinationJson {
            level: self.level,
            weight: self.weight,
            terms: self
                .terms
                .iter()
                .map(|(c, q)| TermJson {
                    coeff: format!("{}/{}", c.numer(), c.denom()),
                    quotient: q.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EtaCombination {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CombinationJson::deserialize(d)?;
        let mut terms = Vec::new();
        for t in j.terms {
            let c = parse_rational(&t.coeff).map_err(serde::de::Error::custom)?;
            terms.push((c, t.quotient));
        }
        Ok(Self {
            level: j.level,
            weight: j.weight,
            terms,
        })
    }
}

/// A monomial in the generators: exponent per generator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn quotient(&self, gens: &[EtaQuotient]) -> EtaQuotient {
        let level = gens[0].level();
        self.0
            .iter()
            .zip(gens)
            .fold(EtaQuotient::constant(level), |acc, (&k, g)| acc.mul(&g.pow(k as i64)))
    }
}

fn compositions(slots: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if prefix.len() == slots {
        if prefix.iter().sum::<u32>() == total {
            out.push(Monomial(prefix.clone()));
        }
        return;
    }
    let used: u32 = prefix.iter().sum();
    for k in 0..=(total - used) {
        prefix.push(k);
        compositions(slots, total, prefix, out);
        prefix.pop();
    }
}

/// Monomials of total degree <= bound, without the product of the unit and
/// its inverse, ordered by degree then lexicographically, and deduplicated
/// by the eta-quotient they define (first occurrence kept).
pub fn monomial_basis(n: u32, degree_bound: u32) -> Vec<(Monomial, EtaQuotient)> {
    let gens = generator_set(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for deg in 0..=degree_bound {
        let mut ms = Vec::new();
        compositions(gens.len(), deg, &mut Vec::new(), &mut ms);
        ms.sort_by(|a, b| b.0.cmp(&a.0));
        for m in ms {
            if m.0[1] > 0 && m.0[2] > 0 {
                continue;
            }
            let q = m.quotient(&gens);
            if seen.insert(q.clone()) {
                out.push((m, q));
            }
        }
    }
    out
}

type SparseVec = BTreeMap<i64, Rational>;

fn to_sparse(s: &QSeries) -> Result<SparseVec> {
    let mut v = SparseVec::new();
    for (e, c) in s.terms() {
        if !e.is_integer() {
            return Err(Error::InvalidArgument(format!(
                "target has a term at q^{e}, off the integer grid"
            )));
        }
        let q = c.as_rational().ok_or_else(|| {
            Error::InvalidArgument("target coefficients must be rational".into())
        })?;
        v.insert(e.to_integer(), q.clone());
    }
    Ok(v)
}

fn axpy(dst: &mut SparseVec, a: &Rational, src: &SparseVec) {
    for (k, x) in src {
        let t = Rational::from(a * x);
        match dst.get_mut(k) {
            Some(y) => {
                *y += t;
                if y.is_zero() {
                    dst.remove(k);
                }
            }
            None => {
                dst.insert(*k, t);
            }
        }
    }
}

/// Echelon form keyed by lowest exponent; each row remembers which input
/// columns it combines.
struct Echelon {
    rows: BTreeMap<i64, (SparseVec, SparseVec)>,
}

impl Echelon {
    fn new() -> Self {
        Self { rows: BTreeMap::new() }
    }

    /// Reduces `v`; returns the residual and the combination of basis columns
    /// subtracted from it.
    fn reduce(&self, mut v: SparseVec) -> (SparseVec, SparseVec) {
        let mut used = SparseVec::new();
        // Terms without a pivot are set aside; later pivots may still clear others.
        let mut rest = SparseVec::new();
        while let Some((&k, lead)) = v.iter().next() {
            if let Some((row, comb)) = self.rows.get(&k) {
                let f = Rational::from(lead / &row[&k]);
                let neg = Rational::from(-&f);
                axpy(&mut v, &neg, row);
                axpy(&mut used, &f, comb);
            } else {
                let (k, x) = v.pop_first().expect("nonempty");
                rest.insert(k, x);
            }
        }
        (rest, used)
    }

    /// Adds column `idx`; false when it depends on earlier columns.
    fn insert(&mut self, idx: usize, v: SparseVec) -> bool {
        let (rest, used) = self.reduce(v);
        let Some((&k, _)) = rest.iter().next() else {
            return false;
        };
        let mut comb = SparseVec::new();
        comb.insert(idx as i64, Rational::from(1));
        let neg: Rational = Rational::from(-1);
        axpy(&mut comb, &neg, &used);
        self.rows.insert(k, (rest, comb));
        true
    }
}

fn check_level(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("level exponent n = {n} must be >= 2")));
    }
    Ok(())
}

/// Solves target = sum c_m M_m over generator monomials, comparing
/// coefficients below q^order.
pub fn decompose_weight0_to(
    target: &QSeries,
    n: u32,
    degree_bound: u32,
    order: i64,
) -> Result<EtaCombination> {
    check_level(n)?;
    let order_e = Ratio::from_integer(order);
    if target.trunc() < order_e {
        return Err(Error::InsufficientTruncation {
            have: target.trunc().to_string(),
            need: order,
        });
    }
    let goal = to_sparse(&target.truncate(order_e))?;
    let basis = monomial_basis(n, degree_bound);
    let mut ech = Echelon::new();
    for (i, (_, q)) in basis.iter().enumerate() {
        if q.leading_exponent() >= order_e {
            continue;
        }
        let col = to_sparse(&eta_quotient_series(q, order_e))?;
        ech.insert(i, col);
    }
    let (rest, used) = ech.reduce(goal);
    if let Some((&k, _)) = rest.iter().next() {
        return Err(Error::InsufficientBasis {
            residual_exponent: k.to_string(),
        });
    }
    let level = 1u64 << n;
    let terms: Vec<(Rational, EtaQuotient)> = used
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (c, basis[i as usize].1.clone()))
        .collect();
    let comb = EtaCombination {
        level,
        weight: 0,
        terms,
    };
    post_check(&comb, target, order_e)?;
    Ok(comb)
}

fn post_check(comb: &EtaCombination, target: &QSeries, order: Exponent) -> Result<()> {
    let diff = &comb.expand(order) - &target.truncate(order);
    match diff.leading_exponent() {
        None => Ok(()),
        Some(e) => Err(Error::InsufficientBasis {
            residual_exponent: e.to_string(),
        }),
    }
}

/// Decomposes a weight-0 function in the ring of Gamma0(2^n) at the
/// comparison order given by [`sturm_truncation`].
pub fn decompose_weight0(target: &QSeries, n: u32, degree_bound: u32) -> Result<EtaCombination> {
    check_level(n)?;
    let order = sturm_truncation(1 << n, 0, degree_bound as u64) as i64;
    decompose_weight0_to(target, n, degree_bound, order)
}

/// Decomposes a holomorphic form of weight 2k on Gamma0(2^n): multiplies by
/// (eta(2 tau)^4 / eta(4 tau)^8)^k, solves in weight 0 and divides back.
pub fn decompose_form(
    target: &QSeries,
    n: u32,
    weight: u32,
    degree_bound: u32,
) -> Result<EtaCombination> {
    check_level(n)?;
    if weight % 2 != 0 {
        return Err(Error::InvalidArgument(format!("weight {weight} must be even")));
    }
    let k = (weight / 2) as i64;
    let level = 1u64 << n;
    let order = sturm_truncation(level, weight as u64, degree_bound as u64) as i64;
    let order_e = Ratio::from_integer(order);
    if target.trunc() < order_e {
        return Err(Error::InsufficientTruncation {
            have: target.trunc().to_string(),
            need: order,
        });
    }
    let shift = weight_shift().lift(level).expect("4 | 2^n");
    let t = target.truncate(order_e);
    let lifted = if k == 0 {
        t.clone()
    } else {
        &t * &eta_quotient_series(&shift.pow(k), order_e)
    };
    let inner = decompose_weight0_to(&lifted, n, degree_bound, order - k)?;
    let back = shift.pow(-k);
    let mut merged: BTreeMap<EtaQuotient, Rational> = BTreeMap::new();
    for (c, q) in inner.terms {
        *merged.entry(q.mul(&back)).or_default() += c;
    }
    let comb = EtaCombination {
        level,
        weight: weight as i64,
        terms: merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(q, c)| (c, q))
            .collect(),
    };
    post_check(&comb, &t, order_e)?;
    Ok(comb)
}

fn sigma3(m: i64) -> i64 {
    (1..=m).filter(|d| m % d == 0).map(|d| d * d * d).sum()
}

/// 1 + 240 sum sigma_3(n) q^n.
pub fn e4_series(trunc: Exponent) -> QSeries {
    let mut terms = vec![(Ratio::from_integer(0), CyclotomicNumber::one(1))];
    let mut m = 1;
    while Ratio::from_integer(m) < trunc {
        terms.push((Ratio::from_integer(m), CyclotomicNumber::from_int(1, 240 * sigma3(m))));
        m += 1;
    }
    QSeries::from_terms(terms, trunc)
}

/// j = E4^3 / Delta with Delta = eta^24.
pub fn j_series(trunc: Exponent) -> QSeries {
    let t = trunc + 2;
    let e4 = e4_series(t);
    let delta = eta_quotient_series(&EtaQuotient::new(1, [(1, 24)]).expect("level 1"), t);
    let cube = e4.pow(3).expect("unit leading term");
    (&cube * &delta.inv().expect("unit leading term")).truncate(trunc)
}

/// numer(X) / denom(X), coefficients lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalRelation {
    pub numer: Vec<Rational>,
    pub denom: Vec<Rational>,
}

impl RationalRelation {
    fn eval_poly(p: &[Rational], x: &Complex) -> Complex {
        let prec = x.prec().0;
        let mut acc = Complex::with_val(prec, 0);
        for c in p.iter().rev() {
            acc *= x;
            acc += rug::Float::with_val(prec, c);
        }
        acc
    }

    pub fn eval(&self, x: &Complex) -> Complex {
        Self::eval_poly(&self.numer, x) / Self::eval_poly(&self.denom, x)
    }

    /// Order of vanishing at X = 0.
    pub fn order_at_zero(p: &[Rational]) -> usize {
        p.iter().position(|c| !c.is_zero()).unwrap_or(p.len())
    }

    pub fn degree(p: &[Rational]) -> usize {
        p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    /// numer(g) - f denom(g) as a series.
    pub fn residual(&self, g: &QSeries, f: &QSeries) -> QSeries {
        let poly = |p: &[Rational]| {
            let t = g.trunc().min(f.trunc());
            let mut acc = QSeries::zero(t);
            let mut pow = QSeries::one(t);
            for c in p {
                acc = &acc + &pow.scale_rational(c);
                pow = &pow * g;
            }
            acc
        };
        &poly(&self.numer) - &(f * &poly(&self.denom))
    }
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    #[serde(rename = "A")]
    a: Vec<String>,
    #[serde(rename = "B")]
    b: Vec<String>,
}

impl Serialize for RationalRelation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let f = |p: &[Rational]| p.iter().map(|c| c.to_string()).collect();
        RelationJson {
            a: f(&self.numer),
            b: f(&self.denom),
        }
        .serialize(s)
    }
}

/// Basis of the right kernel of a rational matrix.
pub(crate) fn nullspace(mut rows: Vec<Vec<Rational>>, ncols: usize) -> Vec<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::from(rows[r][c].recip_ref());
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= Rational::from(&f * y);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rational::new(); ncols];
            v[fc] = Rational::from(1);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = Rational::from(-&rows[i][fc]);
            }
            v
        })
        .collect()
}

/// Finds A, B of least degree with j(4 tau) = A(g_{0,4}) / B(g_{0,4}),
/// normalized so that the lowest nonzero coefficient of B is 1; the
/// identity is checked through q^(order - 1) with order >= 60.
pub fn j4_hauptmodul_relation(degree_bound: usize) -> Result<RationalRelation> {
    let order = (sturm_truncation(4, 0, degree_bound as u64) as i64).max(60);
    let t = Ratio::from_integer(order);
    // j(4 tau) ~ q^-4, so every factor must be known four steps further.
    let t4 = t + 4;
    let g = eta_quotient_series(&g04(), t4);
    let j4 = j_series(t4 / 4 + 1).rescale(Ratio::from_integer(4)).truncate(t4);
    let low = -4i64;
    for d in 1..=degree_bound {
        // Columns: A_0..A_d then B_0..B_d.
        let mut powers = vec![QSeries::one(t4)];
        for i in 1..=d {
            powers.push(&powers[i - 1] * &g);
        }
        let mut cols: Vec<QSeries> = powers.clone();
        for p in &powers {
            cols.push(-&(&j4 * p));
        }
        let ncols = cols.len();
        let nrows = (order - low) as usize;
        let mut rows = vec![vec![Rational::new(); ncols]; nrows];
        for (ci, col) in cols.iter().enumerate() {
            for (e, c) in col.terms() {
                if e < t {
                    let r = (e.to_integer() - low) as usize;
                    rows[r][ci] = c.as_rational().expect("rational series").clone();
                }
            }
        }
        let kernel = nullspace(rows, ncols);
        if let Some(v) = kernel.into_iter().next() {
            let (a, b) = v.split_at(d + 1);
            let lead = b
                .iter()
                .find(|c| !c.is_zero())
                .cloned()
                .ok_or(Error::NoRelation { degree_bound })?;
            let inv = Rational::from(lead.recip_ref());
            let norm = |p: &[Rational]| {
                let mut p: Vec<Rational> = p.iter().map(|c| Rational::from(c * &inv)).collect();
                while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
                    p.pop();
                }
                p
            };
            let rel = RationalRelation {
                numer: norm(a),
                denom: norm(b),
            };
            if !rel.residual(&g, &j4).is_zero() {
                return Err(Error::NoRelation { degree_bound });
            }
            return Ok(rel);
        }
    }
    Err(Error::NoRelation { degree_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eta::ligozat_check;
    use crate::series::exponent;

    #[test]
    fn generators() {
        let g2 = generator_set(2);
        assert_eq!(g2.len(), 3);
        assert_eq!(g2[0], g04());
        let g3 = generator_set(3);
        assert_eq!(g3.len(), 4);
        assert_eq!(g3[3], h_quotient(3));
        for n in 2..=8 {
            for g in generator_set(n) {
                let r = ligozat_check(&g);
                assert!(r.passes && r.weight == "0", "{g}");
            }
        }
    }

    #[test]
    fn sturm_values() {
        assert_eq!(gamma0_index(4), 6);
        assert_eq!(sturm_truncation(4, 0, 6), 6 * 3 + 1);
        assert!(sturm_truncation(8, 2, 3) > sturm_truncation(8, 0, 3));
        assert!(sturm_truncation(16, 0, 3) >= sturm_truncation(8, 0, 3));
    }

    #[test]
    fn j_coefficients() {
        let j = j_series(exponent(4, 1));
        let c = |n| j.coeff_rational(exponent(n, 1)).unwrap();
        assert_eq!(c(-1), 1);
        assert_eq!(c(0), 744);
        assert_eq!(c(1), 196884);
        assert_eq!(c(2), 21493760);
        assert_eq!(c(3), 864299970);
        assert_eq!(j.rescale(exponent(4, 1)).leading_exponent(), Some(exponent(-4, 1)));
    }

    #[test]
    fn round_trip_generators() {
        let t = exponent(sturm_truncation(8, 0, 3) as i64, 1);
        let g = eta_quotient_series(&g04(), t);
        let c = decompose_weight0(&g, 3, 3).unwrap();
        assert_eq!(c.terms, vec![(Rational::from(1), g04().lift(8).unwrap())]);
        let h3 = eta_quotient_series(&h_quotient(3), t);
        let target = &(&g * &g).scale_rational(&Rational::from(2)) + &h3.scale_rational(&Rational::from(3));
        let c = decompose_weight0(&target, 3, 3).unwrap();
        assert_eq!(c.terms.len(), 2);
        assert!(c.terms.contains(&(Rational::from(3), h_quotient(3))));
        assert!(c.terms.contains(&(Rational::from(2), g04().pow(2).lift(8).unwrap())));
    }

    #[test]
    fn h3_squared_at_level4() {
        let t = exponent(sturm_truncation(4, 0, 4) as i64, 1);
        let s = eta_quotient_series(&h_quotient(3).pow(2), t);
        let c = decompose_weight0(&s, 2, 4).unwrap();
        assert_eq!(c.expand(t), s);
    }

    #[test]
    fn insufficient_cases() {
        let s = eta_quotient_series(&g04(), exponent(5, 1));
        assert!(matches!(decompose_weight0(&s, 2, 3), Err(Error::InsufficientTruncation { .. })));
        // h_4 lives on Gamma0(16), not in the level-4 ring.
        let t = exponent(sturm_truncation(4, 0, 2) as i64, 1);
        let s = eta_quotient_series(&h_quotient(4), t);
        assert!(matches!(decompose_weight0(&s, 2, 2), Err(Error::InsufficientBasis { .. })));
    }

    #[test]
    fn weight_two_form() {
        let forms = crate::eta::enumerate_holomorphic(8, 2, 8);
        let f = &forms[0];
        let t = exponent(sturm_truncation(8, 2, 3) as i64, 1);
        let s = eta_quotient_series(f, t);
        let c = decompose_form(&s, 3, 2, 3).unwrap();
        assert_eq!(c.expand(t), s);
        for (_, q) in &c.terms {
            let r = ligozat_check(q);
            assert!(r.passes && r.weight == "2", "{q}");
        }
    }

    #[test]
    fn j4_relation() {
        let rel = j4_hauptmodul_relation(6).unwrap();
        assert_eq!(RationalRelation::degree(&rel.numer), 6);
        let z = RationalRelation::order_at_zero(&rel.denom) as i64
            - RationalRelation::order_at_zero(&rel.numer) as i64;
        assert_eq!(z, 4);
        let expect_b: Vec<Rational> = [0, 0, 0, 0, 1, 16].iter().map(|&x| Rational::from(x)).collect();
        assert_eq!(rel.denom, expect_b);
    }
}
