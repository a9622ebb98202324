//! Dedekind eta expansions, eta-quotients, the Ligozat criterion and cusp orders.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Ratio;
use rug::{Integer as BigInt, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, factorize, valuation};
use crate::error::{Error, Result};
use crate::series::{CyclotomicNumber, Exponent, QSeries};

/// `prod_{d | N} eta(d tau)^{m_d}`. Zero exponents are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "EtaJson")]
pub struct EtaQuotient {
    level: u64,
    exps: BTreeMap<u64, i64>,
}

#[derive(Deserialize)]
struct EtaJson {
    level: u64,
    exps: BTreeMap<u64, i64>,
}

impl TryFrom<EtaJson> for EtaQuotient {
    type Error = Error;
    fn try_from(j: EtaJson) -> Result<Self> {
        EtaQuotient::new(j.level, j.exps)
    }
}

impl EtaQuotient {
    pub fn new<I: IntoIterator<Item = (u64, i64)>>(level: u64, exps: I) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (d, m) in exps {
            if d == 0 || level % d != 0 {
                return Err(Error::NotADivisor { d, level });
            }
            *map.entry(d).or_insert(0) += m;
        }
        map.retain(|_, m| *m != 0);
        Ok(Self { level, exps: map })
    }

    pub fn constant(level: u64) -> Self {
        Self {
            level,
            exps: BTreeMap::new(),
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn exps(&self) -> &BTreeMap<u64, i64> {
        &self.exps
    }

    pub fn exponent(&self, d: u64) -> i64 {
        self.exps.get(&d).copied().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn weight(&self) -> Ratio<i64> {
        Ratio::new(self.exps.values().sum(), 2)
    }

    /// Order of vanishing at infinity: sum of d m_d / 24.
    pub fn leading_exponent(&self) -> Exponent {
        Ratio::new(self.exps.iter().map(|(&d, &m)| d as i64 * m).sum(), 24)
    }

    /// Same quotient viewed at a multiple of its level.
    pub fn lift(&self, level: u64) -> Result<Self> {
        if level % self.level != 0 {
            return Err(Error::NotADivisor {
                d: self.level,
                level,
            });
        }
        Ok(Self {
            level,
            exps: self.exps.clone(),
        })
    }

    /// Product of two quotients, at the lcm of their levels.
    pub fn mul(&self, other: &Self) -> Self {
        let mut exps = self.exps.clone();
        for (&d, &m) in &other.exps {
            *exps.entry(d).or_insert(0) += m;
        }
        exps.retain(|_, m| *m != 0);
        Self {
            level: self.level.lcm(&other.level),
            exps,
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return Self::constant(self.level);
        }
        Self {
            level: self.level,
            exps: self.exps.iter().map(|(&d, &m)| (d, m * k)).collect(),
        }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    /// E(s tau) as an eta-quotient at level s N.
    pub fn scaled(&self, s: u64) -> Self {
        Self {
            level: self.level * s,
            exps: self.exps.iter().map(|(&d, &m)| (d * s, m)).collect(),
        }
    }

    /// Exponents for every divisor of the level, zeros included.
    pub fn exponent_vector(&self) -> Vec<(u64, i64)> {
        divisors(self.level)
            .into_iter()
            .map(|d| (d, self.exponent(d)))
            .collect()
    }
}

impl std::fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .map(|(d, m)| format!("eta({d}t)^{m}"))
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// eta(r tau) = q^(r/24) prod (1 - q^(r n)), from the pentagonal number theorem.
pub fn eta_series(scale: Exponent, trunc: Exponent) -> QSeries {
    assert!(*scale.numer() > 0, "eta scale must be positive");
    let mut terms = Vec::new();
    // Exponent r (k(3k-1)/2 + 1/24) = r (6k - 1)^2 / 24 for k in Z.
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let e = scale * Ratio::new((6 * kk - 1).pow(2), 24);
            if e < trunc {
                any = true;
                let sign = if kk % 2 == 0 { 1 } else { -1 };
                terms.push((e, CyclotomicNumber::from_int(1, sign)));
            }
        }
        if !any && k > 0 {
            break;
        }
        k += 1;
    }
    QSeries::from_terms(terms, trunc)
}

/// Coefficients of prod_d prod_n (1 - q^(d n))^(m_d) below q^len.
fn eta_product_coefficients(exps: &BTreeMap<u64, i64>, len: usize) -> Vec<BigInt> {
    // q d/dq log F = sum a_m q^m with a_m = -sum_{e | m} e c_e,
    // c_e = sum_{d | e} m_d.
    let mut c = vec![0i64; len];
    for (&d, &m) in exps {
        let mut e = d as usize;
        while e < len {
            c[e] += m;
            e += d as usize;
        }
    }
    let mut a = vec![BigInt::new(); len];
    for e in 1..len {
        if c[e] == 0 {
            continue;
        }
        let w = e as i64 * c[e];
        let mut m = e;
        while m < len {
            a[m] -= w;
            m += e;
        }
    }
    let mut f = vec![BigInt::new(); len];
    if len > 0 {
        f[0] = BigInt::from(1);
    }
    for m in 1..len {
        let mut acc = BigInt::new();
        for j in 1..=m {
            if !a[j].is_zero() && !f[m - j].is_zero() {
                acc += &a[j] * &f[m - j];
            }
        }
        acc /= m as i64;
        f[m] = acc;
    }
    f
}

/// Expansion of the quotient; leading term q^(sum d m_d / 24) with coefficient 1.
pub fn eta_quotient_series(e: &EtaQuotient, trunc: Exponent) -> QSeries {
    let lead = e.leading_exponent();
    let span = trunc - lead;
    let len = if span <= Ratio::from_integer(0) {
        0
    } else {
        span.ceil().to_integer() as usize
    };
    let f = eta_product_coefficients(&e.exps, len);
    let terms = f
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(n, c)| {
            (
                lead + Ratio::from_integer(n as i64),
                CyclotomicNumber::from_rational(1, Rational::from(c)),
            )
        });
    QSeries::from_terms(terms, trunc)
}

/// Outcome of the Ligozat modularity criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModularityReport {
    pub weight: String,
    pub cond_parity: bool,
    pub cond_24a: bool,
    pub cond_24b: bool,
    pub cond_square: bool,
    pub passes: bool,
    pub sum_exponents: i64,
    pub sum_d_m: i64,
    pub sum_n_over_d_m: i64,
}

pub fn ligozat_check(e: &EtaQuotient) -> ModularityReport {
    let n = e.level as i64;
    let sum: i64 = e.exps.values().sum();
    let s_a: i64 = e.exps.iter().map(|(&d, &m)| d as i64 * m).sum();
    let s_b: i64 = e.exps.iter().map(|(&d, &m)| n / d as i64 * m).sum();
    // prod d^{m_d} is a square in Q iff every prime valuation is even.
    let cond_square = factorize(e.level).iter().all(|&(p, _)| {
        e.exps
            .iter()
            .map(|(&d, &m)| valuation(d, p) as i64 * m)
            .sum::<i64>()
            % 2
            == 0
    });
    let cond_parity = sum % 2 == 0;
    let cond_24a = s_a % 24 == 0;
    let cond_24b = s_b % 24 == 0;
    ModularityReport {
        weight: e.weight().to_string(),
        cond_parity,
        cond_24a,
        cond_24b,
        cond_square,
        passes: cond_parity && cond_24a && cond_24b && cond_square,
        sum_exponents: sum,
        sum_d_m: s_a,
        sum_n_over_d_m: s_b,
    }
}

/// A cusp a/c of Gamma0(N): c | N, gcd(a, c) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cusp {
    pub a: i64,
    pub c: i64,
}

impl Cusp {
    pub fn is_infinity(&self, level: u64) -> bool {
        self.c as u64 == level
    }
}

impl std::fmt::Display for Cusp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.a, self.c)
    }
}

/// Representatives a/c, c | N, a running over units mod gcd(c, N/c).
pub fn cusps(level: u64) -> Vec<Cusp> {
    let n = level as i64;
    let mut out = Vec::new();
    for c in divisors(level) {
        let c = c as i64;
        let g = c.gcd(&(n / c));
        for a0 in 0..g {
            if a0.gcd(&g) != 1 {
                continue;
            }
            let mut a = if a0 == 0 { g } else { a0 };
            while a.gcd(&c) != 1 {
                a += g;
            }
            out.push(Cusp { a, c });
        }
    }
    out
}

/// Width of the cusp with denominator c.
pub fn cusp_width(level: u64, c: u64) -> u64 {
    let n = level;
    n / (c * c).gcd(&n)
}

fn order_at(e: &EtaQuotient, c: i64) -> Exponent {
    let n = e.level as i64;
    let g = c.gcd(&(n / c));
    e.exps
        .iter()
        .map(|(&d, &m)| {
            let d = d as i64;
            Ratio::new(n * c.gcd(&d).pow(2) * m, 24 * g * c * d)
        })
        .sum()
}

/// Order of vanishing at every cusp, measured in the local parameter.
pub fn cusp_orders(e: &EtaQuotient) -> Vec<(Cusp, Exponent)> {
    cusps(e.level)
        .into_iter()
        .map(|cu| (cu, order_at(e, cu.c)))
        .collect()
}

/// Holomorphic eta-quotients of the given weight at level N with |m_d| <= bound.
///
/// Passing means the Ligozat criterion holds and every cusp order is >= 0.
pub fn enumerate_holomorphic(level: u64, weight: i64, bound: i64) -> Vec<EtaQuotient> {
    let divs = divisors(level);
    let k = divs.len();
    let n = level as i64;
    let total = 2 * weight;
    // order at c is proportional to sum_d gcd(c,d)^2 / d * m_d (positive factor dropped);
    // common denominator level makes the coefficients integral.
    let cs: Vec<i64> = divs.iter().map(|&c| c as i64).collect();
    let a: Vec<Vec<i64>> = cs
        .iter()
        .map(|&c| {
            divs.iter()
                .map(|&d| c.gcd(&(d as i64)).pow(2) * n / d as i64)
                .collect()
        })
        .collect();
    // Substitute the last exponent m_k = total - sum others.
    let reduced: Vec<Vec<i64>> = a
        .iter()
        .map(|row| (0..k - 1).map(|i| row[i] - row[k - 1]).collect())
        .collect();
    let offsets: Vec<i64> = a.iter().map(|row| row[k - 1] * total).collect();
    let mut out = Vec::new();
    if k == 1 {
        let m = total;
        if m.abs() <= bound {
            let e = EtaQuotient::new(level, [(1, m)]).expect("divisor");
            if ligozat_check(&e).passes && cusp_orders(&e).iter().all(|(_, o)| *o >= Ratio::from_integer(0)) {
                out.push(e);
            }
        }
        return out;
    }
    let mut current = vec![0i64; k - 1];
    let mut partial = offsets.clone();
    search(
        0,
        &mut current,
        0,
        &mut partial,
        &reduced,
        bound,
        total,
        &divs,
        level,
        &mut out,
    );
    out.sort_by_key(|e| e.exponent_vector());
    out
}

#[allow(clippy::too_many_arguments)]
fn search(
    i: usize,
    current: &mut Vec<i64>,
    sum: i64,
    partial: &mut Vec<i64>,
    reduced: &[Vec<i64>],
    bound: i64,
    total: i64,
    divs: &[u64],
    level: u64,
    out: &mut Vec<EtaQuotient>,
) {
    let free = current.len();
    let remaining = (free - i) as i64;
    // The last exponent must stay within the box.
    let last = total - sum;
    if last - remaining * bound > bound || last + remaining * bound < -bound {
        return;
    }
    // Each order can still grow by at most bound * sum |coef| over free slots.
    for (row, &p) in reduced.iter().zip(partial.iter()) {
        let slack: i64 = row[i..].iter().map(|c| c.abs()).sum::<i64>() * bound;
        if p + slack < 0 {
            return;
        }
    }
    if i == free {
        if last.abs() > bound {
            return;
        }
        let mut exps: Vec<(u64, i64)> = divs[..free]
            .iter()
            .zip(current.iter())
            .map(|(&d, &m)| (d, m))
            .collect();
        exps.push((divs[free], last));
        let e = EtaQuotient::new(level, exps).expect("divisors");
        if ligozat_check(&e).passes {
            out.push(e);
        }
        return;
    }
    for m in -bound..=bound {
        current[i] = m;
        for (row, p) in reduced.iter().zip(partial.iter_mut()) {
            *p += row[i] * m;
        }
        search(i + 1, current, sum + m, partial, reduced, bound, total, divs, level, out);
        for (row, p) in reduced.iter().zip(partial.iter_mut()) {
            *p -= row[i] * m;
        }
    }
    current[i] = 0;
}
