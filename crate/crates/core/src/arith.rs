//! Small integer helpers shared by the modules.

use num_integer::Integer;

/// Positive divisors of n in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Prime factorization as (p, e) pairs with p increasing.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n > 0 && n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Index of Gamma0(N) in SL2(Z): N prod (1 + 1/p).
pub fn gamma0_index(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p + 1))
}

/// Inverse of a modulo m, if it exists.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let g = a.extended_gcd(&m);
    if g.gcd.abs() != 1 {
        return None;
    }
    Some((g.x * g.gcd).rem_euclid(m))
}

/// Kronecker symbol (d / n) for n > 0.
pub fn kronecker(d: i64, n: u64) -> i64 {
    let mut result = 1;
    for (p, e) in factorize(n) {
        let s = if p == 2 {
            if d % 2 == 0 {
                0
            } else if matches!(d.rem_euclid(8), 1 | 7) {
                1
            } else {
                -1
            }
        } else {
            legendre(d, p)
        };
        result *= s.pow(e);
    }
    result
}

fn legendre(a: i64, p: u64) -> i64 {
    let p = p as i64;
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r: i128 = 1;
    let mut b = a as i128;
    let mut e = (p - 1) / 2;
    let m = p as i128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}
