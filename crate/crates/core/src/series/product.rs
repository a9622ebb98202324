//! Exact products of binomials `1 + s zeta_f^k q^e` over the group ring Z[Z/f].
//!
//! Intermediate coefficients stay as integer vectors indexed by the power of
//! zeta_f; reduction modulo the cyclotomic polynomial happens once at the end.

use std::collections::BTreeMap;

use super::cyclotomic::CyclotomicNumber;
use super::qseries::QSeries;

pub(crate) struct RootProduct {
    f: usize,
    denom: i64,
    trunc: i64,
    coeffs: BTreeMap<i64, Vec<i128>>,
}

fn add_rotated(dst: &mut [i128], src: &[i128], k: usize, sign: i128) {
    let f = dst.len();
    for (i, &c) in src.iter().enumerate() {
        if c != 0 {
            let j = (i + k) % f;
            dst[j] = dst[j]
                .checked_add(sign * c)
                .expect("coefficient overflow in product");
        }
    }
}

impl RootProduct {
    /// The constant 1 on grid `denom` with order `trunc` (in grid steps).
    pub(crate) fn one(f: u32, denom: i64, trunc: i64) -> Self {
        let f = f as usize;
        let mut coeffs = BTreeMap::new();
        if trunc > 0 {
            let mut v = vec![0i128; f];
            v[0] = 1;
            coeffs.insert(0, v);
        }
        Self {
            f,
            denom,
            trunc,
            coeffs,
        }
    }

    /// Multiplies by `1 + sign * zeta^k * q^(e/denom)` with `e >= 0`.
    pub(crate) fn mul_binomial(&mut self, sign: i128, k: i64, e: i64) {
        assert!(e >= 0);
        let k = k.rem_euclid(self.f as i64) as usize;
        if e == 0 {
            for v in self.coeffs.values_mut() {
                let old = v.clone();
                add_rotated(v, &old, k, sign);
            }
            self.coeffs.retain(|_, v| v.iter().any(|&c| c != 0));
            return;
        }
        let keys: Vec<i64> = self.coeffs.keys().rev().copied().collect();
        for n in keys {
            let t = n + e;
            if t >= self.trunc {
                continue;
            }
            let src = self.coeffs[&n].clone();
            let dst = self
                .coeffs
                .entry(t)
                .or_insert_with(|| vec![0i128; src.len()]);
            add_rotated(dst, &src, k, sign);
        }
    }

    pub(crate) fn finish(self) -> QSeries {
        let f = self.f as u32;
        let coeffs = self
            .coeffs
            .into_iter()
            .map(|(k, v)| (k, CyclotomicNumber::from_dense_ints(f, &v)))
            .collect();
        QSeries::from_raw(self.denom, f, coeffs, self.trunc)
    }
}
