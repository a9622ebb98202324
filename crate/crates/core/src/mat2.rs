//! 2x2 integer matrices and their reductions modulo N.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::mod_inverse;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1, 0, 0, 1);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// Entries reduced into [0, n).
    pub fn reduce(&self, n: i64) -> Self {
        Self::new(
            self.a.rem_euclid(n),
            self.b.rem_euclid(n),
            self.c.rem_euclid(n),
            self.d.rem_euclid(n),
        )
    }

    pub fn mul_mod(&self, o: &Self, n: i64) -> Self {
        let m = |x: i64, y: i64, z: i64, w: i64| ((x as i128 * y as i128 + z as i128 * w as i128).rem_euclid(n as i128)) as i64;
        Self::new(
            m(self.a, o.a, self.b, o.c),
            m(self.a, o.b, self.b, o.d),
            m(self.c, o.a, self.d, o.c),
            m(self.c, o.b, self.d, o.d),
        )
    }

    pub fn scale_mod(&self, t: i64, n: i64) -> Self {
        Self::new(self.a * t, self.b * t, self.c * t, self.d * t).reduce(n)
    }

    /// Inverse modulo n when the determinant is a unit.
    pub fn inverse_mod(&self, n: i64) -> Option<Self> {
        let di = mod_inverse(self.det().rem_euclid(n), n)?;
        Some(Self::new(self.d * di, -self.b * di, -self.c * di, self.a * di).reduce(n))
    }

    /// Inverse in SL2(Z); only meaningful when det = 1.
    pub fn inverse_sl2(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn is_in_gamma0(&self, level: i64) -> bool {
        self.det() == 1 && self.c.mod_floor(&level) == 0
    }
}

impl std::fmt::Display for Mat2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}
