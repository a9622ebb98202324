//! The invariant 256 eta(N tau_K)^8 / eta((N/4) tau_K)^8 for a few orders.

use etaforge::cm::{class_invariant, ImagQuadOrder};

fn main() {
    for (d, n) in [(-7, 12), (-7, 4), (-8, 8), (-11, 16), (-20, 4)] {
        let o = ImagQuadOrder::new(d, n).unwrap();
        let v = class_invariant(&o, 60).unwrap();
        println!("d_K = {d:>4}, N = {n:>2}: {}", v.re_string());
    }
}
