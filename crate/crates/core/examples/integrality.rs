//! Integrality of M eta(M tau_0)^2 / eta(tau_0)^2 through its Galois orbit.

use etaforge::cm::{integrality_check, ImagQuadOrder};

fn main() {
    for (m, d, n) in [(2, -4, 2), (4, -7, 12), (2, -7, 8), (3, -8, 3)] {
        let o = ImagQuadOrder::new(d, n).unwrap();
        match integrality_check(m, &o, 200) {
            Ok(r) => println!(
                "M = {m}, d_K = {d}, N = {n}: x^{} has polynomial [{}]; monic integral {}, constant divides M^{}: {}",
                r.power,
                r.orbit_poly.join(", "),
                r.monic_integral,
                r.degree,
                r.constant_divides
            ),
            Err(e) => println!("M = {m}, d_K = {d}, N = {n}: {e}"),
        }
    }
}
