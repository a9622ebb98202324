//! q-expansions of eta-quotients: the level 4 hauptmodul and h_3.

use etaforge::decomposition::g04;
use etaforge::elliptic::h_quotient;
use etaforge::eta::eta_quotient_series;
use etaforge::exponent;

fn main() {
    let t = exponent(12, 1);
    println!("{} = {}", g04(), eta_quotient_series(&g04(), t));
    let h3 = h_quotient(3);
    println!("{h3} = {}", eta_quotient_series(&h3, t));
    println!("{}", serde_json::to_string(&eta_quotient_series(&g04(), exponent(4, 1))).unwrap());
}
