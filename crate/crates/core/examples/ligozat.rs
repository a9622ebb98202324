//! Modularity conditions and cusp orders for a few quotients on Gamma0(2^n).

use etaforge::decomposition::generator_set;
use etaforge::eta::{cusp_orders, ligozat_check};

fn main() {
    for q in generator_set(4) {
        let r = ligozat_check(&q);
        let orders: Vec<String> = cusp_orders(&q)
            .iter()
            .map(|(c, o)| format!("{c}:{o}"))
            .collect();
        println!("{q:<40} weight {} passes {}  [{}]", r.weight, r.passes, orders.join(" "));
    }
}
