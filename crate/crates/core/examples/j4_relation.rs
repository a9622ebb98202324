//! j(4 tau) as a rational function of the level 4 hauptmodul, checked at a CM point.

use etaforge::bigcomplex::{bits_for_digits, BigComplex};
use etaforge::cm::{eval_eta_quotient, eval_j, tau_point, ImagQuadOrder};
use etaforge::decomposition::{g04, j4_hauptmodul_relation};
use rug::Complex;

fn main() {
    let rel = j4_hauptmodul_relation(6).unwrap();
    println!("{}", serde_json::to_string(&rel).unwrap());

    let digits = 300;
    let tau = tau_point(&ImagQuadOrder::new(-7, 1).unwrap(), digits);
    let prec = bits_for_digits(digits);
    let at = |k: u32| BigComplex::new(Complex::with_val(prec, tau.value() * k), digits);
    let g = eval_eta_quotient(&g04(), &at(3), digits).unwrap();
    let lhs = BigComplex::new(rel.eval(g.value()), digits);
    let rhs = eval_j(&at(12), digits).unwrap();
    println!("j(12 tau_K) = {}", rhs.re_string());
    println!("log10 relative difference {:.1}", lhs.log10_rel_diff(&rhs));
}
