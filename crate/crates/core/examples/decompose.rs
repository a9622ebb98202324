//! Writes a weight 2 form on Gamma0(8) and a weight 0 function on Gamma0(16)
//! in terms of the generator eta-quotients.

use etaforge::decomposition::{decompose_form, decompose_weight0, monomial_basis, sturm_truncation};
use etaforge::eta::{enumerate_holomorphic, eta_quotient_series};
use etaforge::exponent;
use rug::Rational;

fn main() {
    let forms = enumerate_holomorphic(8, 2, 8);
    println!("{} holomorphic weight 2 eta-quotients at level 8", forms.len());
    let t = exponent(sturm_truncation(8, 2, 3) as i64, 1);
    let f = &eta_quotient_series(&forms[0], t) + &eta_quotient_series(&forms[forms.len() - 1], t).scale_rational(&Rational::from((-3, 2)));
    let c = decompose_form(&f, 3, 2, 3).unwrap();
    for (coeff, q) in &c.terms {
        println!("  {coeff:>6} * {q}");
    }
    println!("re-expands exactly: {}", c.expand(t) == f);

    let basis = monomial_basis(4, 2);
    let t = exponent(sturm_truncation(16, 0, 2) as i64, 1);
    let target = &eta_quotient_series(&basis[3].1, t) - &eta_quotient_series(&basis[7].1, t);
    let c = decompose_weight0(&target, 4, 2).unwrap();
    println!("{}", serde_json::to_string_pretty(&c).unwrap());
}
