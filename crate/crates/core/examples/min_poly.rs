//! Galois orbit and integer minimal polynomial of the class invariant for
//! Q(sqrt(-7)) and conductor 12.

use etaforge::cm::ImagQuadOrder;
use etaforge::reciprocity::class_polynomial;

fn main() {
    let o = ImagQuadOrder::new(-7, 12).unwrap();
    let r = class_polynomial(&o, 300).unwrap();
    for ((d, m), v) in r.reps.iter().zip(&r.values) {
        let v = etaforge::BigComplex::new(v.value().clone(), 20);
        let im = v.im_string();
        let sign = if im.starts_with('-') { "" } else { "+" };
        println!("diag(1,{d:>2}) {:?}  {} {sign}{im}i", m, v.re_string());
    }
    println!("poly {}", r.poly.join(" "));
    println!("residual {}, stable at {} digits: {}", r.max_rounding_residual, r.rung_digits, r.rung_agrees);
}
