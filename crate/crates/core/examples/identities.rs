//! Runs the exact Siegel / Weierstrass / h_n identity suite.

use etaforge::elliptic::verify_identities;
use etaforge::exponent;

fn main() {
    let start = std::time::Instant::now();
    for r in verify_identities(exponent(200, 1), exponent(4, 1)) {
        let status = if r.pass { "ok" } else { "FAIL" };
        println!("{status:>4}  {:<28} O(q^{})  {:.2?}", r.identity, r.trunc, start.elapsed());
    }
}
