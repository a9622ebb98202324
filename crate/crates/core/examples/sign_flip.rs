//! The conjugate of h_m(tau_K) over the ring class field of conductor 2^(m-1).

use etaforge::cm::ImagQuadOrder;
use etaforge::reciprocity::verify_sign_flip;

fn main() {
    for m in 3..=6u32 {
        for d in [-7, -8, -15] {
            let o = ImagQuadOrder::new(d, 1 << m).unwrap();
            let r = verify_sign_flip(m, &o, 120).unwrap();
            println!("m = {m}, d_K = {d:>3}: gamma {} lift {}  residual 1e{:.0}", r.gamma, r.lift, r.residual_log10);
        }
    }
}
