//! Compares the Fourier series of wp_v with a direct lattice sum, and checks
//! the Gamma0 transport law numerically.

use etaforge::bigcomplex::BigComplex;
use etaforge::elliptic::{gamma0_transport_check, lattice_radius, wp_lattice_sum, wp_series, FracVector};
use etaforge::exponent;
use etaforge::mat2::Mat2;
use rug::float::Constant;
use rug::{Complex, Float};

fn main() {
    let digits = 100;
    let tau = BigComplex::from_f64(0.0, 2.0, digits);
    let prec = tau.prec();
    let v = FracVector::of(1, 2, 0, 1);
    let lat = wp_lattice_sum(&v, &tau, lattice_radius(&tau)).unwrap();
    let s = wp_series(&v, exponent(60, 1)).unwrap();
    let tpi = Complex::with_val(prec, (0, Float::with_val(prec, Constant::Pi) * 2u32));
    let from_series = BigComplex::new(s.eval(tau.value()) * Complex::with_val(prec, tpi.square_ref()), digits);
    println!("lattice  {}", lat.value.re_string());
    println!("series   {}", from_series.re_string());
    println!("log10 relative difference {:.1}", lat.value.log10_rel_diff(&from_series));

    let w = FracVector::of(1, 2, 1, 2);
    for alpha in [Mat2::new(1, 0, 4, 1), Mat2::new(1, 0, 8, 1)] {
        let r = gamma0_transport_check(3, &alpha, &w, &tau, 60).unwrap();
        println!("{alpha}: v' = ({}, {}), pass {}", r.v_prime.0, r.v_prime.1, r.pass);
    }
}
