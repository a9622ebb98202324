use etaforge::bigcomplex::{bits_for_digits, BigComplex};
use etaforge::cm::{eval_eta, eval_eta_direct, eval_eta_quotient};
use etaforge::eta::{eta_quotient_series, EtaQuotient};
use etaforge::mat2::Mat2;
use etaforge::reciprocity::sl2_lift;
use etaforge::{exponent, CyclotomicNumber, Exponent, QSeries};
use proptest::prelude::*;
use rug::{Complex, Rational};

const F: u32 = 12;

fn cyclo() -> impl Strategy<Value = CyclotomicNumber> {
    prop::collection::vec((0i64..F as i64, -6i64..=6, 1i64..=3), 1..4).prop_map(|terms| {
        CyclotomicNumber::from_power_terms(
            F,
            terms.into_iter().map(|(k, n, d)| (k, Rational::from((n, d)))),
        )
    })
}

fn series(trunc: i64) -> impl Strategy<Value = QSeries> {
    prop::collection::vec((-2i64..trunc, 1i64..=2, cyclo()), 0..6).prop_map(move |terms| {
        QSeries::from_terms(
            terms.into_iter().map(|(n, d, c)| (exponent(n, d), c)),
            exponent(trunc, 1),
        )
    })
}

/// Series whose lowest displayed coefficient is a nonzero integer.
fn unit_series(trunc: i64) -> impl Strategy<Value = QSeries> {
    (series(trunc), -3i64..3, prop::sample::select(vec![-2i64, -1, 1, 3])).prop_map(
        move |(s, lead, c)| {
            let s = s.shift(exponent(lead + 3, 1)).truncate(exponent(trunc, 1));
            let m = QSeries::monomial(CyclotomicNumber::from_int(F, c), exponent(lead, 1), exponent(trunc, 1));
            &m + &s
        },
    )
}

fn quotient() -> impl Strategy<Value = EtaQuotient> {
    prop::collection::vec(-6i64..=6, 3).prop_map(|m| {
        EtaQuotient::new(4, [(1, m[0]), (2, m[1]), (4, m[2])]).unwrap()
    })
}

fn t(n: i64) -> Exponent {
    exponent(n, 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in series(12), b in series(12), c in series(12)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn inverse_is_two_sided(a in unit_series(14)) {
        let inv = a.inv().unwrap();
        let one = &a * &inv;
        prop_assert_eq!(one.leading_exponent(), Some(t(0)));
        prop_assert_eq!(one.num_terms(), 1);
        prop_assert!(one.coeff(t(0)).is_one());
    }

    #[test]
    fn pow_matches_repeated_product(a in unit_series(10), k in 0i64..4) {
        let mut acc = QSeries::one(a.trunc() - a.valuation());
        for _ in 0..k {
            acc = &acc * &a;
        }
        let p = a.pow(k).unwrap();
        prop_assert!((&p - &acc).is_zero());
    }

    #[test]
    fn rescale_is_multiplicative(a in series(10), b in series(10), r in 1i64..4, s in 1i64..3) {
        let r = exponent(r, s);
        prop_assert_eq!((&a * &b).rescale(r), &a.rescale(r) * &b.rescale(r));
    }

    #[test]
    fn galois_is_a_ring_map(a in series(8), b in series(8), d in prop::sample::select(vec![1i64, 5, 7, 11])) {
        prop_assert_eq!((&a * &b).galois(d).unwrap(), &a.galois(d).unwrap() * &b.galois(d).unwrap());
    }

    #[test]
    fn cyclotomic_matches_complex(x in cyclo(), y in cyclo()) {
        let prec = 128;
        let exact = (&x * &y).to_complex(prec);
        let float = Complex::with_val(prec, x.to_complex(prec) * y.to_complex(prec));
        let diff = Complex::with_val(prec, &exact - &float);
        prop_assert!(diff.abs().real().to_f64() < 1e-25);
        if !x.is_zero() {
            let back = &(&x * &x.inv().unwrap()) * &y;
            prop_assert_eq!(back, y);
        }
    }

    #[test]
    fn eta_quotients_multiply(a in quotient(), b in quotient()) {
        let trunc = t(8);
        let lhs = eta_quotient_series(&a.mul(&b), trunc);
        let rhs = &eta_quotient_series(&a, trunc) * &eta_quotient_series(&b, trunc);
        let common = lhs.trunc().min(rhs.trunc());
        prop_assert_eq!(lhs.truncate(common), rhs.truncate(common));
    }

    #[test]
    fn lifts_reduce_back(a in 0i64..24, b in 0i64..24, c in 0i64..24, n in prop::sample::select(vec![4i64, 8, 12, 16, 24])) {
        // complete (a, b, c) to a determinant-1 matrix mod n when possible
        let m = Mat2::new(a, b, c, 0).reduce(n);
        let d = (0..n).find(|&d| (m.a * d - m.b * m.c).rem_euclid(n) == 1 % n);
        if let Some(d) = d {
            let alpha = Mat2::new(m.a, m.b, m.c, d);
            let l = sl2_lift(&alpha, n).unwrap();
            prop_assert_eq!(l.det(), 1);
            prop_assert_eq!(l.reduce(n), alpha);
            let bound = n * n * n;
            prop_assert!([l.a, l.b, l.c, l.d].iter().all(|x| x.abs() <= bound));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn series_and_product_evaluation_agree(e in quotient(), x in -0.5f64..0.5, y in 0.5f64..1.5) {
        let digits = 60;
        let tau = BigComplex::from_f64(x, y, digits);
        let prod = eval_eta_quotient(&e, &tau, digits).unwrap();
        let need = (digits as f64 + 10.0) * std::f64::consts::LN_10 / (2.0 * std::f64::consts::PI * y);
        let s = eta_quotient_series(&e, t(need.ceil() as i64 + 10));
        let val = BigComplex::new(s.eval(tau.value()), digits);
        prop_assert!(prod.log10_rel_diff(&val) < -(digits as f64) + 5.0);
    }

    #[test]
    fn reduction_matches_direct_product(x in -2.0f64..2.0, y in 0.05f64..0.9) {
        let digits = 60;
        let tau = BigComplex::from_f64(x, y, digits);
        let a = eval_eta(&tau, digits).unwrap();
        let b = eval_eta_direct(&tau, digits).unwrap();
        prop_assert!(a.log10_rel_diff(&b) < -(digits as f64) + 5.0);
    }

    #[test]
    fn eta_inversion_law(x in -0.5f64..0.5, y in 0.3f64..3.0) {
        let digits = 60;
        let prec = bits_for_digits(digits);
        let tau = BigComplex::from_f64(x, y, digits);
        let inv = BigComplex::new(Complex::with_val(prec, -Complex::with_val(prec, tau.value().recip_ref())), digits);
        let lhs = eval_eta(&inv, digits).unwrap();
        let root = Complex::with_val(prec, tau.value() * Complex::with_val(prec, (0, -1))).sqrt();
        let rhs = BigComplex::new(root * eval_eta(&tau, digits).unwrap().value(), digits);
        prop_assert!(lhs.log10_rel_diff(&rhs) < -(digits as f64) + 5.0);
    }
}
