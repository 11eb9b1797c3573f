//! Property tests for the stated invariants.

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use std::f64::consts::PI;

use qpolylog::cli::run_with;
use qpolylog::contour::{quad_F, QuadratureSpec};
use qpolylog::exact::{bernoulli_exact, i_pi, i_pi_h, q_poly, shuffles};
use qpolylog::identities::{check_series_vs_contour, LiPoint, SuiteConfig};
use qpolylog::report::recanonicalize;
use qpolylog::series::{classical_polylog, multiple_polylog, q_difference, q_integral, q_multiple_polylog, SeriesParams, TruncatedSeries};
use qpolylog::types::{convergence_strip, sort_reports};
use qpolylog::{CheckReport, HbarValue, MultiIndex};

fn small_index(m: usize) -> impl Strategy<Value = MultiIndex> {
    (prop::collection::vec(0u32..4, m), prop::collection::vec(0u32..4, m), prop::collection::vec(-3i32..5, m))
        .prop_map(|(a, b, n)| MultiIndex::new(a, b, n).unwrap())
}

fn binom(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, j| acc * (n - k + j) / j)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_additive_under_concat(x in (1usize..4).prop_flat_map(small_index), y in (1usize..4).prop_flat_map(small_index)) {
        prop_assert_eq!(x.concat(&y).weight(), x.weight() + y.weight());
        prop_assert_eq!(x.concat(&y).depth(), x.depth() + y.depth());
    }

    #[test]
    fn strip_monotone(a in 1u32..4, b in 0u32..4, da in 0u32..3, db in 0u32..3, h in 0.1f64..5.0) {
        let hb = HbarValue::real(h).unwrap();
        let s0 = convergence_strip(&MultiIndex::single(a, b, 1), &hb).unwrap()[0];
        let s1 = convergence_strip(&MultiIndex::single(a + da, b + db, 1), &hb).unwrap()[0];
        prop_assert!(s1 >= s0);
    }

    #[test]
    fn report_pass_iff_within_tolerance(r in -1e3f64..1e3, t in 1e-12f64..1e3) {
        let rep = CheckReport::new("x", serde_json::json!({}), r, t);
        prop_assert!(rep.residual >= 0.0);
        prop_assert_eq!(rep.pass, rep.residual <= rep.tolerance);
    }

    #[test]
    fn report_sort_is_order_independent(items in prop::collection::vec(("[a-c]{1,2}", 0u8..3), 1..8)) {
        let mk = |xs: &[(String, u8)]| {
            let mut v: Vec<CheckReport> = xs.iter().map(|(n, j)| CheckReport::new(n.clone(), serde_json::json!({"j": j}), 0.0, 1.0)).collect();
            sort_reports(&mut v);
            v.iter().map(|r| (r.identity_name.clone(), r.params.to_string())).collect::<Vec<_>>()
        };
        let mut rev = items.clone();
        rev.reverse();
        prop_assert_eq!(mk(&items), mk(&rev));
    }

    #[test]
    fn hbar_domain(re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let h = HbarValue::new(C64::new(re, im));
        if im == 0.0 && re <= 0.0 {
            prop_assert!(h.is_err());
        } else {
            let h = h.unwrap();
            prop_assert_eq!(h.require_numeric().is_ok(), re > 0.0);
        }
    }

    #[test]
    fn depth_one_multiple_equals_classical(n in -2i32..6, r in 0.0f64..0.8, t in 0.0f64..(2.0 * PI)) {
        let z = C64::from_polar(r, t);
        let p = SeriesParams::default();
        let x = multiple_polylog(&[n], &[z], &p).unwrap().value;
        let y = classical_polylog(n, z, &p).unwrap().value;
        prop_assert!((x - y).norm() <= 1e-13, "{x} vs {y}");
    }

    #[test]
    fn q_polylog_weightless_is_classical(n in 1i32..5, r in 0.0f64..0.8, t in 0.0f64..(2.0 * PI), qr in 0.1f64..0.9) {
        let z = C64::from_polar(r, t);
        let p = SeriesParams::default();
        let x = q_multiple_polylog(&[0], &[n], &[z], C64::new(qr, 0.0), &p).unwrap().value;
        let y = multiple_polylog(&[n], &[z], &p).unwrap().value;
        prop_assert!((x - y).norm() <= 1e-12, "{x} vs {y}");
    }

    #[test]
    fn qdi_coefficientwise(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
        a in 1u32..4,
        qr in 0.2f64..0.9,
        qt in 0.0f64..PI,
    ) {
        let mut c: Vec<C64> = vec![C64::new(0.0, 0.0)];
        c.extend(coeffs.iter().map(|&(x, y)| C64::new(x, y)));
        let f = TruncatedSeries::new(c, "x").unwrap();
        let q = C64::from_polar(qr, qt);
        let lhs = q_difference(&q_integral(a, &f, q).unwrap(), q);
        let rhs = q_integral(a - 1, &f, q).unwrap();
        prop_assert_eq!(lhs.coeffs.len(), rhs.coeffs.len());
        for (x, y) in lhs.coeffs.iter().zip(&rhs.coeffs) {
            prop_assert!((x - y).norm() <= 1e-13 * (1.0 + y.norm()), "{x} vs {y}");
        }
    }

    #[test]
    fn shuffle_counts(k in 1usize..6, l in 1usize..6) {
        let s = shuffles(k, l).unwrap();
        prop_assert_eq!(s.len() as u64, binom((k + l) as u64, k as u64));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bernoulli_exact_identities(a in 0u32..4, b in 0u32..4, n in 0i32..5) {
        prop_assume!(a + b + n as u32 >= 1);
        let bb = bernoulli_exact(a, b, n);
        prop_assert_eq!(bb.omega_degree(), Some(a + b + n as u32 - 1));
        prop_assert_eq!(&bb, &bernoulli_exact(b, a, n).modular().mul_h_pow(n - 1));
        if a >= 1 {
            prop_assert_eq!(bb.difference(&i_pi()), bernoulli_exact(a - 1, b, n));
        }
        if b >= 1 {
            prop_assert_eq!(bb.difference(&i_pi_h()), bernoulli_exact(a, b - 1, n));
        }
        prop_assert_eq!(bb.derivative(), bernoulli_exact(a, b, n - 1));
        prop_assert_eq!(bb.at_h_one(), bernoulli_exact(a + b, 0, n));
    }

    #[test]
    fn q_poly_difference_lowers_degree(m in 1u32..7) {
        prop_assert_eq!(q_poly(m).difference(&i_pi()), q_poly(m - 1));
    }

    #[test]
    fn contour_independence(
        n in 0i32..3,
        a in 1u32..3,
        b in 0u32..2,
        re in -3.0f64..-0.5,
        im in -1.0f64..1.0,
        h in 0.6f64..2.0,
    ) {
        let idx = MultiIndex::single(a, b, n);
        let hb = HbarValue::real(h).unwrap();
        let w = [C64::new(re, im)];
        let spec = QuadratureSpec::default();
        let eps = spec.contour_height(&hb).unwrap();
        let half = QuadratureSpec { epsilon: Some(eps / 2.0), ..QuadratureSpec::default() };
        let x = quad_F(&idx, &w, &hb, &spec).unwrap();
        let y = quad_F(&idx, &w, &hb, &half).unwrap();
        prop_assert!(x.err_estimate >= 0.0 && y.err_estimate >= 0.0);
        prop_assert!((x.value - y.value).norm() <= 1e-9 + 10.0 * (x.err_estimate + y.err_estimate), "{} vs {}", x.value, y.value);
    }

    #[test]
    fn integral_matches_series(
        m in 1usize..3,
        n in prop::collection::vec(1i32..4, 2),
        re in prop::collection::vec(-3.0f64..-0.5, 2),
        im in prop::collection::vec(-(PI - 0.2)..(PI - 0.2), 2),
    ) {
        let w: Vec<C64> = (0..m).map(|j| C64::new(re[j], im[j])).collect();
        prop_assume!(w.iter().map(|x| x.im).sum::<f64>().abs() <= PI - 0.2);
        let pt = LiPoint { n: n[..m].to_vec(), w, tolerance: 1e-8 };
        let rep = check_series_vs_contour(&[pt], &SuiteConfig::default());
        prop_assert!(rep[0].pass, "{:?} residual {}", rep[0].params, rep[0].residual);
    }

    #[test]
    fn cli_json_round_trips(re in -4.0f64..-0.2, im in -1.0f64..1.0, h in 0.5f64..2.0) {
        let omega = format!("{re}{im:+}i");
        let hbar = h.to_string();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(["qpolylog", "eval", "--fn", "F", "--n", "1", "--omega", &omega, "--hbar", &hbar], &mut out, &mut err);
        prop_assert_eq!(code, 0);
        let text = String::from_utf8(out).unwrap();
        prop_assert_eq!(recanonicalize(&text).unwrap(), text);
    }
}
