use mirrorq::laurent::{parse_poly, torus_sup_bound};
use mirrorq::mahler::{mahler_from_big_q, mahler_quadrature, mahler_series, mahler_vs_big_q, CFloat, MahlerError};
use mirrorq::registry::{example, examples};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

const PREC: u32 = 128;

fn diff(a: &Float, b: &Float) -> f64 {
    Float::with_val(PREC, a - b).abs().to_f64()
}

#[test]
fn three_routes_agree() {
    for (id, t) in [(3u8, 10.0), (4, 10.0), (6, 100.0)] {
        let r = mahler_vs_big_q(id, &Float::with_val(PREC, t), 80, 128).unwrap();
        assert!(r.report.domain_certified);
        assert!(r.max_difference() < 1e-8, "#{id} t={t}: {}", r.max_difference());
    }
}

#[test]
fn franel_example_at_100_agrees_to_1e_minus_10() {
    let p = example(6).unwrap().poly();
    let t = CFloat::real(100.0, PREC);
    let s = mahler_series(&p, &t, 60).unwrap();
    let q = mahler_quadrature(&p, &t, 128);
    assert!(diff(&s.value, &q.value) < 1e-10);
}

#[test]
fn series_and_quadrature_agree_at_twice_the_bound() {
    for e in examples() {
        let p = e.poly();
        let bound = torus_sup_bound(&p).to_f64();
        let t = CFloat::real(2.0 * bound, PREC);
        let s = mahler_series(&p, &t, 80).unwrap();
        let q = mahler_quadrature(&p, &t, 128);
        assert!(diff(&s.value, &q.value) <= 1e-8, "#{}", e.id);
    }
}

#[test]
fn doubling_the_grid_moves_less_than_the_tail_bound() {
    for e in examples() {
        let p = e.poly();
        let bound = torus_sup_bound(&p).to_f64();
        let t = CFloat::real(2.0 * bound, PREC);
        let s = mahler_series(&p, &t, 40).unwrap();
        let q64 = mahler_quadrature(&p, &t, 64);
        let q128 = mahler_quadrature(&p, &t, 128);
        assert!(Float::with_val(PREC, &q64.value - &q128.value).abs() < s.tail_bound, "#{}", e.id);
    }
}

#[test]
fn monomial_family_is_rotation_invariant() {
    // F_t = t - x: any phase of t is absorbed by rotating x
    let p = parse_poly("X^2*Y*Z").unwrap();
    let t = CFloat::real(1.5, PREC);
    let base = mahler_quadrature(&p, &t, 48).value;
    for k in 1..6 {
        let theta = Float::with_val(PREC, Constant::Pi) * k / 7;
        let rotated = mahler_quadrature(&p, &t.rotate(&theta), 48).value;
        assert!(diff(&base, &rotated) < 1e-7);
    }
    let expected = Float::with_val(PREC, 1.5).ln();
    assert!(diff(&base, &expected) < 1e-8);
}

#[test]
fn series_tends_to_log_t() {
    let p = example(6).unwrap().poly();
    for t in [1e3, 1e6, 1e9] {
        let s = mahler_series(&p, &CFloat::real(t, PREC), 10).unwrap();
        let log_t = Float::with_val(PREC, t).ln();
        assert!(diff(&s.value, &log_t) < 3.0 / t);
    }
}

#[test]
fn q_route_rejects_t_below_the_bound() {
    let err = mahler_vs_big_q(3, &Float::with_val(PREC, 2.0), 20, 16).unwrap_err();
    assert!(matches!(err, MahlerError::NotRealAboveBound { .. }));
}

#[test]
fn q_route_reports_non_decaying_tail() {
    // psi = 1/2 lies far outside the convergence disk of radius 1/27
    let spec = example(3).unwrap().spec;
    let t = Float::with_val(PREC, 2).pow(Float::with_val(PREC, 1) / 3u32);
    assert!(matches!(mahler_from_big_q(&spec, &t, 30), Err(MahlerError::NonDecaying { .. })));
}

#[test]
fn complex_t_series_matches_quadrature() {
    let p = example(3).unwrap().poly();
    let t = CFloat::new(6.0, 8.0, PREC);
    let s = mahler_series(&p, &t, 80).unwrap();
    let q = mahler_quadrature(&p, &t, 128);
    assert!(diff(&s.value, &q.value) < 1e-20);
}
