use mirrorq::modular::{character_eisenstein, eisenstein, identity_suite, CharSeq, EtaQuotient, IdentityOutcome};
use mirrorq::registry::examples;
use rug::Rational;

#[test]
fn identity_suites_to_order_100() {
    for e in examples() {
        let records = identity_suite(e.id, 100).unwrap();
        assert!(records.len() >= 3, "#{}", e.id);
        for r in &records {
            assert_eq!(r.order, 100);
            let caveat_allowed = e.id == 5 && r.label.starts_with("q dlog Q/dq");
            match &r.outcome {
                IdentityOutcome::Pass => {}
                IdentityOutcome::Caveat(_) if caveat_allowed => {}
                other => panic!("#{} {}: {:?}", e.id, r.label, other),
            }
        }
    }
}

#[test]
fn example_5_weight_three_form_is_reported_as_caveat() {
    let records = identity_suite(5, 30).unwrap();
    let w = records.iter().find(|r| r.label.starts_with("q dlog Q/dq")).unwrap();
    assert!(matches!(w.outcome, IdentityOutcome::Caveat(_)));
    assert!(records.iter().filter(|r| r.outcome.is_pass()).count() >= 2);
}

#[test]
fn unknown_example_is_an_error() {
    assert!(identity_suite(7, 10).is_err());
}

#[test]
fn e4_cubed_minus_e6_squared_is_1728_delta() {
    let n = 40;
    let e4 = eisenstein(4, n).unwrap();
    let e6 = eisenstein(6, n).unwrap();
    let lhs = &(&(&e4 * &e4) * &e4) - &(&e6 * &e6);
    let delta = EtaQuotient::new(&[(1, 24)]).unit_series(n - 1).shift_up().scale(&Rational::from(1728));
    assert_eq!(lhs, delta);
}

#[test]
fn theta_squared_is_weight_one_character_series() {
    // theta(q)^2 = 1 + 4 sum chi_-4(n) q^n/(1-q^n), theta(q) = eta(q^2)^5 / (eta(q)^2 eta(q^4)^2)
    let n = 60;
    let theta = EtaQuotient::new(&[(2, 5), (1, -2), (4, -2)]);
    assert_eq!(theta.integral_exponent().unwrap(), 0);
    let theta_sq = &theta.unit_series(n) * &theta.unit_series(n);
    assert_eq!(theta_sq, character_eisenstein(&CharSeq::chi_minus4(), 1, &Rational::from(4), n));
}
