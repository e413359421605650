mod common;

use mirrorq::laurent::cn_sequence;
use mirrorq::picard_fuchs::{check_consistency, frobenius, ode_residual, u_sequence, Candidate};
use mirrorq::qexpansion::{a_from_log_derivative, a_from_product, big_q_of_q, lmw_expansion, ExpansionTable};
use mirrorq::registry::{conifold, example, examples};
use rug::{Integer, Rational};

#[test]
fn golden_tables() {
    for e in examples() {
        let table = ExpansionTable::compute(&e.spec, 9).unwrap();
        let (a, b) = common::golden(e.id);
        assert_eq!(table.a.values, a, "a_n for #{}", e.id);
        assert_eq!(table.b.values, b, "b_n for #{}", e.id);
    }
}

#[test]
fn recurrence_matches_closed_forms() {
    for e in examples() {
        let u = u_sequence(&e.spec, 50);
        for (m, um) in u.iter().enumerate() {
            assert_eq!(*um, common::closed_form_u(e.id, m as u32), "#{} m={m}", e.id);
        }
    }
    let apery: Vec<Rational> = u_sequence(&example(5).unwrap().spec, 3);
    assert_eq!(apery, [1, 3, 19, 147].map(Rational::from));
    let franel: Vec<Rational> = u_sequence(&example(6).unwrap().spec, 3);
    assert_eq!(franel, [1, 2, 10, 56].map(Rational::from));
}

#[test]
fn constant_terms_follow_the_recurrence() {
    for e in examples() {
        let n = 10 * e.spec.nu as usize;
        let report = check_consistency(&e.poly(), &e.spec, n);
        assert!(report.passed(), "#{}: {:?}", e.id, report.first_mismatch);
        assert_eq!(cn_sequence(&e.poly(), n as u32).len(), n + 1);
    }
}

#[test]
fn instanton_routes_agree_to_order_50() {
    let mut specs: Vec<_> = examples().into_iter().map(|e| e.spec).collect();
    specs.push(conifold());
    for spec in specs {
        let q_of_big_q = big_q_of_q(&spec, 51).unwrap().revert().unwrap();
        let log_route = a_from_log_derivative(&q_of_big_q).unwrap();
        let product_route = a_from_product(spec.alpha, &q_of_big_q).unwrap();
        assert_eq!(log_route.len(), 50);
        assert_eq!(log_route, product_route, "{spec}");
    }
}

#[test]
fn integrality_to_order_50() {
    let mut specs: Vec<_> = examples().into_iter().map(|e| e.spec).collect();
    specs.push(conifold());
    for spec in specs {
        let table = ExpansionTable::compute(&spec, 50).unwrap();
        assert!(table.a_integral() && table.b_integral(), "{spec}");
    }
}

#[test]
fn conifold_table_is_integral_and_differs_from_example_4() {
    let c = ExpansionTable::compute(&conifold(), 9).unwrap();
    let e4 = ExpansionTable::compute(&example(4).unwrap().spec, 9).unwrap();
    assert!(c.a_integral());
    // b depends on the triple only; alpha enters through Q
    assert_eq!(c.b.values, e4.b.values);
    assert_ne!(c.a.values, e4.a.values);
    let frozen = [-4, -4, -12, -48, -240, -1356, -8428, -56000, -392040].map(Rational::from);
    assert_eq!(c.a.values, frozen);
}

#[test]
fn normalised_expansions() {
    for e in examples().into_iter().filter(|e| e.spec.kappa.is_some()) {
        let kappa = e.spec.kappa.unwrap();
        let table = ExpansionTable::compute(&e.spec, 5).unwrap();
        let s = lmw_expansion(&e.spec, &table.a.values, 5).unwrap();
        assert_eq!(*s.coeff(0), kappa);
        assert_eq!(*s.coeff(1), Rational::from(-kappa * &table.a.values[0]));
    }
    let e1 = example(1).unwrap();
    let table = ExpansionTable::compute(&e1.spec, 2).unwrap();
    assert_eq!(*lmw_expansion(&e1.spec, &table.a.values, 2).unwrap().coeff(1), 252);
    assert!(lmw_expansion(&example(5).unwrap().spec, &table.a.values, 2).is_err());
}

#[test]
fn frobenius_solutions_satisfy_the_equation() {
    for e in examples() {
        let pair = frobenius(&e.spec, 100);
        assert!(ode_residual(&e.spec, Candidate::Holomorphic(&pair.g1)).is_zero(), "#{}", e.id);
        assert!(ode_residual(&e.spec, Candidate::Logarithmic { g1: &pair.g1, h: &pair.h }).is_zero(), "#{}", e.id);
    }
}

#[test]
fn wrong_candidates_leave_a_residual() {
    let spec = example(3).unwrap().spec;
    let pair = frobenius(&spec, 20);
    let mut coeffs = pair.g1.coeffs().to_vec();
    coeffs[7] += 1;
    let perturbed = mirrorq::series::TruncatedSeries::new(coeffs);
    assert_eq!(ode_residual(&spec, Candidate::Holomorphic(&perturbed)).first_nonzero(), Some(7));
    let zero = mirrorq::series::TruncatedSeries::zero(20);
    assert!(!ode_residual(&spec, Candidate::Logarithmic { g1: &pair.g1, h: &zero }).is_zero());
}

#[test]
fn large_coefficients_survive() {
    let table = ExpansionTable::compute(&example(1).unwrap().spec, 9).unwrap();
    let a9 = table.a.integers().unwrap()[8].clone();
    assert_eq!(a9, "38512679141944848024".parse::<Integer>().unwrap());
}
