//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use mirrorq::laurent::cn_sequence;
use mirrorq::mahler::{fmt_short, mahler_vs_big_q};
use mirrorq::modular::{identity_suite, IdentityOutcome};
use mirrorq::picard_fuchs::{check_consistency, frobenius, ode_residual, u_sequence, Candidate};
use mirrorq::qexpansion::{a_from_log_derivative, a_from_product, big_q_of_q, lmw_expansion, ExpansionTable};
use mirrorq::registry::{conifold, examples};
use mirrorq::series::TruncatedSeries;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rug::{Float, Rational};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn golden_tables() -> Outcome {
    for e in examples() {
        let table = ExpansionTable::compute(&e.spec, 9).map_err(|err| err.to_string())?;
        let (a, b) = common::golden(e.id);
        for n in 0..9 {
            if table.a.values[n] != a[n] || table.b.values[n] != b[n] {
                return Err(format!(
                    "#{} n={}: got ({}, {}), expected ({}, {})",
                    e.id,
                    n + 1,
                    table.a.values[n],
                    table.b.values[n],
                    a[n],
                    b[n]
                ));
            }
        }
    }
    Ok("a_n, b_n for n <= 9 match in all six examples".into())
}

fn closed_form_u() -> Outcome {
    for e in examples() {
        let u = u_sequence(&e.spec, 50);
        if let Some(m) = (0..=50).find(|&m| u[m] != common::closed_form_u(e.id, m as u32)) {
            return Err(format!(
                "#{} m={m}: recurrence {} vs closed form {}",
                e.id,
                u[m],
                common::closed_form_u(e.id, m as u32)
            ));
        }
    }
    Ok("u_m for m <= 50 in all six rows".into())
}

fn constant_terms() -> Outcome {
    for e in examples() {
        let n = 10 * e.spec.nu as usize;
        let report = check_consistency(&e.poly(), &e.spec, n);
        if let Some(m) = report.first_mismatch {
            return Err(format!("#{} n={}: c_n={} expected {}", e.id, m.n, m.c_n, m.expected));
        }
    }
    let franel = cn_sequence(&examples()[5].poly(), 3);
    if franel != [1, 2, 10, 56].map(Rational::from) {
        return Err(format!("Franel prefix {franel:?}"));
    }
    Ok("c_n for n <= 10 nu in all six examples".into())
}

fn identities() -> Outcome {
    let mut caveats = 0;
    let mut checked = 0;
    for e in examples() {
        let records = identity_suite(e.id, 100).map_err(|err| err.to_string())?;
        for r in records {
            checked += 1;
            match r.outcome {
                IdentityOutcome::Pass => {}
                IdentityOutcome::Caveat(_) if e.id == 5 => caveats += 1,
                other => return Err(format!("#{} {}: {:?}", e.id, r.label, other)),
            }
        }
    }
    if caveats != 1 {
        return Err(format!("expected exactly one caveat (#5 weight 3), found {caveats}"));
    }
    Ok(format!("{checked} identities to order 100, #5 weight-3 sign caveat reported"))
}

fn dual_route() -> Outcome {
    let mut specs: Vec<_> = examples().into_iter().map(|e| e.spec).collect();
    specs.push(conifold());
    for spec in &specs {
        let q_of_big_q =
            big_q_of_q(spec, 51).and_then(|s| s.revert().map_err(Into::into)).map_err(|e| e.to_string())?;
        let log_route = a_from_log_derivative(&q_of_big_q).map_err(|e| e.to_string())?;
        let product_route = a_from_product(spec.alpha, &q_of_big_q).map_err(|e| e.to_string())?;
        if log_route.len() != 50 {
            return Err(format!("{spec}: only {} coefficients", log_route.len()));
        }
        if let Some(n) = (0..50).find(|&n| log_route[n] != product_route[n]) {
            return Err(format!("{spec} n={}: {} vs {}", n + 1, log_route[n], product_route[n]));
        }
    }
    Ok("log-derivative and product routes agree for n <= 50 (six examples, conifold)".into())
}

fn integrality() -> Outcome {
    let mut specs: Vec<_> = examples().into_iter().map(|e| e.spec).collect();
    specs.push(conifold());
    for spec in &specs {
        let t = ExpansionTable::compute(spec, 50).map_err(|e| e.to_string())?;
        if let Some(n) = t.a.values.iter().position(|v| *v.denom() != 1) {
            return Err(format!("{spec}: a_{} = {}", n + 1, t.a.values[n]));
        }
        if let Some(n) = t.b.values.iter().position(|v| *v.denom() != 1) {
            return Err(format!("{spec}: b_{} = {}", n + 1, t.b.values[n]));
        }
    }
    Ok("a_n, b_n integral for n <= 50 (six examples, conifold)".into())
}

fn mahler() -> Outcome {
    let start = Instant::now();
    let mut worst = Float::new(53);
    for (id, t) in [(3u8, 10.0), (4, 10.0), (6, 100.0)] {
        let r = mahler_vs_big_q(id, &Float::with_val(128, t), 80, 128).map_err(|e| e.to_string())?;
        let d = r.max_difference();
        if d > 1e-8 {
            return Err(format!("#{id} t={t}: pairwise difference {}", fmt_short(&d)));
        }
        if d > worst {
            worst = Float::with_val(53, &d);
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 60 {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("largest pairwise difference {} on a 128x128 grid in {:.1?}", fmt_short(&worst), elapsed))
}

fn normalised_expansions() -> Outcome {
    for e in examples().into_iter().filter(|e| e.id <= 4) {
        let kappa = e.spec.kappa.ok_or(format!("#{} has no kappa", e.id))?;
        if kappa != -(e.id as i64) {
            return Err(format!("#{}: kappa {kappa}", e.id));
        }
        let t = ExpansionTable::compute(&e.spec, 3).map_err(|err| err.to_string())?;
        let s = lmw_expansion(&e.spec, &t.a.values, 3).map_err(|err| err.to_string())?;
        let first = Rational::from(-kappa * &t.a.values[0]);
        if *s.coeff(0) != kappa || *s.coeff(1) != first {
            return Err(format!("#{}: leading terms {} + {} Q", e.id, s.coeff(0), s.coeff(1)));
        }
        if e.id == 1 && first != 252 {
            return Err(format!("#1 first coefficient {first}"));
        }
    }
    Ok("constant terms -1..-4 and first coefficients -kappa a_1 (252 for #1)".into())
}

fn properties() -> Outcome {
    const ORDER: usize = 200;
    let unit = prop::collection::vec(-3i64..=3, 1..5).prop_map(|tail| {
        let mut c = vec![1];
        c.extend(tail);
        TruncatedSeries::from_ints(&c, ORDER)
    });
    let uniformizer = prop::collection::vec(-3i64..=3, 1..4).prop_map(|tail| {
        let mut c = vec![0, 1];
        c.extend(tail);
        TruncatedSeries::from_ints(&c, ORDER)
    });
    let mut runner = TestRunner::new(Config { cases: 4, failure_persistence: None, ..Config::default() });
    let fail = |name: &str, e: proptest::test_runner::TestError<TruncatedSeries>| format!("{name}: {e}");
    runner
        .run(&unit, |f| {
            prop_assert_eq!(f.log().unwrap().exp().unwrap(), f);
            Ok(())
        })
        .map_err(|e| fail("exp/log", e))?;
    runner
        .run(&uniformizer, |f| {
            prop_assert_eq!(f.revert().unwrap().revert().unwrap(), f);
            Ok(())
        })
        .map_err(|e| fail("reversion", e))?;
    runner
        .run(&unit, |f| {
            let third = f.pow_rational(&Rational::from((1, 3))).unwrap();
            let two_thirds = f.pow_rational(&Rational::from((2, 3))).unwrap();
            prop_assert_eq!(&third * &two_thirds, f);
            Ok(())
        })
        .map_err(|e| fail("rational powers", e))?;

    for e in examples() {
        let pair = frobenius(&e.spec, 100);
        if let Some(k) = ode_residual(&e.spec, Candidate::Holomorphic(&pair.g1)).first_nonzero() {
            return Err(format!("#{} holomorphic residual at psi^{k}", e.id));
        }
        if let Some(k) = ode_residual(&e.spec, Candidate::Logarithmic { g1: &pair.g1, h: &pair.h }).first_nonzero() {
            return Err(format!("#{} logarithmic residual at psi^{k}", e.id));
        }
    }
    Ok("series round-trips at order 200; both Frobenius residuals vanish to order 100".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("golden tables", golden_tables),
        ("closed-form u_m", closed_form_u),
        ("constant-term consistency", constant_terms),
        ("modular identities", identities),
        ("dual-route instanton agreement", dual_route),
        ("integrality", integrality),
        ("Mahler cross-check", mahler),
        ("normalised expansions", normalised_expansions),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail} [{elapsed:.1?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail} [{elapsed:.1?}]", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
