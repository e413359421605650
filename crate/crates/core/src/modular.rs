//! Eisenstein series, eta quotients and the closed-form identities that the
//! pipeline output is checked against.

use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};
use thiserror::Error;

use crate::picard_fuchs::frobenius;
use crate::qexpansion::{psi_of_q, weight3_series, QExpansionError};
use crate::registry;
use crate::series::{euler_product, SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModularError {
    #[error("unsupported Eisenstein weight {0} (expected 2, 4 or 6)")]
    UnsupportedWeight(u32),
    #[error("eta quotient has fractional leading exponent {0}")]
    FractionalExponent(String),
    #[error("unknown example #{0}")]
    UnknownExample(u8),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Expansion(#[from] QExpansionError),
}

/// `sigma_k(n)`, the sum of the k-th powers of the divisors of `n`.
pub fn divisor_sigma(n: usize, k: u32) -> Integer {
    let mut acc = Integer::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            acc += Integer::from(d).pow(k);
            if d != n / d {
                acc += Integer::from(n / d).pow(k);
            }
        }
        d += 1;
    }
    acc
}

/// `E_w = 1 + c_w sum sigma_{w-1}(n) q^n` with `c_2, c_4, c_6 = -24, 240, -504`.
pub fn eisenstein(weight: u32, order: usize) -> Result<TruncatedSeries, ModularError> {
    let c: i64 = match weight {
        2 => -24,
        4 => 240,
        6 => -504,
        w => return Err(ModularError::UnsupportedWeight(w)),
    };
    Ok(TruncatedSeries::from_fn(order, |n| {
        if n == 0 {
            Rational::from(1)
        } else {
            Rational::from(divisor_sigma(n, weight - 1) * c)
        }
    }))
}

/// `prod_k eta(q^k)^{m_k}` with `eta(q) = q^{1/24} prod_n (1 - q^n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaQuotient {
    pub factors: Vec<(u32, i64)>,
}

impl EtaQuotient {
    pub fn new(factors: &[(u32, i64)]) -> Self {
        assert!(factors.iter().all(|&(k, _)| k >= 1), "eta scales must be positive");
        EtaQuotient { factors: factors.to_vec() }
    }

    /// `sum_k k m_k / 24`
    pub fn leading_exponent(&self) -> Rational {
        let total: i64 = self.factors.iter().map(|&(k, m)| k as i64 * m).sum();
        Rational::from((total, 24))
    }

    /// The leading exponent, provided it is an integer.
    pub fn integral_exponent(&self) -> Result<i64, ModularError> {
        let e = self.leading_exponent();
        if *e.denom() != 1 {
            return Err(ModularError::FractionalExponent(e.to_string()));
        }
        Ok(e.numer().to_i64().expect("small exponent"))
    }

    /// The unit series `prod_k prod_n (1 - q^{kn})^{m_k}`, gathered as
    /// `prod_N (1 - q^N)^{sum_{k|N} m_k}`.
    pub fn unit_series(&self, order: usize) -> TruncatedSeries {
        euler_product(order, |n| {
            let e: i64 = self.factors.iter().filter(|&&(k, _)| n % k as usize == 0).map(|&(_, m)| m).sum();
            Rational::from(e)
        })
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(k, m)| format!("eta(q^{k})^{m}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `(leading exponent, unit series)` of an eta quotient.
pub fn eta_quotient_series(eq: &EtaQuotient, order: usize) -> (Rational, TruncatedSeries) {
    (eq.leading_exponent(), eq.unit_series(order))
}

/// An integer-valued periodic sequence `n -> values[n mod period]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharSeq {
    pub period: usize,
    pub values: Vec<i64>,
}

impl CharSeq {
    pub fn new(values: &[i64]) -> Self {
        assert!(!values.is_empty());
        CharSeq { period: values.len(), values: values.to_vec() }
    }

    pub fn at(&self, n: usize) -> i64 {
        self.values[n % self.period]
    }

    /// `chi_{-3}`
    pub fn chi_minus3() -> Self {
        Self::new(&[0, 1, -1])
    }

    /// `chi_{-4}`
    pub fn chi_minus4() -> Self {
        Self::new(&[0, 1, 0, -1])
    }

    /// The Legendre symbol `(n/5)`.
    pub fn legendre5() -> Self {
        Self::new(&[0, 1, -1, -1, 1])
    }

    /// `((3-i) chi(n) + (3+i) conj(chi(n))) / 2` for the quartic character
    /// `chi(n) = i^j` when `n = 2^j mod 5`. With `chi(1), chi(2), chi(3), chi(4)
    /// = 1, i, -i, -1` this is `3, 1, -1, -3`.
    pub fn quartic_weight1() -> Self {
        Self::new(&[0, 3, 1, -1, -3])
    }

    /// `((2-i) chi(n) + (2+i) conj(chi(n))) / 2`, i.e. `2, 1, -1, -2`.
    pub fn quartic_weight3() -> Self {
        Self::new(&[0, 2, 1, -1, -2])
    }
}

/// `1 + scale sum_n chi(n) n^{w-1} q^n / (1 - q^n)`, expanded through
/// divisor sums.
pub fn character_eisenstein(chi: &CharSeq, weight: u32, scale: &Rational, order: usize) -> TruncatedSeries {
    assert!(weight >= 1);
    let mut coeffs = TruncatedSeries::one(order).into_coeffs();
    for d in 1..=order {
        let c = chi.at(d);
        if c == 0 {
            continue;
        }
        let term = Rational::from(scale * (Integer::from(d).pow(weight - 1) * c));
        let mut n = d;
        while n <= order {
            coeffs[n] += &term;
            n += d;
        }
    }
    TruncatedSeries::new(coeffs)
}

/// Outcome of one coefficientwise comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityOutcome {
    Pass,
    Mismatch {
        order: usize,
        lhs: Rational,
        rhs: Rational,
    },
    /// Holds only after a documented adjustment (e.g. a sign convention).
    Caveat(String),
    /// The two sides could not be compared (e.g. fractional q-exponent).
    Structural(String),
}

impl IdentityOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, IdentityOutcome::Pass)
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, IdentityOutcome::Mismatch { .. } | IdentityOutcome::Structural(_))
    }
}

/// Exact comparison of the coefficients of `x^0..x^N`.
pub fn verify_identity(lhs: &TruncatedSeries, rhs: &TruncatedSeries, order: usize) -> IdentityOutcome {
    if lhs.order() < order || rhs.order() < order {
        return IdentityOutcome::Structural(format!(
            "series known to orders {} and {}, need {}",
            lhs.order(),
            rhs.order(),
            order
        ));
    }
    for k in 0..=order {
        if lhs.coeff(k) != rhs.coeff(k) {
            return IdentityOutcome::Mismatch { order: k, lhs: lhs.coeff(k).clone(), rhs: rhs.coeff(k).clone() };
        }
    }
    IdentityOutcome::Pass
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityRecord {
    pub example: u8,
    pub label: String,
    pub order: usize,
    pub outcome: IdentityOutcome,
}

/// `x^s * unit`, to order `N`, for `s` in `{0, 1}`.
fn with_shift(shift: i64, unit: &TruncatedSeries, order: usize) -> TruncatedSeries {
    match shift {
        0 => unit.truncate(order),
        1 => unit.truncate(order - 1).shift_up(),
        _ => unreachable!("only shifts 0 and 1 occur"),
    }
}

/// `x / (U + c x)` to order `N` where `U` is a unit series; this is
/// `1 / (c + x^{-1} U)`, the shape of the `psi^{-1} = c + eta-quotient` forms.
fn reciprocal_of_pole_form(c: i64, unit: &TruncatedSeries, order: usize) -> Result<TruncatedSeries, ModularError> {
    let n = order - 1;
    let denom = &unit.truncate(n) + &TruncatedSeries::monomial(1, Rational::from(c), n);
    Ok(denom.invert()?.shift_up())
}

fn eta_form(factors: &[(u32, i64)], expected_shift: i64, order: usize) -> Result<TruncatedSeries, ModularError> {
    let eq = EtaQuotient::new(factors);
    let shift = eq.integral_exponent()?;
    if shift != expected_shift {
        return Err(ModularError::FractionalExponent(format!("expected exponent {expected_shift}, found {shift}")));
    }
    Ok(with_shift(shift, &eq.unit_series(order), order))
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// Compares the pipeline's `psi(q)`, `g1(psi(q))` and `q d/dq log Q` with the
/// closed forms known for the built-in examples.
pub fn identity_suite(example_id: u8, order: usize) -> Result<Vec<IdentityRecord>, ModularError> {
    let example = registry::example(example_id).ok_or(ModularError::UnknownExample(example_id))?;
    let spec = &example.spec;
    let n = order;
    let psi = psi_of_q(spec, n)?;
    let g1 = frobenius(spec, n).g1.compose(&psi)?;
    let w = weight3_series(spec, n)?;

    let mut records = Vec::new();
    let mut check = |label: &str, lhs: &TruncatedSeries, rhs: Result<TruncatedSeries, ModularError>| {
        let outcome = match rhs {
            Ok(rhs) => verify_identity(lhs, &rhs, n),
            Err(ModularError::FractionalExponent(msg)) => IdentityOutcome::Structural(msg),
            Err(e) => IdentityOutcome::Structural(e.to_string()),
        };
        records.push(IdentityRecord { example: example_id, label: label.to_string(), order: n, outcome });
    };

    match example_id {
        1 => {
            let e4 = eisenstein(4, n)?;
            let e6 = eisenstein(6, n)?;
            let r = &e6 * &e4.pow_rational(&rat(-3, 2))?;
            let one = TruncatedSeries::one(n);
            check("psi(q) = (1 - E6 E4^(-3/2)) / 864", &psi, Ok((&one - &r).scale(&rat(1, 864))));
            check("g1(psi(q)) = E4^(1/4)", &g1, Ok(e4.pow_rational(&rat(1, 4))?));
            check("g1(psi(q))^4 = E4", &g1.pow_int(4)?, Ok(e4.clone()));
            let rhs = (&e4.pow_rational(&rat(3, 4))? * &(&one + &r)).scale(&rat(1, 2));
            check("q dlog Q/dq = E4^(3/4) (1 + E6 E4^(-3/2)) / 2", &w, Ok(rhs));
        }
        2 => {
            let unit = EtaQuotient::new(&[(1, 24), (2, -24)]);
            let psi_cf = match unit.integral_exponent() {
                Ok(-1) => reciprocal_of_pole_form(64, &unit.unit_series(n), n),
                Ok(e) => Err(ModularError::FractionalExponent(format!("expected exponent -1, found {e}"))),
                Err(e) => Err(e),
            };
            check("1/psi(q) = 64 + eta(q)^24 / eta(q^2)^24", &psi, psi_cf);
            let base = &eisenstein(2, n)?.rescale(2).scale(&rat(2, 1)) - &eisenstein(2, n)?;
            check("g1(psi(q)) = (2 E2(q^2) - E2(q))^(1/2)", &g1, Ok(base.pow_rational(&rat(1, 2))?));
            check("g1(psi(q))^2 = 2 E2(q^2) - E2(q)", &g1.pow_int(2)?, Ok(base.clone()));
            let inv = eta_form(&[(2, 24), (1, -24)], 1, n)?.scale(&rat(64, 1));
            let denom = &TruncatedSeries::one(n) + &inv;
            let rhs = &base.pow_rational(&rat(3, 2))? * &denom.invert()?;
            check("q dlog Q/dq = (2 E2(q^2) - E2(q))^(3/2) / (1 + 64 eta(q^2)^24 / eta(q)^24)", &w, Ok(rhs));
        }
        3 => {
            let unit = EtaQuotient::new(&[(1, 12), (3, -12)]);
            let psi_cf = match unit.integral_exponent() {
                Ok(-1) => reciprocal_of_pole_form(27, &unit.unit_series(n), n),
                Ok(e) => Err(ModularError::FractionalExponent(format!("expected exponent -1, found {e}"))),
                Err(e) => Err(e),
            };
            check("1/psi(q) = 27 + eta(q)^12 / eta(q^3)^12", &psi, psi_cf);
            let chi = CharSeq::chi_minus3();
            check("g1(psi(q)) = E_{1,chi_-3}", &g1, Ok(character_eisenstein(&chi, 1, &rat(6, 1), n)));
            check("q dlog Q/dq = E_{3,chi_-3}", &w, Ok(character_eisenstein(&chi, 3, &rat(-9, 1), n)));
            check("q dlog Q/dq = eta(q)^9 eta(q^3)^-3", &w, eta_form(&[(1, 9), (3, -3)], 0, n));
        }
        4 => {
            check("psi(q) = eta(q)^8 eta(q^4)^16 / eta(q^2)^24", &psi, eta_form(&[(1, 8), (4, 16), (2, -24)], 1, n));
            let chi = CharSeq::chi_minus4();
            check("g1(psi(q)) = E_{1,chi_-4}", &g1, Ok(character_eisenstein(&chi, 1, &rat(4, 1), n)));
            check("q dlog Q/dq = E_{3,chi_-4}", &w, Ok(character_eisenstein(&chi, 3, &rat(-4, 1), n)));
            check("q dlog Q/dq = eta(q)^4 eta(q^2)^6 eta(q^4)^-4", &w, eta_form(&[(1, 4), (2, 6), (4, -4)], 0, n));
        }
        5 => {
            let legendre = CharSeq::legendre5();
            let psi_cf = euler_product(n - 1, |k| Rational::from(5 * legendre.at(k))).shift_up();
            check("psi(q) = q prod (1 - q^n)^(5 (n/5))", &psi, Ok(psi_cf));
            let g1_cf = character_eisenstein(&CharSeq::quartic_weight1(), 1, &rat(1, 1), n);
            check("g1(psi(q)) = 1 + sum Re((3-i) chi(n)) q^n/(1-q^n)", &g1, Ok(g1_cf));
            // The printed weight-3 form carries the opposite sign to the
            // tabulated b_n; report a flipped-sign match as a caveat.
            let printed = character_eisenstein(&CharSeq::quartic_weight3(), 3, &rat(1, 1), n);
            let label = "q dlog Q/dq = 1 + sum Re((2-i) chi(n)) n^2 q^n/(1-q^n)";
            match verify_identity(&w, &printed, n) {
                IdentityOutcome::Pass => check(label, &w, Ok(printed)),
                mismatch => {
                    let flipped = character_eisenstein(&CharSeq::quartic_weight3(), 3, &rat(-1, 1), n);
                    let outcome = if verify_identity(&w, &flipped, n).is_pass() {
                        IdentityOutcome::Caveat(
                            "holds with the sign of the non-constant part reversed, consistent with the b_n table"
                                .into(),
                        )
                    } else {
                        mismatch
                    };
                    records.push(IdentityRecord { example: 5, label: label.into(), order: n, outcome });
                }
            }
        }
        6 => {
            check(
                "psi(q) = eta(q)^3 eta(q^6)^9 / (eta(q^2)^3 eta(q^3)^9)",
                &psi,
                eta_form(&[(1, 3), (6, 9), (2, -3), (3, -9)], 1, n),
            );
            check(
                "g1(psi(q)) = eta(q^2) eta(q^3)^6 / (eta(q)^2 eta(q^6)^3)",
                &g1,
                eta_form(&[(2, 1), (3, 6), (1, -2), (6, -3)], 0, n),
            );
            let chi = CharSeq::chi_minus3();
            let e1 = character_eisenstein(&chi, 1, &rat(6, 1), n);
            let g1_cf = (&e1 + &e1.rescale(2).scale(&rat(2, 1))).scale(&rat(1, 3));
            check("g1(psi(q)) = (E_{1,chi_-3}(q) + 2 E_{1,chi_-3}(q^2)) / 3", &g1, Ok(g1_cf));
            let e3 = character_eisenstein(&chi, 3, &rat(-9, 1), n);
            let w_cf = (&e3 + &e3.rescale(2).scale(&rat(8, 1))).scale(&rat(1, 9));
            check("q dlog Q/dq = (E_{3,chi_-3}(q) + 8 E_{3,chi_-3}(q^2)) / 9", &w, Ok(w_cf));
        }
        other => return Err(ModularError::UnknownExample(other)),
    }
    Ok(records)
}
