//! From the mirror map to the weight-3 coefficients `b_n` and the instanton
//! numbers `a_n`.
//!
//! With `q = q(psi)` the mirror map and `Q = alpha psi + O(psi^2)` defined by
//! `psi d/dpsi log Q = g1(psi)`:
//!
//! ```text
//! q d/dq log Q = 1 - sum_n b_n n^2 q^n / (1 - q^n)
//! Q d/dQ log q = 1 - sum_n a_n n^3 Q^n / (1 - Q^n)
//! Q / alpha    = q prod_n (1 - q^n)^(n b_n)
//! alpha q      = Q prod_n (1 - Q^n)^(n^2 a_n)
//! ```
//!
//! All coefficients stay exact rationals; integrality is checked, never assumed.

use rug::ops::Pow;
use rug::{Integer, Rational};
use thiserror::Error;

use crate::picard_fuchs::{frobenius, mirror_map, RecurrenceSpec};
use crate::series::{euler_product, SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QExpansionError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("instanton routes disagree at n = {n}: log-derivative gives {log_route}, product gives {product_route}")]
    RouteDisagreement { n: usize, log_route: String, product_route: String },
    #[error("no instanton normalisation (kappa) is known for {0}")]
    MissingKappa(String),
    #[error("order must be at least 1")]
    ZeroOrder,
}

/// `psi(q)`, the compositional inverse of the mirror map, to order `N`.
pub fn psi_of_q(spec: &RecurrenceSpec, order: usize) -> Result<TruncatedSeries, QExpansionError> {
    if order == 0 {
        return Err(QExpansionError::ZeroOrder);
    }
    Ok(mirror_map(spec, order).revert()?)
}

/// `x d/dx log f` for `f = c x + O(x^2)`, `c != 0`; known to one order less than `f`.
pub fn log_derivative_of_uniformizer(f: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    let unit = f.shift_down()?;
    let numerator = f.xdx().shift_down()?;
    numerator.divide(&unit)
}

/// `g1(psi(q)) * q/psi(q) * dpsi/dq`, i.e. `q d/dq log Q`, to order `N`.
pub fn weight3_series(spec: &RecurrenceSpec, order: usize) -> Result<TruncatedSeries, QExpansionError> {
    if order == 0 {
        return Err(QExpansionError::ZeroOrder);
    }
    let psi = psi_of_q(spec, order + 1)?;
    let g1 = frobenius(spec, order).g1;
    let g1_of_q = g1.compose(&psi.truncate(order))?;
    let dlog_psi = log_derivative_of_uniformizer(&psi)?;
    Ok(&g1_of_q * &dlog_psi)
}

fn divisor_power_sum(n: usize, weight: u32, t: &[Rational]) -> Rational {
    // sum over proper divisors d < n of d^w t_d, with t_d stored at t[d - 1]
    let mut acc = Rational::new();
    let mut add = |d: usize| {
        if d < n {
            acc += Rational::from(&t[d - 1] * Integer::from(d).pow(weight));
        }
    };
    let mut k = 1;
    while k * k <= n {
        if n.is_multiple_of(k) {
            add(k);
            if k != n / k {
                add(n / k);
            }
        }
        k += 1;
    }
    acc
}

/// Solves `1 - sum_N (sum_{k|N} k^w t_k) x^N = s` for `t_1..t_N`.
pub fn lambert_extract(s: &TruncatedSeries, weight: u32) -> Result<Vec<Rational>, QExpansionError> {
    if *s.coeff(0) != 1 {
        return Err(SeriesError::ConstantTerm { expected: "1", found: s.coeff(0).to_string() }.into());
    }
    let mut t: Vec<Rational> = Vec::with_capacity(s.order());
    for n in 1..=s.order() {
        let mut value = Rational::from(-s.coeff(n));
        value -= divisor_power_sum(n, weight, &t);
        value /= Integer::from(n).pow(weight);
        t.push(value);
    }
    Ok(t)
}

/// `1 - sum_N (sum_{k|N} k^w t_k) x^N` to order `N` (uses `t_1..t_N`).
pub fn lambert_series(t: &[Rational], weight: u32, order: usize) -> TruncatedSeries {
    let mut s = TruncatedSeries::one(order).into_coeffs();
    for (idx, tk) in t.iter().enumerate().take(order) {
        let k = idx + 1;
        let term = Rational::from(tk * Integer::from(k).pow(weight));
        let mut m = k;
        while m <= order {
            s[m] -= &term;
            m += k;
        }
    }
    TruncatedSeries::new(s)
}

/// A sequence together with the integrality verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientList {
    pub values: Vec<Rational>,
}

impl CoefficientList {
    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|v| *v.denom() == 1)
    }

    /// The values as integers, when all of them are.
    pub fn integers(&self) -> Option<Vec<Integer>> {
        self.is_integral().then(|| self.values.iter().map(|v| v.numer().clone()).collect())
    }
}

/// `b_1..b_N` from the weight-3 series.
pub fn b_table(spec: &RecurrenceSpec, order: usize) -> Result<CoefficientList, QExpansionError> {
    let w = weight3_series(spec, order)?;
    Ok(CoefficientList { values: lambert_extract(&w, 2)? })
}

/// `Q(q) = alpha q prod_n (1 - q^n)^(n b_n)` to order `N`, from `b_1..b_{N-1}`.
pub fn big_q_from_b(alpha: i64, b: &[Rational], order: usize) -> TruncatedSeries {
    assert!(order >= 1);
    let unit_order = order - 1;
    assert!(b.len() >= unit_order, "need b_1..b_{unit_order}");
    let product = euler_product(unit_order, |n| Rational::from(&b[n - 1] * Integer::from(n)));
    product.scale(&Rational::from(alpha)).shift_up()
}

pub fn big_q_of_q(spec: &RecurrenceSpec, order: usize) -> Result<TruncatedSeries, QExpansionError> {
    if order == 0 {
        return Err(QExpansionError::ZeroOrder);
    }
    let b = if order > 1 { b_table(spec, order - 1)?.values } else { Vec::new() };
    Ok(big_q_from_b(spec.alpha, &b, order))
}

/// `a_1..a_N` from `Q d/dQ log q`; needs `q(Q)` to order `N + 1`.
pub fn a_from_log_derivative(q_of_big_q: &TruncatedSeries) -> Result<Vec<Rational>, QExpansionError> {
    let w = log_derivative_of_uniformizer(q_of_big_q)?;
    lambert_extract(&w, 3)
}

/// `a_1..a_N` by peeling the factors `(1 - Q^n)^(n^2 a_n)` off
/// `alpha q(Q) / Q` one at a time; needs `q(Q)` to order `N + 1`.
pub fn a_from_product(alpha: i64, q_of_big_q: &TruncatedSeries) -> Result<Vec<Rational>, QExpansionError> {
    let mut rest = q_of_big_q.shift_down()?.scale(&Rational::from(alpha)).into_coeffs();
    let order = rest.len() - 1;
    if rest[0] != 1 {
        return Err(SeriesError::ConstantTerm { expected: "1", found: rest[0].to_string() }.into());
    }
    let mut a = Vec::with_capacity(order);
    for n in 1..=order {
        // rest = prod_{m >= n} (1 - Q^m)^{e_m} = 1 - e_n Q^n + ...
        let e = Rational::from(-&rest[n]);
        if !e.cmp0().is_eq() {
            // multiply by (1 - Q^n)^{-e} = sum_j binom(e + j - 1, j) Q^{nj}
            let mut factor = vec![(0usize, Rational::from(1))];
            let mut c = Rational::from(1);
            let mut j = 1;
            while n * j <= order {
                c *= Rational::from(&e + (j as i64 - 1));
                c /= j as u64;
                factor.push((n * j, c.clone()));
                j += 1;
            }
            let mut next = vec![Rational::new(); order + 1];
            for (i, r) in rest.iter().enumerate() {
                if r.cmp0().is_eq() {
                    continue;
                }
                for (shift, f) in &factor {
                    if i + shift > order {
                        break;
                    }
                    next[i + shift] += Rational::from(r * f);
                }
            }
            rest = next;
        }
        a.push(e / Integer::from(n * n));
    }
    Ok(a)
}

/// `a_1..a_N` by both routes, failing loudly if they ever disagree.
pub fn a_table(spec: &RecurrenceSpec, order: usize) -> Result<CoefficientList, QExpansionError> {
    if order == 0 {
        return Err(QExpansionError::ZeroOrder);
    }
    let b = b_table(spec, order)?;
    Ok(a_from_b(spec.alpha, &b.values, order)?.0)
}

/// Builds `Q(q)` from `b`, inverts it, and extracts `a` along both routes.
/// Returns the `a` list and `Q(q)` to order `N + 1`.
pub fn a_from_b(
    alpha: i64,
    b: &[Rational],
    order: usize,
) -> Result<(CoefficientList, TruncatedSeries), QExpansionError> {
    let big_q = big_q_from_b(alpha, b, order + 1);
    let q_of_big_q = big_q.revert()?;
    let log_route = a_from_log_derivative(&q_of_big_q)?;
    let product_route = a_from_product(alpha, &q_of_big_q)?;
    if let Some(n) = log_route.iter().zip(&product_route).position(|(x, y)| x != y) {
        return Err(QExpansionError::RouteDisagreement {
            n: n + 1,
            log_route: log_route[n].to_string(),
            product_route: product_route[n].to_string(),
        });
    }
    Ok((CoefficientList { values: log_route }, big_q))
}

/// The computed `a_n`, `b_n` for one spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionTable {
    pub spec: RecurrenceSpec,
    pub order: usize,
    pub b: CoefficientList,
    pub a: CoefficientList,
}

impl ExpansionTable {
    pub fn compute(spec: &RecurrenceSpec, order: usize) -> Result<Self, QExpansionError> {
        if order == 0 {
            return Err(QExpansionError::ZeroOrder);
        }
        let b = b_table(spec, order)?;
        let (a, _) = a_from_b(spec.alpha, &b.values, order)?;
        Ok(ExpansionTable { spec: spec.clone(), order, b, a })
    }

    pub fn b_integral(&self) -> bool {
        self.b.is_integral()
    }

    pub fn a_integral(&self) -> bool {
        self.a.is_integral()
    }
}

/// `kappa (1 - sum_n a_n n^3 Q^n / (1 - Q^n))` to order `N`.
pub fn lmw_expansion(spec: &RecurrenceSpec, a: &[Rational], order: usize) -> Result<TruncatedSeries, QExpansionError> {
    let kappa = spec.kappa.ok_or_else(|| QExpansionError::MissingKappa(spec.to_string()))?;
    Ok(lambert_series(a, 3, order).scale(&Rational::from(kappa)))
}
