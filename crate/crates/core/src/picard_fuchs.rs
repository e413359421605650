//! The three-term recurrence, its Frobenius deformation and the mirror map.
//!
//! Everything is driven by a [`RecurrenceSpec`] `(A, B, lambda)`:
//!
//! ```text
//! (m+1)^2 u_{m+1} = (A m^2 + A m + lambda) u_m - B m^2 u_{m-1},   u_0 = 1, u_{-1} = 0
//! ```
//!
//! whose generating function `g1(psi) = sum u_m psi^m` is annihilated by
//! `theta((1 - A psi + B psi^2) theta) + psi(-lambda + B psi)` with
//! `theta = psi d/dpsi`.

use std::fmt;
use std::ops::{Add, Div, Mul, RangeInclusive, Sub};

use rayon::prelude::*;
use rug::{Assign, Integer, Rational};

use crate::laurent::{cn_sequence, LaurentPoly};
use crate::series::TruncatedSeries;

/// The data that drives the whole pipeline for one elliptic pencil.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RecurrenceSpec {
    pub a: i64,
    pub b: i64,
    pub lambda: i64,
    /// `psi = xi^nu`; the mirror map and `Q` are functions of `psi`.
    pub nu: u32,
    /// Leading coefficient of `Q = alpha psi + O(psi^2)`, either 1 or -1.
    pub alpha: i64,
    /// Normalisation of the instanton expansion; unknown for some pencils.
    pub kappa: Option<i64>,
    /// Source polynomial, when the spec comes from a pencil.
    pub polynomial: Option<String>,
}

impl RecurrenceSpec {
    /// A bare triple with `nu = 1`, `alpha = -1` and no normalisation.
    pub fn new(a: i64, b: i64, lambda: i64) -> Self {
        RecurrenceSpec { a, b, lambda, nu: 1, alpha: -1, kappa: None, polynomial: None }
    }

    pub fn with_nu(mut self, nu: u32) -> Self {
        assert!(nu >= 1, "nu must be positive");
        self.nu = nu;
        self
    }

    pub fn with_alpha(mut self, alpha: i64) -> Self {
        assert!(alpha == 1 || alpha == -1, "alpha must be +1 or -1");
        self.alpha = alpha;
        self
    }

    pub fn with_kappa(mut self, kappa: Option<i64>) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_polynomial(mut self, text: impl Into<String>) -> Self {
        self.polynomial = Some(text.into());
        self
    }

    pub fn triple(&self) -> (i64, i64, i64) {
        (self.a, self.b, self.lambda)
    }
}

impl fmt::Display for RecurrenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(A,B,lambda)=({},{},{}) nu={} alpha={}", self.a, self.b, self.lambda, self.nu, self.alpha)?;
        if let Some(k) = self.kappa {
            write!(f, " kappa={k}")?;
        }
        Ok(())
    }
}

/// `u_0, ..., u_M` from the recurrence.
pub fn u_sequence(spec: &RecurrenceSpec, order: usize) -> Vec<Rational> {
    let (a, b, lambda) = spec.triple();
    let mut u: Vec<Rational> = Vec::with_capacity(order + 1);
    u.push(Rational::from(1));
    for m in 0..order {
        let mi = Integer::from(m);
        let lead = Integer::from(a) * Integer::from(&mi * &mi) + Integer::from(a) * &mi + lambda;
        let mut next = Rational::from(&u[m] * &lead);
        if m >= 1 && b != 0 {
            let back = Integer::from(b) * Integer::from(&mi * &mi);
            next -= Rational::from(&u[m - 1] * &back);
        }
        let m1 = Integer::from(m + 1);
        next /= Integer::from(&m1 * &m1);
        u.push(next);
    }
    u
}

/// A dual number `re + eps * ε` with `ε^2 = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dual {
    pub re: Rational,
    pub eps: Rational,
}

impl Dual {
    pub fn new(re: Rational, eps: Rational) -> Self {
        Dual { re, eps }
    }

    pub fn real(re: impl Into<Rational>) -> Self {
        Dual { re: re.into(), eps: Rational::new() }
    }

    /// `m + ε`
    pub fn shifted(m: i64) -> Self {
        Dual { re: Rational::from(m), eps: Rational::from(1) }
    }

    pub fn scale(&self, c: &Rational) -> Dual {
        Dual { re: Rational::from(&self.re * c), eps: Rational::from(&self.eps * c) }
    }

    pub fn square(&self) -> Dual {
        self * self
    }
}

impl Add for &Dual {
    type Output = Dual;
    fn add(self, o: &Dual) -> Dual {
        Dual { re: Rational::from(&self.re + &o.re), eps: Rational::from(&self.eps + &o.eps) }
    }
}

impl Sub for &Dual {
    type Output = Dual;
    fn sub(self, o: &Dual) -> Dual {
        Dual { re: Rational::from(&self.re - &o.re), eps: Rational::from(&self.eps - &o.eps) }
    }
}

impl Mul for &Dual {
    type Output = Dual;
    fn mul(self, o: &Dual) -> Dual {
        let re = Rational::from(&self.re * &o.re);
        let mut eps = Rational::from(&self.re * &o.eps);
        eps += Rational::from(&self.eps * &o.re);
        Dual { re, eps }
    }
}

impl Div for &Dual {
    type Output = Dual;
    /// `(a + bε)/(c + dε) = a/c + (b c - a d)/c^2 ε`; requires `c != 0`.
    fn div(self, o: &Dual) -> Dual {
        assert!(!o.re.cmp0().is_eq(), "dual division by a pure infinitesimal");
        let re = Rational::from(&self.re / &o.re);
        let mut eps = Rational::from(&self.eps * &o.re);
        eps -= Rational::from(&self.re * &o.eps);
        eps /= Rational::from(o.re.square_ref());
        Dual { re, eps }
    }
}

/// The holomorphic solution `g1` and the regular part `h` of the logarithmic
/// solution `g2 = g1 log(psi) + h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusPair {
    pub g1: TruncatedSeries,
    pub h: TruncatedSeries,
}

/// Runs the ε-deformed recurrence
/// `(m+ε)^2 u_m(ε) = (A(m+ε)^2 - A(m+ε) + λ) u_{m-1}(ε) - B(m-1+ε)^2 u_{m-2}(ε)`
/// from `u_0(ε) = 1` and splits `u_m(ε) = u_m + v_m ε`.
pub fn frobenius(spec: &RecurrenceSpec, order: usize) -> FrobeniusPair {
    let (a, b, lambda) = spec.triple();
    let a_r = Rational::from(a);
    let b_r = Rational::from(b);
    let mut u: Vec<Dual> = Vec::with_capacity(order + 1);
    u.push(Dual::real(1));
    for m in 1..=order {
        let me = Dual::shifted(m as i64);
        let me2 = me.square();
        let mut coeff = &me2.scale(&a_r) - &me.scale(&a_r);
        coeff.re += lambda;
        let mut rhs = &coeff * &u[m - 1];
        if m >= 2 && b != 0 {
            let back = Dual::shifted(m as i64 - 1).square().scale(&b_r);
            rhs = &rhs - &(&back * &u[m - 2]);
        }
        u.push(&rhs / &me2);
    }
    let (re, eps): (Vec<Rational>, Vec<Rational>) = u.into_iter().map(|d| (d.re, d.eps)).unzip();
    FrobeniusPair { g1: TruncatedSeries::new(re), h: TruncatedSeries::new(eps) }
}

/// A candidate solution of the differential equation.
#[derive(Debug, Clone, Copy)]
pub enum Candidate<'a> {
    /// A plain power series in `psi`.
    Holomorphic(&'a TruncatedSeries),
    /// `g1 log(psi) + h`, handled through the product rule so only power
    /// series ever appear.
    Logarithmic { g1: &'a TruncatedSeries, h: &'a TruncatedSeries },
}

/// Result of applying the differential operator: `log_part * log(psi) + regular`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdeResidual {
    pub log_part: TruncatedSeries,
    pub regular: TruncatedSeries,
}

impl OdeResidual {
    pub fn is_zero(&self) -> bool {
        self.log_part.is_zero() && self.regular.is_zero()
    }

    /// Lowest power of `psi` with a nonzero residual coefficient, if any.
    pub fn first_nonzero(&self) -> Option<usize> {
        let first = |s: &TruncatedSeries| s.coeffs().iter().position(|c| !c.cmp0().is_eq());
        match (first(&self.log_part), first(&self.regular)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

fn operator_coefficients(spec: &RecurrenceSpec, order: usize) -> (TruncatedSeries, TruncatedSeries) {
    let p = TruncatedSeries::from_ints(&[1, -spec.a, spec.b], order);
    let r = TruncatedSeries::from_ints(&[0, -spec.lambda, spec.b], order);
    (p, r)
}

fn apply_operator(spec: &RecurrenceSpec, g: &TruncatedSeries) -> TruncatedSeries {
    let (p, r) = operator_coefficients(spec, g.order());
    let inner = &p * &g.xdx();
    &inner.xdx() + &(&r * g)
}

/// Applies `theta((1 - A psi + B psi^2) theta g) + psi(-lambda + B psi) g`.
/// The residual is exact up to the order of the candidate.
pub fn ode_residual(spec: &RecurrenceSpec, candidate: Candidate<'_>) -> OdeResidual {
    match candidate {
        Candidate::Holomorphic(g) => {
            OdeResidual { log_part: TruncatedSeries::zero(g.order()), regular: apply_operator(spec, g) }
        }
        Candidate::Logarithmic { g1, h } => {
            let n = g1.order().min(h.order());
            let g1 = g1.truncate(n);
            let h = h.truncate(n);
            let (p, _) = operator_coefficients(spec, n);
            // L[g1 log] = L[g1] log + p theta(g1) + theta(p g1)
            let cross = &(&p * &g1.xdx()) + &(&p * &g1).xdx();
            OdeResidual { log_part: apply_operator(spec, &g1), regular: &cross + &apply_operator(spec, &h) }
        }
    }
}

/// The mirror map `q(psi) = psi exp(h/g1)` to order `M` (leading term `psi`).
pub fn mirror_map(spec: &RecurrenceSpec, order: usize) -> TruncatedSeries {
    assert!(order >= 1, "mirror map needs order >= 1");
    let pair = frobenius(spec, order - 1);
    let ratio = pair.h.divide(&pair.g1).expect("g1(0) = 1");
    ratio.exp().expect("h(0) = 0").shift_up()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyMismatch {
    pub n: usize,
    pub c_n: Rational,
    pub expected: Rational,
}

/// Outcome of comparing the constant terms `c_n` of a pencil with the
/// recurrence output under the `nu`-spacing rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub order: usize,
    pub first_mismatch: Option<ConsistencyMismatch>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Checks `c_n = 0` for `nu ∤ n` and `c_{nu m} = u_m` for `n <= N`.
pub fn check_consistency(p: &LaurentPoly, spec: &RecurrenceSpec, order: usize) -> ConsistencyReport {
    let nu = spec.nu as usize;
    let c = cn_sequence(p, order as u32);
    let u = u_sequence(spec, order / nu);
    let first_mismatch = c.into_iter().enumerate().find_map(|(n, c_n)| {
        let expected = if n % nu == 0 { u[n / nu].clone() } else { Rational::new() };
        (c_n != expected).then_some(ConsistencyMismatch { n, c_n, expected })
    });
    ConsistencyReport { order, first_mismatch }
}

/// True when `u_0..=u_M` are all integers.
pub fn is_integral_triple(a: i64, b: i64, lambda: i64, order: usize) -> bool {
    let mut prev = Integer::new();
    let mut cur = Integer::from(1);
    let mut next = Integer::new();
    let mut tmp = Integer::new();
    for m in 0..order {
        let m_sq = (m as i64) * (m as i64);
        // (m+1)^2 u_{m+1} = (A m^2 + A m + lambda) u_m - B m^2 u_{m-1}
        tmp.assign(a * m_sq + a * m as i64 + lambda);
        next.assign(&tmp * &cur);
        if b != 0 && m >= 1 {
            tmp.assign(b * m_sq);
            tmp *= &prev;
            next -= &tmp;
        }
        let d = ((m + 1) * (m + 1)) as u64;
        if !next.is_divisible_u(d as u32) {
            return false;
        }
        next.div_exact_u_mut(d as u32);
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    true
}

/// All triples in the box whose first `M + 1` recurrence terms are integers,
/// sorted lexicographically. Deterministic regardless of thread schedule.
pub fn search_triples(
    a_range: RangeInclusive<i64>,
    b_range: RangeInclusive<i64>,
    lambda_range: RangeInclusive<i64>,
    order: usize,
) -> Vec<(i64, i64, i64)> {
    let boxes: Vec<(i64, i64)> = a_range.flat_map(|a| b_range.clone().map(move |b| (a, b))).collect();
    let mut found: Vec<(i64, i64, i64)> = boxes
        .into_par_iter()
        .flat_map_iter(|(a, b)| {
            lambda_range.clone().filter(move |&l| is_integral_triple(a, b, l, order)).map(move |l| (a, b, l))
        })
        .collect();
    found.sort_unstable();
    found
}
