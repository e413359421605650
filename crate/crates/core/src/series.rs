//! Truncated power series over exact rationals.
//!
//! A [`TruncatedSeries`] of order `N` stores the coefficients of `x^0 .. x^N`
//! and says nothing about higher powers. Binary operations return a series
//! whose order is the minimum of the operand orders; nothing ever silently
//! extends the known precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Assign, Integer, Rational};
use thiserror::Error;

/// Arbitrary-precision rational; always kept in lowest terms with a positive
/// denominator by `rug`.
pub type ExactRational = Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series has zero constant term and cannot be inverted")]
    ZeroConstantTerm,
    #[error("expected constant term {expected}, found {found}")]
    ConstantTerm { expected: &'static str, found: String },
    #[error("series reversion needs f(0) = 0 and f'(0) != 0")]
    NotReversible,
    #[error("cannot divide by x: coefficient of x^0 is {0}")]
    NotDivisibleByX(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    /// Builds a series from its coefficients; the order is `coeffs.len() - 1`.
    ///
    /// Panics on an empty vector: a series always knows at least `x^0`.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least one coefficient");
        TruncatedSeries { coeffs }
    }

    /// Coefficients given as integers, zero-padded (or cut) to `order`.
    pub fn from_ints(values: &[i64], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (k, &v) in values.iter().enumerate().take(order + 1) {
            s.coeffs[k] = Rational::from(v);
        }
        s
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize) -> Rational) -> Self {
        TruncatedSeries { coeffs: (0..=order).map(&mut f).collect() }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries { coeffs: vec![Rational::new(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::from(1), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c * x^k`, truncated at `order`.
    pub fn monomial(k: usize, c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The identity series `x`.
    pub fn x(order: usize) -> Self {
        Self::monomial(1, Rational::from(1), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.cmp0().is_eq())
    }

    /// True when every known coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| *c.denom() == 1)
    }

    /// Drops coefficients above `order`. Asking for more precision than the
    /// series carries is a logic error.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a series from order {} to {}", self.order(), order);
        TruncatedSeries { coeffs: self.coeffs[..=order].to_vec() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|a| Rational::from(a * c)).collect() }
    }

    /// Substitutes `x -> x^k` (k >= 1). The order is unchanged: coefficients
    /// of `f(x^k)` up to `x^N` only need `f` up to `x^(N/k)`.
    pub fn rescale(&self, k: usize) -> Self {
        assert!(k >= 1);
        let n = self.order();
        let mut out = Self::zero(n);
        for (j, c) in self.coeffs.iter().enumerate() {
            if j * k > n {
                break;
            }
            out.coeffs[j * k] = c.clone();
        }
        out
    }

    /// Multiplies by `x`; the product is known one order further.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::new());
        coeffs.extend(self.coeffs.iter().cloned());
        TruncatedSeries { coeffs }
    }

    /// Divides by `x`; requires a zero constant term and loses one order.
    pub fn shift_down(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].cmp0().is_eq() {
            return Err(SeriesError::NotDivisibleByX(self.coeffs[0].to_string()));
        }
        if self.coeffs.len() == 1 {
            // x * (unknown) with nothing known: keep the order-0 convention.
            return Err(SeriesError::NotDivisibleByX("0 (order 0)".into()));
        }
        Ok(TruncatedSeries { coeffs: self.coeffs[1..].to_vec() })
    }

    /// Formal derivative `d/dx`; the order drops by one (order 0 stays 0).
    pub fn derive(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        TruncatedSeries {
            coeffs: self.coeffs.iter().enumerate().skip(1).map(|(k, c)| Rational::from(c * Integer::from(k))).collect(),
        }
    }

    /// The Euler operator `x d/dx`.
    pub fn xdx(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().enumerate().map(|(k, c)| Rational::from(c * Integer::from(k))).collect(),
        }
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let f0 = &self.coeffs[0];
        if f0.cmp0().is_eq() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let n = self.order();
        let inv0 = Rational::from(f0.recip_ref());
        let mut g: Vec<Rational> = Vec::with_capacity(n + 1);
        g.push(inv0.clone());
        let mut acc = Rational::new();
        let mut tmp = Rational::new();
        for k in 1..=n {
            acc.assign(0);
            for j in 1..=k {
                if self.coeffs[j].cmp0().is_eq() {
                    continue;
                }
                tmp.assign(&self.coeffs[j] * &g[k - j]);
                acc += &tmp;
            }
            acc *= &inv0;
            g.push(Rational::from(-&acc));
        }
        Ok(TruncatedSeries { coeffs: g })
    }

    /// `self / other`, with `other(0) != 0`.
    pub fn divide(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self * &other.invert()?)
    }

    /// Formal exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].cmp0().is_eq() {
            return Err(SeriesError::ConstantTerm { expected: "0", found: self.coeffs[0].to_string() });
        }
        // x e' = (x g') e  =>  k e_k = sum_{j=1..k} j g_j e_{k-j}
        let n = self.order();
        let dg = self.xdx();
        let mut e: Vec<Rational> = Vec::with_capacity(n + 1);
        e.push(Rational::from(1));
        let mut acc = Rational::new();
        let mut tmp = Rational::new();
        for k in 1..=n {
            acc.assign(0);
            for j in 1..=k {
                if dg.coeffs[j].cmp0().is_eq() {
                    continue;
                }
                tmp.assign(&dg.coeffs[j] * &e[k - j]);
                acc += &tmp;
            }
            acc /= k as u64;
            e.push(acc.clone());
        }
        Ok(TruncatedSeries { coeffs: e })
    }

    /// Formal logarithm of a series with constant term 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        self.require_unit()?;
        // f (x g') = x f'  =>  k g_k = k f_k - sum_{j=1..k-1} f_j (k-j) g_{k-j}
        let n = self.order();
        let mut dg: Vec<Rational> = Vec::with_capacity(n + 1);
        dg.push(Rational::new());
        let mut acc = Rational::new();
        let mut tmp = Rational::new();
        for k in 1..=n {
            acc.assign(&self.coeffs[k] * Integer::from(k));
            for j in 1..k {
                if self.coeffs[j].cmp0().is_eq() {
                    continue;
                }
                tmp.assign(&self.coeffs[j] * &dg[k - j]);
                acc -= &tmp;
            }
            dg.push(acc.clone());
        }
        let coeffs = dg.into_iter().enumerate().map(|(k, c)| if k == 0 { c } else { c / Integer::from(k) }).collect();
        Ok(TruncatedSeries { coeffs })
    }

    /// `f^r` for a unit series `f(0) = 1`, i.e. `exp(r log f)`.
    ///
    /// Evaluated with the power recurrence `k p_k = sum_j (r j - (k - j)) f_j p_{k-j}`,
    /// which agrees with the exp/log definition coefficientwise.
    pub fn pow_rational(&self, r: &Rational) -> Result<Self, SeriesError> {
        self.require_unit()?;
        let n = self.order();
        let mut p: Vec<Rational> = Vec::with_capacity(n + 1);
        p.push(Rational::from(1));
        let mut acc = Rational::new();
        let mut tmp = Rational::new();
        let mut weight = Rational::new();
        for k in 1..=n {
            acc.assign(0);
            for j in 1..=k {
                if self.coeffs[j].cmp0().is_eq() {
                    continue;
                }
                weight.assign(r * Integer::from(j));
                weight -= Integer::from(k - j);
                weight *= &self.coeffs[j];
                tmp.assign(&weight * &p[k - j]);
                acc += &tmp;
            }
            acc /= k as u64;
            p.push(acc.clone());
        }
        Ok(TruncatedSeries { coeffs: p })
    }

    pub fn pow_int(&self, e: i64) -> Result<Self, SeriesError> {
        if e >= 0 {
            let mut acc = Self::one(self.order());
            let mut base = self.clone();
            let mut e = e as u64;
            while e > 0 {
                if e & 1 == 1 {
                    acc = &acc * &base;
                }
                e >>= 1;
                if e > 0 {
                    base = &base * &base;
                }
            }
            Ok(acc)
        } else {
            self.invert()?.pow_int(-e)
        }
    }

    /// `self(inner(x))` for `inner(0) = 0`, by Horner's rule.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].cmp0().is_eq() {
            return Err(SeriesError::ConstantTerm { expected: "0", found: inner.coeffs[0].to_string() });
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut acc = Self::constant(self.coeffs[n].clone(), n);
        for k in (0..n).rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse `g` with `f(g(x)) = x + O(x^(N+1))`.
    ///
    /// Lagrange inversion: with `phi = x / f`, `[x^n] g = [x^(n-1)] phi^n / n`.
    /// Each power is generated only up to the degree that is read off.
    pub fn revert(&self) -> Result<Self, SeriesError> {
        let n = self.order();
        if !self.coeffs[0].cmp0().is_eq() || n == 0 || self.coeffs[1].cmp0().is_eq() {
            return Err(SeriesError::NotReversible);
        }
        let phi = self.shift_down()?.invert()?;
        let phi0_inv = Rational::from(phi.coeffs[0].recip_ref());
        let mut g = Self::zero(n);
        let mut p: Vec<Rational> = Vec::with_capacity(n);
        let mut acc = Rational::new();
        let mut tmp = Rational::new();
        for power in 1..=n {
            // p = phi^power up to degree power-1 via the power recurrence
            // k phi_0 p_k = sum_{j=1..k} ((power + 1) j - k) phi_j p_{k-j}
            p.clear();
            p.push(Rational::from((&phi.coeffs[0]).pow(power as i32)));
            for k in 1..power {
                acc.assign(0);
                for j in 1..=k {
                    if phi.coeffs[j].cmp0().is_eq() {
                        continue;
                    }
                    let w = (power as i64 + 1) * j as i64 - k as i64;
                    if w == 0 {
                        continue;
                    }
                    tmp.assign(&phi.coeffs[j] * &p[k - j]);
                    tmp *= w;
                    acc += &tmp;
                }
                acc *= &phi0_inv;
                acc /= k as u64;
                p.push(acc.clone());
            }
            g.coeffs[power] = Rational::from(&p[power - 1] / Integer::from(power));
        }
        Ok(g)
    }

    fn require_unit(&self) -> Result<(), SeriesError> {
        if self.coeffs[0] != 1 {
            return Err(SeriesError::ConstantTerm { expected: "1", found: self.coeffs[0].to_string() });
        }
        Ok(())
    }
}

/// `prod_{n >= 1} (1 - x^n)^{e_n}` truncated at `order`, evaluated as
/// `exp(sum_n e_n log(1 - x^n))`. Factors with `n > order` contribute nothing.
pub fn euler_product(order: usize, mut exponent: impl FnMut(usize) -> Rational) -> TruncatedSeries {
    let mut log = TruncatedSeries::zero(order);
    for n in 1..=order {
        let e = exponent(n);
        if e.cmp0().is_eq() {
            continue;
        }
        // log(1 - x^n) = -sum_j x^{nj} / j
        let mut j = 1usize;
        while n * j <= order {
            log.coeffs[n * j] -= Rational::from(&e / Integer::from(j));
            j += 1;
        }
    }
    log.exp().expect("log of an Euler product has zero constant term")
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries[{}](", self.order())?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.cmp0().is_eq() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(x^{})", self.order() + 1)
    }
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &'a TruncatedSeries) -> TruncatedSeries {
        let n = self.order().min(rhs.order());
        TruncatedSeries::from_fn(n, |k| Rational::from(&self.coeffs[k] + &rhs.coeffs[k]))
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &'a TruncatedSeries) -> TruncatedSeries {
        let n = self.order().min(rhs.order());
        TruncatedSeries::from_fn(n, |k| Rational::from(&self.coeffs[k] - &rhs.coeffs[k]))
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect() }
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;

    /// Cauchy product truncated at the smaller order.
    fn mul(self, rhs: &'a TruncatedSeries) -> TruncatedSeries {
        let n = self.order().min(rhs.order());
        let mut out = vec![Rational::new(); n + 1];
        let mut tmp = Rational::new();
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.cmp0().is_eq() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                if b.cmp0().is_eq() {
                    continue;
                }
                tmp.assign(a * b);
                out[i + j] += &tmp;
            }
        }
        TruncatedSeries { coeffs: out }
    }
}
