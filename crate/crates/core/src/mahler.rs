//! Logarithmic Mahler measure of `F_t(x, y) = t - P(x, y, 1) / (xy)`.
//!
//! Three routes: the constant-term series in `1/t`, a periodic trapezoid rule
//! on the unit torus, and `-(1/nu) log|Q|` with `Q` the pipeline's
//! `Q(q(psi))` evaluated at `psi = t^-nu`. This is the only module that uses
//! floating point.

use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};
use thiserror::Error;

use crate::laurent::{constant_terms_of_powers, torus_sup_bound, LaurentPoly};
use crate::picard_fuchs::mirror_map;
use crate::qexpansion::{big_q_of_q, QExpansionError};
use crate::registry;

pub const DEFAULT_PRECISION: u32 = 128;
pub const DEFAULT_GRID: usize = 128;
pub const DEFAULT_ORDER: usize = 80;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MahlerError {
    #[error("domain not certified (bound {bound}): |t| = {t_abs}")]
    DomainNotCertified { t_abs: String, bound: String },
    #[error("the Q route needs real t above the torus bound {bound}, got {t}")]
    NotRealAboveBound { t: String, bound: String },
    #[error("truncated Q series does not decay at psi = {psi} (ratio estimate {ratio})")]
    NonDecaying { psi: String, ratio: String },
    #[error("unknown example #{0}")]
    UnknownExample(u8),
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error(transparent)]
    Expansion(#[from] QExpansionError),
}

/// A complex number as a pair of floats of equal precision.
#[derive(Debug, Clone, PartialEq)]
pub struct CFloat {
    pub re: Float,
    pub im: Float,
}

impl CFloat {
    pub fn new(re: f64, im: f64, prec: u32) -> Self {
        CFloat { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn real(re: f64, prec: u32) -> Self {
        Self::new(re, 0.0, prec)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn norm_sqr(&self) -> Float {
        Float::with_val(self.prec(), self.re.square_ref()) + Float::with_val(self.prec(), self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn mul(&self, other: &CFloat) -> CFloat {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &other.re) - Float::with_val(p, &self.im * &other.im);
        let im = Float::with_val(p, &self.re * &other.im) + Float::with_val(p, &self.im * &other.re);
        CFloat { re, im }
    }

    fn recip(&self) -> CFloat {
        let n = self.norm_sqr();
        CFloat { re: Float::with_val(self.prec(), &self.re / &n), im: -Float::with_val(self.prec(), &self.im / &n) }
    }

    /// `self * e^{i theta}`
    pub fn rotate(&self, theta: &Float) -> CFloat {
        let p = self.prec();
        let (s, c) = Float::with_val(p, theta).sin_cos(Float::new(p));
        self.mul(&CFloat { re: c, im: s })
    }
}

/// A value together with an estimate of its truncation error.
#[derive(Debug, Clone, PartialEq)]
pub struct MahlerValue {
    pub value: Float,
    pub tail_bound: Float,
}

/// `m(F_t) = log|t| - Re sum_{n<=N} c_n t^-n / n` with `c_n` the constant
/// term of the n-th power of the torus form. Refuses unless `|t|` exceeds
/// the sum `B` of absolute coefficients; the tail bound is
/// `(B/|t|)^{N+1} / ((N+1)(1 - B/|t|))`.
pub fn mahler_series(p: &LaurentPoly, t: &CFloat, order: usize) -> Result<MahlerValue, MahlerError> {
    if order == 0 {
        return Err(MahlerError::ZeroOrder);
    }
    let prec = t.prec();
    let torus = p.torus_form();
    let exact_bound = torus_sup_bound(p);
    let bound = Float::with_val(prec, &exact_bound);
    let t_abs = t.abs();
    if t_abs <= bound {
        return Err(MahlerError::DomainNotCertified { t_abs: format!("{t_abs:.6}"), bound: exact_bound.to_string() });
    }
    let cn: Vec<Rational> = constant_terms_of_powers(&torus, order as u32).split_off(1);

    let xi = t.recip();
    let mut power = xi.clone();
    let mut sum = Float::new(prec);
    for (i, c) in cn.iter().enumerate() {
        if i > 0 {
            power = power.mul(&xi);
        }
        if *c != 0 {
            let term = Float::with_val(prec, &power.re * c) / (i as u32 + 1);
            sum += term;
        }
    }
    let value = Float::with_val(prec, t_abs.ln_ref()) - sum;

    let ratio = Float::with_val(prec, &bound / &t_abs);
    let n1 = order as u32 + 1;
    let tail_bound = Float::with_val(prec, ratio.clone().pow(n1)) / (Float::with_val(prec, 1u32 - &ratio) * n1);
    Ok(MahlerValue { value, tail_bound })
}

/// Result of the torus quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureValue {
    pub value: Float,
    pub grid_size: usize,
    /// Smallest `|F_t|` met on the grid.
    pub min_abs: Float,
    pub warnings: Vec<String>,
}

/// Floor on `|F_t|` below which a grid point counts as near-singular.
pub fn default_floor(prec: u32) -> Float {
    Float::with_val(prec, 1e-20)
}

/// `M x M` periodic trapezoid rule for the average of `log|F_t|` over the
/// unit torus. Rows are evaluated in parallel and summed in row order, so the
/// result is reproducible at a given precision.
pub fn mahler_quadrature(p: &LaurentPoly, t: &CFloat, grid: usize) -> QuadratureValue {
    mahler_quadrature_with_floor(p, t, grid, &default_floor(t.prec()))
}

pub fn mahler_quadrature_with_floor(p: &LaurentPoly, t: &CFloat, grid: usize, floor: &Float) -> QuadratureValue {
    assert!(grid >= 1, "grid size must be positive");
    let prec = t.prec();
    let m = grid as i64;
    let torus = p.torus_form();
    let terms: Vec<(i64, i64, Float)> = torus
        .terms()
        .map(|(e, c)| (e[0] as i64, e.get(1).copied().unwrap_or(0) as i64, Float::with_val(prec, c)))
        .collect();

    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let table: Vec<(Float, Float)> = (0..grid)
        .map(|k| {
            let angle = Float::with_val(prec, &two_pi * k as u32) / grid as u32;
            let (s, c) = angle.sin_cos(Float::new(prec));
            (c, s)
        })
        .collect();

    let floor_sqr = Float::with_val(prec, floor.square_ref());
    let rows: Vec<(Float, Float)> = (0..m)
        .into_par_iter()
        .map(|j| {
            let mut row_sum = Float::new(prec);
            let mut row_min = Float::with_val(prec, rug::float::Special::Infinity);
            for k in 0..m {
                let mut re = t.re.clone();
                let mut im = t.im.clone();
                for (a, b, c) in &terms {
                    let (cos, sin) = &table[(a * j + b * k).rem_euclid(m) as usize];
                    re -= Float::with_val(prec, c * cos);
                    im -= Float::with_val(prec, c * sin);
                }
                let norm = Float::with_val(prec, re.square_ref()) + Float::with_val(prec, im.square_ref());
                if norm < row_min {
                    row_min.clone_from(&norm);
                }
                if norm.is_zero() {
                    row_sum = Float::with_val(prec, rug::float::Special::NegInfinity);
                } else {
                    row_sum += norm.ln() / 2u32;
                }
            }
            (row_sum, row_min)
        })
        .collect();

    let mut total = Float::new(prec);
    let mut min_sqr = Float::with_val(prec, rug::float::Special::Infinity);
    for (s, mn) in rows {
        total += s;
        if mn < min_sqr {
            min_sqr = mn;
        }
    }
    let value = total / (grid as u32) / (grid as u32);
    let mut warnings = Vec::new();
    if min_sqr < floor_sqr {
        warnings.push(format!(
            "|F_t| drops to {} on the grid, below the floor {}; the value carries no accuracy claim",
            fmt_float(&Float::with_val(prec, min_sqr.sqrt_ref())),
            fmt_float(floor)
        ));
    }
    QuadratureValue { value, grid_size: grid, min_abs: min_sqr.sqrt(), warnings }
}

/// Series and quadrature values side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureReport {
    pub t: CFloat,
    pub bound: Float,
    pub domain_certified: bool,
    /// `None` when the domain is not certified.
    pub series: Option<MahlerValue>,
    pub quadrature: QuadratureValue,
    pub abs_difference: Option<Float>,
    pub warnings: Vec<String>,
}

pub fn quadrature_report(
    p: &LaurentPoly,
    t: &CFloat,
    order: usize,
    grid: usize,
) -> Result<QuadratureReport, MahlerError> {
    let prec = t.prec();
    let bound = Float::with_val(prec, &torus_sup_bound(p));
    let quadrature = mahler_quadrature(p, t, grid);
    let mut warnings = quadrature.warnings.clone();
    let series = match mahler_series(p, t, order) {
        Ok(v) => Some(v),
        Err(e @ MahlerError::DomainNotCertified { .. }) => {
            warnings.push(e.to_string());
            None
        }
        Err(e) => return Err(e),
    };
    let abs_difference = series.as_ref().map(|s| Float::with_val(prec, &s.value - &quadrature.value).abs());
    Ok(QuadratureReport {
        t: t.clone(),
        domain_certified: series.is_some(),
        bound,
        series,
        quadrature,
        abs_difference,
        warnings,
    })
}

/// `-(1/nu) log|Q(q(psi))|` at `psi = t^-nu`, with a tail estimate from the
/// root test on the last quarter of the coefficients.
pub fn mahler_from_big_q(
    spec: &crate::picard_fuchs::RecurrenceSpec,
    t: &Float,
    order: usize,
) -> Result<MahlerValue, MahlerError> {
    if order == 0 {
        return Err(MahlerError::ZeroOrder);
    }
    let prec = t.prec();
    let nu = spec.nu as i32;
    let psi = Float::with_val(prec, t.pow(-nu));

    // Q / psi as a series in psi
    let big_q = big_q_of_q(spec, order)?;
    let q_of_psi = mirror_map(spec, order);
    let ratio_series =
        big_q.compose(&q_of_psi).map_err(QExpansionError::from)?.shift_down().map_err(QExpansionError::from)?;

    let coeffs: Vec<Float> = ratio_series.coeffs().iter().map(|c| Float::with_val(prec, c)).collect();
    let mut value = Float::new(prec);
    for c in coeffs.iter().rev() {
        value *= &psi;
        value += c;
    }

    let n = coeffs.len() - 1;
    let start = (3 * n / 4).max(1);
    let mut root = Float::new(prec);
    for (k, c) in coeffs.iter().enumerate().skip(start) {
        if !c.is_zero() {
            let r = Float::with_val(prec, c.abs_ref()).pow(Float::with_val(prec, 1) / k as u32);
            if r > root {
                root = r;
            }
        }
    }
    let ratio = Float::with_val(prec, &root * &psi).abs();
    if ratio >= 1 {
        return Err(MahlerError::NonDecaying { psi: fmt_float(&psi), ratio: fmt_float(&ratio) });
    }
    let last = Float::with_val(prec, &ratio).pow(n as u32 + 1);
    let tail = last / Float::with_val(prec, 1u32 - &ratio);
    let abs_value = Float::with_val(prec, value.abs_ref());
    let tail_bound = Float::with_val(prec, &tail / &abs_value) / spec.nu;

    // log|Q| = log psi + log|Q/psi|
    let log_q = Float::with_val(prec, psi.ln_ref()) + abs_value.ln();
    Ok(MahlerValue { value: -log_q / spec.nu, tail_bound })
}

/// Series, quadrature and `Q`-route values for a registry example.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleReport {
    pub example: u8,
    pub nu: u32,
    pub report: QuadratureReport,
    pub big_q: MahlerValue,
    pub series_vs_quadrature: Option<Float>,
    pub series_vs_big_q: Option<Float>,
    pub quadrature_vs_big_q: Float,
}

impl TripleReport {
    /// Largest of the pairwise differences.
    pub fn max_difference(&self) -> Float {
        let mut max = self.quadrature_vs_big_q.clone();
        for d in [&self.series_vs_quadrature, &self.series_vs_big_q].into_iter().flatten() {
            if *d > max {
                max.clone_from(d);
            }
        }
        max
    }
}

/// The three-way cross-check for a registry example at real `t` above the
/// torus bound, where every series involved is real with positive leading
/// term and no phase choice is needed.
pub fn mahler_vs_big_q(example_id: u8, t: &Float, order: usize, grid: usize) -> Result<TripleReport, MahlerError> {
    let example = registry::example(example_id).ok_or(MahlerError::UnknownExample(example_id))?;
    let prec = t.prec();
    let poly = example.poly();
    let exact_bound = torus_sup_bound(&poly);
    if *t <= exact_bound {
        return Err(MahlerError::NotRealAboveBound { t: format!("{t:.6}"), bound: exact_bound.to_string() });
    }
    let tc = CFloat { re: t.clone(), im: Float::new(prec) };
    let report = quadrature_report(&poly, &tc, order, grid)?;
    let big_q = mahler_from_big_q(&example.spec, t, order)?;
    let diff = |a: &Float, b: &Float| Float::with_val(prec, a - b).abs();
    let series_vs_quadrature = report.abs_difference.clone();
    let series_vs_big_q = report.series.as_ref().map(|s| diff(&s.value, &big_q.value));
    let quadrature_vs_big_q = diff(&report.quadrature.value, &big_q.value);
    Ok(TripleReport {
        example: example_id,
        nu: example.spec.nu,
        report,
        big_q,
        series_vs_quadrature,
        series_vs_big_q,
        quadrature_vs_big_q,
    })
}

/// Decimal rendering with enough digits for the float's precision.
pub fn fmt_float(x: &Float) -> String {
    let digits = ((x.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize).max(1);
    x.to_string_radix(10, Some(digits))
}

/// Three significant digits, for error estimates and differences.
pub fn fmt_short(x: &Float) -> String {
    format!("{:.3}", x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::parse_poly;

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        Float::with_val(a.prec(), a - b).abs() < tol
    }

    #[test]
    fn monomial_torus_form_gives_log_t() {
        let p = parse_poly("X^2*Y*Z").unwrap();
        let t = CFloat::real(5.0, 128);
        let log5 = Float::with_val(128, 5).ln();
        let s = mahler_series(&p, &t, 20).unwrap();
        assert_eq!(s.value, log5);
        let q = mahler_quadrature(&p, &t, 64);
        assert!(close(&q.value, &log5, 1e-12));
        assert!(q.warnings.is_empty());
    }

    #[test]
    fn constant_polynomial() {
        let p = LaurentPoly::zero(3);
        let t = CFloat::real(3.0, 128);
        let log3 = Float::with_val(128, 3).ln();
        for m in [1, 4, 16] {
            assert!(close(&mahler_quadrature(&p, &t, m).value, &log3, 1e-35));
        }
    }

    #[test]
    fn series_refuses_uncertified_domain() {
        let p = parse_poly("X^2Y+Y^2Z+Z^2X").unwrap();
        let err = mahler_series(&p, &CFloat::real(2.0, 64), 10).unwrap_err();
        assert!(matches!(err, MahlerError::DomainNotCertified { .. }));
        let report = quadrature_report(&p, &CFloat::real(2.0, 64), 10, 32).unwrap();
        assert!(!report.domain_certified);
        assert!(report.abs_difference.is_none());
        assert!(report.warnings.iter().any(|w| w.contains("bound 3")));
    }

    #[test]
    fn series_leading_terms_for_franel_example() {
        let p = parse_poly("(X+Y)(Y+Z)(Z+X)").unwrap();
        let t = CFloat::real(100.0, 128);
        let s = mahler_series(&p, &t, 3).unwrap();
        let expected = Float::with_val(128, 100).ln()
            - Float::with_val(128, 2) / 100u32
            - Float::with_val(128, 10) / 20000u32
            - Float::with_val(128, 56) / 3_000_000u32;
        assert!(close(&s.value, &expected, 1e-30));
    }

    #[test]
    fn float_rendering() {
        assert_eq!(fmt_float(&Float::with_val(20, 2.5)), "2.500000");
        assert_eq!(fmt_short(&Float::with_val(64, 0.000123456)), "1.23e-4");
        assert_eq!(fmt_short(&Float::new(64)), "0");
    }

    #[test]
    fn quadrature_is_deterministic() {
        let p = parse_poly("(X+Y)(Y+Z)(Z+X)").unwrap();
        let t = CFloat::new(20.0, 3.0, 96);
        assert_eq!(mahler_quadrature(&p, &t, 48), mahler_quadrature(&p, &t, 48));
    }

    #[test]
    fn floor_warning() {
        // F_t = 1 - x vanishes at x = 1, which lies on the grid
        let p = parse_poly("X^2*Y*Z").unwrap();
        let q = mahler_quadrature(&p, &CFloat::real(1.0, 64), 8);
        assert!(!q.warnings.is_empty());
        assert!(q.min_abs.is_zero());
    }
}
