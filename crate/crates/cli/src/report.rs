use std::fmt::Write as _;

use mirrorq::laurent::{parse_poly, torus_sup_bound};
use mirrorq::mahler::{self, fmt_float, fmt_short, CFloat, MahlerError, MahlerValue};
use mirrorq::modular::{identity_suite, IdentityOutcome};
use mirrorq::picard_fuchs::{
    check_consistency, frobenius, ode_residual, search_triples, Candidate, OdeResidual, RecurrenceSpec,
};
use mirrorq::qexpansion::ExpansionTable;
use num_complex::Complex64;
use serde::Serialize;

use crate::args::{MahlerArgs, ResolvedSpec, SearchArgs, TablesArgs, VerifyArgs};
use crate::CliError;

/// A report that can be written as json, csv or text.
pub trait Render: Serialize {
    fn csv_header(&self) -> Vec<&'static str>;
    fn csv_rows(&self) -> Vec<Vec<String>>;
    fn text(&self) -> String;
}

#[derive(Debug, Serialize)]
pub struct SpecInfo {
    pub example: Option<u8>,
    pub dynkin: Option<&'static str>,
    #[serde(rename = "A")]
    pub a: i64,
    #[serde(rename = "B")]
    pub b: i64,
    pub lambda: i64,
    pub nu: u32,
    pub alpha: i64,
    pub kappa: Option<i64>,
    pub polynomial: Option<String>,
}

impl SpecInfo {
    fn new(resolved: &ResolvedSpec, spec: &RecurrenceSpec) -> Self {
        SpecInfo {
            example: resolved.example.as_ref().map(|e| e.id),
            dynkin: resolved.example.as_ref().and_then(|e| e.dynkin),
            a: spec.a,
            b: spec.b,
            lambda: spec.lambda,
            nu: spec.nu,
            alpha: spec.alpha,
            kappa: spec.kappa,
            polynomial: resolved.polynomial.clone(),
        }
    }

    fn heading(&self) -> String {
        let mut s = String::new();
        if let Some(id) = self.example {
            let _ = write!(s, "#{id} ");
            if let Some(d) = self.dynkin {
                let _ = write!(s, "({d}) ");
            }
        }
        let _ = write!(s, "(A,B,lambda)=({},{},{}) nu={} alpha={}", self.a, self.b, self.lambda, self.nu, self.alpha);
        if let Some(k) = self.kappa {
            let _ = write!(s, " kappa={k}");
        }
        if let Some(p) = &self.polynomial {
            let _ = write!(s, " P={p}");
        }
        s
    }
}

#[derive(Debug, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub a: String,
    pub b: String,
}

#[derive(Debug, Serialize)]
pub struct TablesReport {
    pub command: &'static str,
    pub spec: SpecInfo,
    pub order: usize,
    pub a_integral: bool,
    pub b_integral: bool,
    pub rows: Vec<TableRow>,
}

pub fn tables(args: &TablesArgs) -> Result<TablesReport, CliError> {
    let resolved = args.spec.resolve()?;
    let spec = resolved.require_spec()?;
    let order = args.order as usize;
    let table = ExpansionTable::compute(spec, order).map_err(|e| CliError::Failure(e.to_string()))?;
    let rows = (0..order)
        .map(|i| TableRow { n: i + 1, a: table.a.values[i].to_string(), b: table.b.values[i].to_string() })
        .collect();
    Ok(TablesReport {
        command: "tables",
        spec: SpecInfo::new(&resolved, spec),
        order,
        a_integral: table.a_integral(),
        b_integral: table.b_integral(),
        rows,
    })
}

fn is_integer_text(s: &str) -> bool {
    !s.contains('/')
}

impl Render for TablesReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["n", "a_n", "b_n", "a_integral", "b_integral"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    r.a.clone(),
                    r.b.clone(),
                    is_integer_text(&r.a).to_string(),
                    is_integer_text(&r.b).to_string(),
                ]
            })
            .collect()
    }

    fn text(&self) -> String {
        let mut s = format!("{}\n", self.spec.heading());
        let wn = self.rows.len().to_string().len().max(1);
        let wa = self.rows.iter().map(|r| r.a.len()).max().unwrap_or(0).max(3);
        let wb = self.rows.iter().map(|r| r.b.len()).max().unwrap_or(0).max(3);
        let _ = writeln!(s, "{:>wn$}  {:>wa$}  {:>wb$}", "n", "a_n", "b_n");
        for r in &self.rows {
            let _ = writeln!(s, "{:>wn$}  {:>wa$}  {:>wb$}", r.n, r.a, r.b);
        }
        let verdict = |ok: bool| if ok { "integral" } else { "NOT integral" };
        let _ = writeln!(s, "a_n: {}, b_n: {}", verdict(self.a_integral), verdict(self.b_integral));
        s
    }
}

#[derive(Debug, Serialize)]
pub struct MismatchInfo {
    pub n: usize,
    pub c_n: String,
    pub expected: String,
}

#[derive(Debug, Serialize)]
pub struct ConsistencyInfo {
    pub checked_to: usize,
    pub passed: bool,
    pub first_mismatch: Option<MismatchInfo>,
}

#[derive(Debug, Serialize)]
pub struct ResidualInfo {
    pub zero: bool,
    pub first_nonzero: Option<usize>,
}

impl From<&OdeResidual> for ResidualInfo {
    fn from(r: &OdeResidual) -> Self {
        ResidualInfo { zero: r.is_zero(), first_nonzero: r.first_nonzero() }
    }
}

#[derive(Debug, Serialize)]
pub struct OdeInfo {
    pub holomorphic: ResidualInfo,
    pub logarithmic: ResidualInfo,
}

#[derive(Debug, Serialize)]
pub struct IdentityInfo {
    pub label: String,
    pub order: usize,
    pub outcome: &'static str,
    pub detail: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub spec: SpecInfo,
    pub order: usize,
    /// `pass`, `pass-with-caveat` or `fail`.
    pub status: &'static str,
    pub first_failure: Option<String>,
    pub consistency: Option<ConsistencyInfo>,
    pub ode: OdeInfo,
    pub identities: Vec<IdentityInfo>,
}

impl VerifyReport {
    pub fn failed(&self) -> bool {
        self.status == "fail"
    }
}

pub fn verify(args: &VerifyArgs) -> Result<VerifyReport, CliError> {
    let resolved = args.spec.resolve()?;
    let spec = resolved.require_spec()?;
    let order = args.order as usize;
    let mut failures = Vec::new();

    let consistency = match &resolved.polynomial {
        Some(text) => {
            let poly = parse_poly(text).map_err(|e| CliError::Usage(e.to_string()))?;
            let report = check_consistency(&poly, spec, order);
            if let Some(m) = &report.first_mismatch {
                failures.push(format!("c_{} = {} but the recurrence gives {}", m.n, m.c_n, m.expected));
            }
            Some(ConsistencyInfo {
                checked_to: order,
                passed: report.passed(),
                first_mismatch: report.first_mismatch.map(|m| MismatchInfo {
                    n: m.n,
                    c_n: m.c_n.to_string(),
                    expected: m.expected.to_string(),
                }),
            })
        }
        None => None,
    };

    let pair = frobenius(spec, order);
    let holomorphic = ode_residual(spec, Candidate::Holomorphic(&pair.g1));
    let logarithmic = ode_residual(spec, Candidate::Logarithmic { g1: &pair.g1, h: &pair.h });
    for (name, r) in [("holomorphic", &holomorphic), ("logarithmic", &logarithmic)] {
        if let Some(k) = r.first_nonzero() {
            failures.push(format!("{name} solution leaves a residual at psi^{k}"));
        }
    }

    let mut identities = Vec::new();
    let mut caveat = false;
    if let Some(example) = &resolved.example {
        let records = identity_suite(example.id, order).map_err(|e| CliError::Failure(e.to_string()))?;
        for r in records {
            let (outcome, detail) = match &r.outcome {
                IdentityOutcome::Pass => ("pass", None),
                IdentityOutcome::Mismatch { order, lhs, rhs } => {
                    ("mismatch", Some(format!("first difference at q^{order}: {lhs} vs {rhs}")))
                }
                IdentityOutcome::Caveat(d) => ("caveat", Some(d.clone())),
                IdentityOutcome::Structural(d) => ("structural", Some(d.clone())),
            };
            if r.outcome.is_failure() {
                failures.push(format!("{}: {}", r.label, detail.clone().unwrap_or_default()));
            }
            caveat |= matches!(r.outcome, IdentityOutcome::Caveat(_));
            identities.push(IdentityInfo { label: r.label, order: r.order, outcome, detail });
        }
    }

    let status = match (failures.is_empty(), caveat) {
        (false, _) => "fail",
        (true, true) => "pass-with-caveat",
        (true, false) => "pass",
    };
    Ok(VerifyReport {
        command: "verify",
        spec: SpecInfo::new(&resolved, spec),
        order,
        status,
        first_failure: failures.into_iter().next(),
        consistency,
        ode: OdeInfo { holomorphic: (&holomorphic).into(), logarithmic: (&logarithmic).into() },
        identities,
    })
}

impl Render for VerifyReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["check", "order", "outcome", "detail"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        if let Some(c) = &self.consistency {
            let detail = c.first_mismatch.as_ref().map(|m| format!("n={} c_n={} expected={}", m.n, m.c_n, m.expected));
            rows.push(vec![
                "c_n consistency".into(),
                c.checked_to.to_string(),
                if c.passed { "pass" } else { "mismatch" }.into(),
                detail.unwrap_or_default(),
            ]);
        }
        for (name, r) in [("ode holomorphic", &self.ode.holomorphic), ("ode logarithmic", &self.ode.logarithmic)] {
            rows.push(vec![
                name.into(),
                self.order.to_string(),
                if r.zero { "pass" } else { "mismatch" }.into(),
                r.first_nonzero.map(|k| format!("residual at psi^{k}")).unwrap_or_default(),
            ]);
        }
        for i in &self.identities {
            rows.push(vec![
                i.label.clone(),
                i.order.to_string(),
                i.outcome.into(),
                i.detail.clone().unwrap_or_default(),
            ]);
        }
        rows
    }

    fn text(&self) -> String {
        let mut s = format!("{}\n", self.spec.heading());
        for row in self.csv_rows() {
            let _ = write!(s, "  [{}] {} (order {})", row[2], row[0], row[1]);
            if !row[3].is_empty() {
                let _ = write!(s, ": {}", row[3]);
            }
            s.push('\n');
        }
        let _ = writeln!(s, "status: {}", self.status);
        s
    }
}

#[derive(Debug, Serialize)]
pub struct ComplexInfo {
    pub re: String,
    pub im: String,
}

#[derive(Debug, Serialize)]
pub struct ValueInfo {
    pub value: String,
    pub error_estimate: String,
}

impl From<&MahlerValue> for ValueInfo {
    fn from(v: &MahlerValue) -> Self {
        ValueInfo { value: fmt_float(&v.value), error_estimate: fmt_short(&v.tail_bound) }
    }
}

#[derive(Debug, Serialize)]
pub struct QuadratureInfo {
    pub value: String,
    pub grid_size: usize,
    pub min_abs_f: String,
}

#[derive(Debug, Serialize)]
pub struct Differences {
    pub series_quadrature: Option<String>,
    pub series_big_q: Option<String>,
    pub quadrature_big_q: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct MahlerReport {
    pub command: &'static str,
    pub example: Option<u8>,
    pub polynomial: String,
    pub t: ComplexInfo,
    pub precision: u32,
    pub order: usize,
    pub bound: String,
    pub domain_certified: bool,
    pub series: Option<ValueInfo>,
    pub quadrature: QuadratureInfo,
    pub nu: Option<u32>,
    pub big_q: Option<ValueInfo>,
    pub differences: Differences,
    pub warnings: Vec<String>,
}

fn parse_t(text: &str) -> Result<Complex64, CliError> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let t: Complex64 =
        cleaned.parse().map_err(|_| CliError::Usage(format!("-t: cannot parse '{text}' as a number")))?;
    if !t.re.is_finite() || !t.im.is_finite() {
        return Err(CliError::Usage(format!("-t: '{text}' is not finite")));
    }
    Ok(t)
}

fn mahler_failure(e: MahlerError) -> CliError {
    CliError::Failure(e.to_string())
}

pub fn mahler(args: &MahlerArgs, precision: u32) -> Result<MahlerReport, CliError> {
    let resolved = args.spec.resolve()?;
    let text = resolved.polynomial.clone().ok_or_else(|| CliError::Usage("mahler needs --example or --poly".into()))?;
    let poly = parse_poly(&text).map_err(|e| CliError::Usage(e.to_string()))?;
    let t = parse_t(&args.t)?;
    let order = args.order as usize;
    let grid = args.grid as usize;
    let tc = CFloat::new(t.re, t.im, precision);
    let bound = torus_sup_bound(&poly);

    let mut warnings = Vec::new();
    let mut nu = None;
    let mut big_q = None;
    let mut differences = Differences { series_quadrature: None, series_big_q: None, quadrature_big_q: None };

    let triple_ready = resolved.example.is_some() && t.im == 0.0 && tc.re > bound;
    let report = if let (true, Some(example)) = (triple_ready, &resolved.example) {
        let triple = mahler::mahler_vs_big_q(example.id, &tc.re, order, grid).map_err(mahler_failure)?;
        nu = Some(triple.nu);
        big_q = Some(ValueInfo::from(&triple.big_q));
        differences.series_big_q = triple.series_vs_big_q.as_ref().map(fmt_short);
        differences.quadrature_big_q = Some(fmt_short(&triple.quadrature_vs_big_q));
        triple.report
    } else {
        if resolved.example.is_some() {
            warnings.push(format!("Q route skipped: it needs real t above the torus bound {bound}"));
        }
        mahler::quadrature_report(&poly, &tc, order, grid).map_err(mahler_failure)?
    };
    differences.series_quadrature = report.abs_difference.as_ref().map(fmt_short);
    warnings.splice(0..0, report.warnings.iter().cloned());

    Ok(MahlerReport {
        command: "mahler",
        example: resolved.example.as_ref().map(|e| e.id),
        polynomial: text,
        t: ComplexInfo { re: fmt_float(&tc.re), im: fmt_float(&tc.im) },
        precision,
        order,
        bound: bound.to_string(),
        domain_certified: report.domain_certified,
        series: report.series.as_ref().map(ValueInfo::from),
        quadrature: QuadratureInfo {
            value: fmt_float(&report.quadrature.value),
            grid_size: report.quadrature.grid_size,
            min_abs_f: fmt_short(&report.quadrature.min_abs),
        },
        nu,
        big_q,
        differences,
        warnings,
    })
}

impl Render for MahlerReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["quantity", "value", "error_estimate"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        if let Some(s) = &self.series {
            rows.push(vec!["series".into(), s.value.clone(), s.error_estimate.clone()]);
        }
        rows.push(vec!["quadrature".into(), self.quadrature.value.clone(), String::new()]);
        if let Some(q) = &self.big_q {
            rows.push(vec!["big_q".into(), q.value.clone(), q.error_estimate.clone()]);
        }
        let d = &self.differences;
        for (name, v) in [
            ("|series - quadrature|", &d.series_quadrature),
            ("|series - big_q|", &d.series_big_q),
            ("|quadrature - big_q|", &d.quadrature_big_q),
        ] {
            if let Some(v) = v {
                rows.push(vec![name.into(), v.clone(), String::new()]);
            }
        }
        rows
    }

    fn text(&self) -> String {
        let mut s = String::new();
        if let Some(id) = self.example {
            let _ = write!(s, "#{id} ");
        }
        let im = self.t.im.parse::<f64>().unwrap_or(0.0);
        let t = if im == 0.0 {
            self.t.re.clone()
        } else {
            format!("{} {} {}i", self.t.re, if im < 0.0 { '-' } else { '+' }, self.t.im.trim_start_matches('-'))
        };
        let _ = writeln!(s, "P={} t={}  (bound {}, {} bits)", self.polynomial, t, self.bound, self.precision);
        for row in self.csv_rows() {
            let _ = write!(s, "  {:<24}{}", row[0], row[1]);
            if !row[2].is_empty() {
                let _ = write!(s, "  (error estimate {})", row[2]);
            }
            s.push('\n');
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}

#[derive(Debug, Serialize)]
pub struct SearchReport {
    pub command: &'static str,
    pub a_range: [i64; 2],
    pub b_range: [i64; 2],
    pub lambda_range: [i64; 2],
    pub order: usize,
    pub triples: Vec<[i64; 3]>,
}

pub fn search(args: &SearchArgs) -> SearchReport {
    let order = args.order as usize;
    let triples = search_triples(args.a_range.clone(), args.b_range.clone(), args.lambda_range.clone(), order)
        .into_iter()
        .map(|(a, b, l)| [a, b, l])
        .collect();
    let bounds = |r: &std::ops::RangeInclusive<i64>| [*r.start(), *r.end()];
    SearchReport {
        command: "search",
        a_range: bounds(&args.a_range),
        b_range: bounds(&args.b_range),
        lambda_range: bounds(&args.lambda_range),
        order,
        triples,
    }
}

impl Render for SearchReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["A", "B", "lambda"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.triples.iter().map(|t| t.iter().map(|v| v.to_string()).collect()).collect()
    }

    fn text(&self) -> String {
        let mut s = format!("{} integral triples (u_m integral for m <= {})\n", self.triples.len(), self.order);
        for [a, b, l] in &self.triples {
            let _ = writeln!(s, "({a}, {b}, {l})");
        }
        s
    }
}
