use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mirrorq::picard_fuchs::RecurrenceSpec;
use mirrorq::registry::{self, Example};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "mirrorq", version, about = "Mirror maps, instanton numbers and Mahler measures of elliptic pencils")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Mantissa bits for the floating-point Mahler routes.
    #[arg(long, global = true, env = "MIRRORQ_PRECISION", default_value_t = mirrorq::mahler::DEFAULT_PRECISION,
          value_parser = clap::value_parser!(u32).range(16..=65536))]
    pub precision: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a_n and b_n with integrality flags.
    Tables(TablesArgs),
    /// Run the consistency, differential-equation and identity checks.
    Verify(VerifyArgs),
    /// Compare the Mahler measure routes at a value of t.
    Mahler(MahlerArgs),
    /// List triples (A, B, lambda) whose recurrence stays integral.
    Search(SearchArgs),
}

/// Either a registry example or an explicit recurrence / polynomial.
#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// Registry example: 1-6, #1-#6, or E8, E7, E6, E5.
    #[arg(long, short = 'e')]
    pub example: Option<String>,
    #[arg(short = 'A')]
    pub a: Option<i64>,
    #[arg(short = 'B')]
    pub b: Option<i64>,
    #[arg(short = 'L', long = "lambda")]
    pub lambda: Option<i64>,
    /// psi = t^-nu (default 1).
    #[arg(long)]
    pub nu: Option<u32>,
    /// Leading coefficient of Q, +1 or -1 (default -1).
    #[arg(long)]
    pub alpha: Option<i64>,
    /// Normalisation of the instanton expansion.
    #[arg(long)]
    pub kappa: Option<i64>,
    /// Laurent polynomial in X, Y, Z, e.g. "(X+Y)(Y+Z)(Z+X)".
    #[arg(long)]
    pub poly: Option<String>,
}

/// What a [`SpecArgs`] resolved to.
#[derive(Debug, Clone)]
pub struct ResolvedSpec {
    pub example: Option<Example>,
    pub spec: Option<RecurrenceSpec>,
    pub polynomial: Option<String>,
}

impl SpecArgs {
    fn has_explicit(&self) -> bool {
        self.a.is_some()
            || self.b.is_some()
            || self.lambda.is_some()
            || self.nu.is_some()
            || self.alpha.is_some()
            || self.kappa.is_some()
            || self.poly.is_some()
    }

    pub fn resolve(&self) -> Result<ResolvedSpec, CliError> {
        if let Some(name) = &self.example {
            if self.has_explicit() {
                return Err(CliError::Usage("--example cannot be combined with an explicit spec".into()));
            }
            let example = registry::lookup(name).map_err(|e| CliError::Usage(e.to_string()))?;
            return Ok(ResolvedSpec {
                spec: Some(example.spec.clone()),
                polynomial: Some(example.polynomial.to_string()),
                example: Some(example),
            });
        }
        if !self.has_explicit() {
            return Err(CliError::Usage("give --example or an explicit spec (-A, -B, -L and/or --poly)".into()));
        }
        if let Some(text) = &self.poly {
            mirrorq::laurent::parse_poly(text).map_err(|e| CliError::Usage(format!("--poly: {e}")))?;
        }
        let spec = match (self.a, self.b, self.lambda) {
            (Some(a), Some(b), Some(l)) => {
                let nu = self.nu.unwrap_or(1);
                if nu == 0 {
                    return Err(CliError::Usage("--nu must be positive".into()));
                }
                let alpha = self.alpha.unwrap_or(-1);
                if alpha != 1 && alpha != -1 {
                    return Err(CliError::Usage("--alpha must be 1 or -1".into()));
                }
                let mut spec = RecurrenceSpec::new(a, b, l).with_nu(nu).with_alpha(alpha).with_kappa(self.kappa);
                if let Some(p) = &self.poly {
                    spec = spec.with_polynomial(p.clone());
                }
                Some(spec)
            }
            (None, None, None) => None,
            _ => return Err(CliError::Usage("-A, -B and -L must be given together".into())),
        };
        Ok(ResolvedSpec { example: None, spec, polynomial: self.poly.clone() })
    }
}

impl ResolvedSpec {
    pub fn require_spec(&self) -> Result<&RecurrenceSpec, CliError> {
        self.spec.as_ref().ok_or_else(|| CliError::Usage("this command needs -A, -B and -L (or --example)".into()))
    }
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Number of coefficients.
    #[arg(short = 'N', long = "order", default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub order: u32,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Order to which the series identities are checked.
    #[arg(short = 'N', long = "order", default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    pub order: u32,
}

#[derive(Debug, Args)]
pub struct MahlerArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// The parameter t, real or complex (e.g. 100, 3+4i).
    #[arg(short = 't')]
    pub t: String,
    /// Terms of the constant-term and Q series.
    #[arg(short = 'N', long = "order", default_value_t = mirrorq::mahler::DEFAULT_ORDER as u32,
          value_parser = clap::value_parser!(u32).range(1..))]
    pub order: u32,
    /// Quadrature grid size per torus direction.
    #[arg(short = 'M', long = "grid", default_value_t = mirrorq::mahler::DEFAULT_GRID as u32,
          value_parser = clap::value_parser!(u32).range(1..))]
    pub grid: u32,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Range for A, as LO..HI (inclusive) or a single value.
    #[arg(long = "a-range", value_parser = parse_range, allow_hyphen_values = true)]
    pub a_range: RangeInclusive<i64>,
    /// Range for B.
    #[arg(long = "b-range", value_parser = parse_range, allow_hyphen_values = true)]
    pub b_range: RangeInclusive<i64>,
    /// Range for lambda.
    #[arg(long = "lambda-range", value_parser = parse_range, allow_hyphen_values = true)]
    pub lambda_range: RangeInclusive<i64>,
    /// Require u_0..u_M to be integers.
    #[arg(short = 'M', long = "order", default_value_t = 30)]
    pub order: u32,
}

pub fn parse_range(text: &str) -> Result<RangeInclusive<i64>, String> {
    let parse = |s: &str| s.trim().parse::<i64>().map_err(|e| format!("'{s}': {e}"));
    let sep = text.find("..").map(|i| (i, 2)).or_else(|| text.get(1..)?.find(':').map(|i| (i + 1, 1)));
    match sep {
        Some((i, width)) => {
            let hi = text[i + width..].trim_start_matches('=');
            Ok(parse(&text[..i])?..=parse(hi)?)
        }
        None => {
            let v = parse(text)?;
            Ok(v..=v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..30").unwrap(), 0..=30);
        assert_eq!(parse_range("-10..=0").unwrap(), -10..=0);
        assert_eq!(parse_range("-10:-2").unwrap(), -10..=-2);
        assert_eq!(parse_range("7").unwrap(), 7..=7);
        assert!(parse_range("a..b").is_err());
        assert!(parse_range("").is_err());
    }
}
