//! The six built-in elliptic pencils.

use thiserror::Error;

use crate::laurent::{parse_poly, LaurentPoly};
use crate::picard_fuchs::RecurrenceSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown example '{0}' (expected 1-6, #1-#6 or E8, E7, E6, E5)")]
pub struct UnknownExample(pub String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub id: u8,
    /// Dynkin label of the matching instanton example, for #1-#4.
    pub dynkin: Option<&'static str>,
    pub polynomial: &'static str,
    pub spec: RecurrenceSpec,
}

impl Example {
    pub fn poly(&self) -> LaurentPoly {
        parse_poly(self.polynomial).expect("registry polynomials parse")
    }
}

/// id, Dynkin label, polynomial, (A, B, lambda), nu, kappa
type Row = (u8, Option<&'static str>, &'static str, (i64, i64, i64), u32, Option<i64>);

const TABLE: [Row; 6] = [
    (1, Some("E8"), "X^2+Y^3+Z^6", (432, 0, 60), 6, Some(-1)),
    (2, Some("E7"), "X^2+Y^4+Z^4", (64, 0, 12), 4, Some(-2)),
    (3, Some("E6"), "X^2Y+Y^2Z+Z^2X", (27, 0, 6), 3, Some(-3)),
    (4, Some("E5"), "(X+Y)(XY+Z^2)", (16, 0, 4), 2, Some(-4)),
    (5, None, "(X+Y+Z)(X+Z)(Y+Z)", (11, -1, 3), 1, None),
    (6, None, "(X+Y)(Y+Z)(Z+X)", (7, -8, 2), 1, None),
];

pub fn examples() -> Vec<Example> {
    TABLE
        .iter()
        .map(|&(id, dynkin, polynomial, (a, b, lambda), nu, kappa)| Example {
            id,
            dynkin,
            polynomial,
            spec: RecurrenceSpec::new(a, b, lambda)
                .with_nu(nu)
                .with_alpha(-1)
                .with_kappa(kappa)
                .with_polynomial(polynomial),
        })
        .collect()
}

pub fn example(id: u8) -> Option<Example> {
    examples().into_iter().find(|e| e.id == id)
}

/// Accepts `3`, `#3` and Dynkin aliases such as `E6` (case-insensitive).
pub fn lookup(name: &str) -> Result<Example, UnknownExample> {
    let key = name.trim().trim_start_matches('#').to_ascii_uppercase();
    examples()
        .into_iter()
        .find(|e| key == e.id.to_string() || e.dynkin == Some(key.as_str()))
        .ok_or_else(|| UnknownExample(name.to_string()))
}

/// Example #4's triple with `alpha = +1`, which gives the conifold numbers.
pub fn conifold() -> RecurrenceSpec {
    RecurrenceSpec::new(16, 0, 4).with_nu(2).with_alpha(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_accepts_aliases() {
        assert_eq!(lookup("3").unwrap().id, 3);
        assert_eq!(lookup("#6").unwrap().id, 6);
        assert_eq!(lookup("e8").unwrap().id, 1);
        assert_eq!(lookup("E5").unwrap().id, 4);
        assert!(lookup("7").is_err());
        assert!(lookup("E9").is_err());
    }

    #[test]
    fn registry_matches_tables() {
        let all = examples();
        assert_eq!(all.len(), 6);
        assert_eq!(
            all.iter().map(|e| e.spec.kappa).collect::<Vec<_>>(),
            [Some(-1), Some(-2), Some(-3), Some(-4), None, None]
        );
        assert_eq!(all.iter().map(|e| e.spec.nu).collect::<Vec<_>>(), [6, 4, 3, 2, 1, 1]);
        assert!(all.iter().all(|e| e.spec.alpha == -1));
        for e in &all {
            assert!(!e.poly().is_empty());
        }
    }
}
