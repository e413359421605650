//! Laurent polynomials in `X, Y, Z` and the diagonal coefficients of their powers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rug::{Integer, Rational};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable '{name}' at position {position} (expected X, Y or Z)")]
    UnknownVariable { name: String, position: usize },
}

pub const VARIABLE_NAMES: [char; 3] = ['X', 'Y', 'Z'];

/// A finite sum of monomials `c * X^a Y^b Z^c` with integer (possibly
/// negative) exponents. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, Rational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(c: Rational, nvars: usize) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exponents: Vec<i32>, c: Rational) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    pub fn variable(index: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self::monomial(e, Rational::from(1))
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<i32>, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[i32]) -> Rational {
        self.terms.get(exponents).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, exponents: Vec<i32>, c: Rational) {
        if c.cmp0().is_eq() {
            return;
        }
        match self.terms.get_mut(&exponents) {
            Some(existing) => {
                *existing += c;
                if existing.cmp0().is_eq() {
                    self.terms.remove(&exponents);
                }
            }
            None => {
                self.terms.insert(exponents, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), Rational::from(-c))).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, Rational::from(ca * cb));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(Rational::from(1), self.nvars);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// The single monomial this polynomial consists of, if it is one.
    pub fn as_monomial(&self) -> Option<(&[i32], &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (e.as_slice(), c))
        } else {
            None
        }
    }

    /// Multiplies every exponent vector by the monomial `x^shift`.
    pub fn shift(&self, shift: &[i32]) -> Self {
        assert_eq!(shift.len(), self.nvars);
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Drops the last variable by setting it to 1 (`P(x, y, 1)`).
    pub fn set_last_to_one(&self) -> Self {
        assert!(self.nvars >= 1);
        let mut out = Self::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            out.add_term(e[..self.nvars - 1].to_vec(), c.clone());
        }
        out
    }

    /// The Laurent polynomial `P / (product of all variables)`; its constant
    /// term of the n-th power is the diagonal coefficient of `P^n`.
    pub fn divided_by_all_variables(&self) -> Self {
        self.shift(&vec![-1; self.nvars])
    }

    /// The two-variable integrand `P(x, y, 1) / (x y)` whose torus average
    /// defines the Mahler measure of `t - P(x, y, 1)/(x y)`.
    pub fn torus_form(&self) -> Self {
        let two = if self.nvars == 3 { self.set_last_to_one() } else { self.clone() };
        two.divided_by_all_variables()
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<char> = if self.nvars <= 3 {
            VARIABLE_NAMES[..self.nvars].to_vec()
        } else {
            (0..self.nvars).map(|i| char::from(b'a' + i as u8)).collect()
        };
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let negative = c.cmp0().is_lt();
            let abs = Rational::from(c.abs_ref());
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            first = false;
            let is_const = e.iter().all(|&x| x == 0);
            let mut parts: Vec<String> = Vec::new();
            if abs != 1 || is_const {
                parts.push(abs.to_string());
            }
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => parts.push(names[i].to_string()),
                    _ => parts.push(format!("{}^{}", names[i], x)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Constant term of `l^n`, expanding factor by factor and discarding partial
/// monomials from which the zero exponent vector is no longer reachable.
pub fn constant_term_of_power(l: &LaurentPoly, n: u32) -> Rational {
    expand_constant_terms(l, n, true).pop().unwrap_or_default()
}

/// `[CT(l^0), ..., CT(l^N)]` in a single expansion.
pub fn constant_terms_of_powers(l: &LaurentPoly, order: u32) -> Vec<Rational> {
    expand_constant_terms(l, order, false)
}

/// Expands `l^n` step by step over integers (after clearing denominators).
/// With `exact`, only states that can return to the origin in exactly the
/// remaining steps are kept and only the last entry is meaningful; otherwise
/// states that can return within the remaining steps are kept and entry `k`
/// is the constant term of `l^k`.
fn expand_constant_terms(l: &LaurentPoly, n: u32, exact: bool) -> Vec<Rational> {
    let zero_tail = |from: u32, out: &mut Vec<Rational>| out.extend((from..=n).map(|_| Rational::new()));
    let mut out = vec![Rational::from(1)];
    if n == 0 {
        return out;
    }
    if l.is_empty() {
        zero_tail(1, &mut out);
        return out;
    }
    let nv = l.nvars;
    let mut lo = vec![i32::MAX; nv];
    let mut hi = vec![i32::MIN; nv];
    for e in l.terms.keys() {
        for v in 0..nv {
            lo[v] = lo[v].min(e[v]);
            hi[v] = hi[v].max(e[v]);
        }
    }
    // No term can move some exponent towards zero: only a zero diagonal.
    if (0..nv).any(|v| lo[v] > 0 || hi[v] < 0) {
        zero_tail(1, &mut out);
        return out;
    }

    let denom = l.terms.values().fold(Integer::from(1), |acc, c| acc.lcm(c.denom()));
    let terms: Vec<(&Vec<i32>, Integer)> =
        l.terms.iter().map(|(e, c)| (e, c.numer() * Integer::from(&denom / c.denom()))).collect();

    // Fewest further steps that bring `e` back to the origin, per variable.
    let steps_needed = |e: &[i32]| -> i64 {
        (0..nv)
            .map(|v| {
                let x = e[v] as i64;
                match x.cmp(&0) {
                    std::cmp::Ordering::Greater => (x + (-lo[v] as i64) - 1) / (-lo[v] as i64).max(1),
                    std::cmp::Ordering::Less => (-x + hi[v] as i64 - 1) / (hi[v] as i64).max(1),
                    std::cmp::Ordering::Equal => 0,
                }
            })
            .max()
            .unwrap_or(0)
    };
    let keep = |e: &[i32], remaining: i64| {
        if exact {
            (0..nv).all(|v| {
                let x = e[v] as i64;
                x + remaining * lo[v] as i64 <= 0 && x + remaining * hi[v] as i64 >= 0
            })
        } else {
            steps_needed(e) <= remaining
        }
    };

    let origin = vec![0; nv];
    let mut current: HashMap<Vec<i32>, Integer> = HashMap::new();
    current.insert(origin.clone(), Integer::from(1));
    let mut scale = Integer::from(1);
    for step in 1..=n {
        let remaining = (n - step) as i64;
        let mut next: HashMap<Vec<i32>, Integer> = HashMap::with_capacity(current.len() * terms.len());
        for (e, c) in &current {
            for (te, tc) in &terms {
                let ne: Vec<i32> = e.iter().zip(te.iter()).map(|(a, b)| a + b).collect();
                if !keep(&ne, remaining) {
                    continue;
                }
                let prod = Integer::from(c * tc);
                match next.get_mut(&ne) {
                    Some(acc) => *acc += prod,
                    None => {
                        next.insert(ne, prod);
                    }
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        current = next;
        scale *= &denom;
        if current.is_empty() {
            zero_tail(step, &mut out);
            return out;
        }
        let ct = current.get(&origin).map(|c| Rational::from((c.clone(), scale.clone()))).unwrap_or_default();
        out.push(ct);
    }
    out
}

/// `c_n`: the coefficient of `X^n Y^n Z^n` in `P^n` (for a two-variable
/// polynomial, of `X^n Y^n`).
pub fn power_coefficient(p: &LaurentPoly, n: u32) -> Rational {
    constant_term_of_power(&p.divided_by_all_variables(), n)
}

/// `[c_0, ..., c_N]`.
pub fn cn_sequence(p: &LaurentPoly, order: u32) -> Vec<Rational> {
    constant_terms_of_powers(&p.divided_by_all_variables(), order)
}

/// Sum of absolute values of the coefficients of `P(x, y, 1)/(x y)`: an upper
/// bound for its modulus on the unit torus.
pub fn torus_sup_bound(p: &LaurentPoly) -> Rational {
    p.torus_form().terms.values().fold(Rational::new(), |acc, c| acc + Rational::from(c.abs_ref()))
}

/// Parses expressions such as `(X+Y)(XY+Z^2)` or `x^2 - 3*y^-1*z`.
///
/// Variables are `X`, `Y`, `Z` in either case; coefficients are integers;
/// exponents are integers and may be negative on monomials.
pub fn parse_poly(text: &str) -> Result<LaurentPoly, LaurentError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let poly = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(parser.syntax(tok.position, format!("unexpected '{}'", tok.kind)));
    }
    Ok(poly)
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(Integer),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Number(n) => write!(f, "{n}"),
            TokenKind::Var(i) => write!(f, "{}", VARIABLE_NAMES[*i]),
            TokenKind::Plus => write!(f, "+"),
            TokenKind::Minus => write!(f, "-"),
            TokenKind::Star => write!(f, "*"),
            TokenKind::Caret => write!(f, "^"),
            TokenKind::LParen => write!(f, "("),
            TokenKind::RParen => write!(f, ")"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    position: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, LaurentError> {
    let mut tokens = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        let kind = match ch {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '^' => TokenKind::Caret,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|(_, c)| c).collect();
                let value = Integer::from_str_radix(&digits, 10).expect("ascii digits");
                tokens.push(Token { kind: TokenKind::Number(value), position: pos });
                continue;
            }
            c if c.is_alphabetic() => {
                let index = match c.to_ascii_uppercase() {
                    'X' => 0,
                    'Y' => 1,
                    'Z' => 2,
                    _ => {
                        let mut j = i;
                        while j < chars.len() && chars[j].1.is_alphanumeric() {
                            j += 1;
                        }
                        let name: String = chars[i..j].iter().map(|(_, c)| c).collect();
                        return Err(LaurentError::UnknownVariable { name, position: pos });
                    }
                };
                TokenKind::Var(index)
            }
            c => {
                return Err(LaurentError::Syntax { position: pos, message: format!("unexpected character '{c}'") });
            }
        };
        tokens.push(Token { kind, position: pos });
        i += 1;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.position)
    }

    fn syntax(&self, position: usize, message: impl Into<String>) -> LaurentError {
        LaurentError::Syntax { position, message: message.into() }
    }

    fn expr(&mut self) -> Result<LaurentPoly, LaurentError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokenKind::Plus) => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Some(TokenKind::Minus) => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPoly, LaurentError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokenKind::Star) => {
                    self.next();
                    acc = acc.mul(&self.factor()?);
                }
                // juxtaposition
                Some(TokenKind::Number(_)) | Some(TokenKind::Var(_)) | Some(TokenKind::LParen) => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<LaurentPoly, LaurentError> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Minus) => {
                self.next();
                Ok(self.factor()?.neg())
            }
            Some(TokenKind::Plus) => {
                self.next();
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<LaurentPoly, LaurentError> {
        let base = self.atom()?;
        if !matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Caret)) {
            return Ok(base);
        }
        let caret_pos = self.here();
        self.next();
        let exponent = self.exponent()?;
        if exponent >= 0 {
            return Ok(base.pow(exponent as u32));
        }
        match base.as_monomial() {
            Some((e, c)) => {
                let k = (-exponent) as u32;
                let inv = Rational::from(c.recip_ref());
                let coeff = Rational::from(rug::ops::Pow::pow(&inv, k));
                Ok(LaurentPoly::monomial(e.iter().map(|x| x * exponent).collect(), coeff))
            }
            None => Err(self.syntax(caret_pos, "negative power of a non-monomial is not a Laurent polynomial")),
        }
    }

    fn exponent(&mut self) -> Result<i32, LaurentError> {
        let pos = self.here();
        let parenthesized = matches!(self.peek().map(|t| &t.kind), Some(TokenKind::LParen));
        if parenthesized {
            self.next();
        }
        let mut sign = 1i32;
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokenKind::Minus) => {
                    sign = -sign;
                    self.next();
                }
                Some(TokenKind::Plus) => {
                    self.next();
                }
                _ => break,
            }
        }
        let value = match self.next() {
            Some(Token { kind: TokenKind::Number(n), position }) => {
                n.to_i32().ok_or_else(|| self.syntax(position, "exponent out of range"))?
            }
            Some(t) => return Err(self.syntax(t.position, "expected an integer exponent")),
            None => return Err(self.syntax(pos, "expected an integer exponent")),
        };
        if parenthesized {
            match self.next() {
                Some(Token { kind: TokenKind::RParen, .. }) => {}
                Some(t) => return Err(self.syntax(t.position, "expected ')'")),
                None => return Err(self.syntax(self.end, "expected ')'")),
            }
        }
        Ok(sign * value)
    }

    fn atom(&mut self) -> Result<LaurentPoly, LaurentError> {
        let pos = self.here();
        match self.next() {
            Some(Token { kind: TokenKind::Number(n), .. }) => Ok(LaurentPoly::constant(Rational::from(n), 3)),
            Some(Token { kind: TokenKind::Var(i), .. }) => Ok(LaurentPoly::variable(i, 3)),
            Some(Token { kind: TokenKind::LParen, .. }) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token { kind: TokenKind::RParen, .. }) => Ok(inner),
                    Some(t) => Err(self.syntax(t.position, format!("expected ')', found '{}'", t.kind))),
                    None => Err(self.syntax(self.end, "expected ')' before end of input")),
                }
            }
            Some(t) => Err(self.syntax(t.position, format!("unexpected '{}'", t.kind))),
            None => Err(self.syntax(pos, "unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn parses_table_polynomials() {
        let p = parse_poly("(X+Y)(Y+Z)(Z+X)").unwrap();
        let expected = parse_poly("X^2 Y + X^2 Z + X Y^2 + X Z^2 + Y^2 Z + Y Z^2 + 2 X Y Z").unwrap();
        assert_eq!(p, expected);
        assert_eq!(p.len(), 7);
        assert_eq!(p.coefficient(&[1, 1, 1]), r(2));

        assert_eq!(parse_poly("X^2+Y^3+Z^6").unwrap().len(), 3);
        assert!(parse_poly("X - X").unwrap().is_empty());
        assert_eq!(parse_poly("x*y").unwrap(), parse_poly("X Y").unwrap());
    }

    #[test]
    fn parses_signs_and_negative_exponents() {
        let p = parse_poly("-X^2 + 3x^-1 y^(-2) - (2)").unwrap();
        assert_eq!(p.coefficient(&[2, 0, 0]), r(-1));
        assert_eq!(p.coefficient(&[-1, -2, 0]), r(3));
        assert_eq!(p.coefficient(&[0, 0, 0]), r(-2));
        let q = parse_poly("(2X)^-2").unwrap();
        assert_eq!(q.coefficient(&[-2, 0, 0]), Rational::from((1, 4)));
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(parse_poly("X + W"), Err(LaurentError::UnknownVariable { name: "W".into(), position: 4 }));
        match parse_poly("(X + Y") {
            Err(LaurentError::Syntax { position, .. }) => assert_eq!(position, 6),
            other => panic!("unexpected {other:?}"),
        }
        match parse_poly("X + * Y") {
            Err(LaurentError::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_poly("(X+Y)^-1"), Err(LaurentError::Syntax { .. })));
        assert!(matches!(parse_poly("X^"), Err(LaurentError::Syntax { .. })));
        assert!(matches!(parse_poly("X $"), Err(LaurentError::Syntax { position: 2, .. })));
    }

    #[test]
    fn power_coefficient_examples() {
        let p = parse_poly("X^2Y+Y^2Z+Z^2X").unwrap();
        assert_eq!(power_coefficient(&p, 3), r(6));
        assert_eq!(power_coefficient(&p, 0), r(1));
        assert_eq!(power_coefficient(&p, 1), r(0));
        assert_eq!(power_coefficient(&parse_poly("X+Y").unwrap(), 0), r(1));
    }

    #[test]
    fn cn_sequence_examples() {
        let franel = parse_poly("(X+Y)(Y+Z)(Z+X)").unwrap();
        assert_eq!(cn_sequence(&franel, 3), vec![r(1), r(2), r(10), r(56)]);

        let e8 = parse_poly("X^2+Y^3+Z^6").unwrap();
        assert_eq!(cn_sequence(&e8, 6), vec![r(1), r(0), r(0), r(0), r(0), r(0), r(60)]);

        let apery = parse_poly("(X+Y+Z)(X+Z)(Y+Z)").unwrap();
        assert_eq!(cn_sequence(&apery, 2), vec![r(1), r(3), r(19)]);
    }

    #[test]
    fn pruned_expansion_matches_full_expansion() {
        let p = parse_poly("(X+Y)(XY+Z^2) + 3X^2Z - Y").unwrap();
        let l = p.divided_by_all_variables();
        for n in 0..7 {
            let full = l.pow(n).coefficient(&[0, 0, 0]);
            assert_eq!(constant_term_of_power(&l, n), full, "n = {n}");
        }
    }

    #[test]
    fn torus_bound_examples() {
        assert_eq!(torus_sup_bound(&parse_poly("(X+Y)(Y+Z)(Z+X)").unwrap()), r(8));
        assert_eq!(torus_sup_bound(&parse_poly("X^2Y+Y^2Z+Z^2X").unwrap()), r(3));
        assert_eq!(torus_sup_bound(&parse_poly("-7 X^2 Y Z").unwrap()), r(7));
    }

    #[test]
    fn torus_form_of_monomial() {
        let p = parse_poly("X^2*Y*Z").unwrap();
        assert_eq!(p.torus_form(), LaurentPoly::monomial(vec![1, 0], r(1)));
    }

    #[test]
    fn display_round_trips_through_parser() {
        for text in ["(X+Y)(Y+Z)(Z+X)", "X^2 - 3 X^-1 Y + 5", "(X+Y+Z)(X+Z)(Y+Z)"] {
            let p = parse_poly(text).unwrap();
            assert_eq!(parse_poly(&p.to_string()).unwrap(), p, "{p}");
        }
    }
}
