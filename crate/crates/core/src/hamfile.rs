//! The `.ham` text format.
//!
//! ```text
//! # three-spin XOR, hbar = dt = 1
//! spins A B C
//! sqrt(2)*pi/4  zA yB
//! sqrt(2)*pi/4  zB yC
//! -pi/4         yB xC
//! ```
//!
//! An optional `spins` header names the sites and must precede every term;
//! without it the sites are `A B C`. Each term line is a constant coefficient
//! expression followed by one or more factors `x<site>`, `y<site>` or
//! `z<site>`. `#` starts a comment. Coefficients use
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-'? atom
//! atom  := number | 'pi' | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::pauli::{Hamiltonian, PauliError, PauliLabel, PauliTerm, SpinSystem};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    BadNumber(String),
    DivisionByZero,
    NegativeSqrt,
    NonFinite,
    UnknownSite(String),
    DuplicateSite(String),
    DuplicateSiteName(String),
    MissingFactors,
    BadFactor(String),
    HeaderAfterTerms,
    DuplicateHeader,
    EmptyHeader,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        match self {
            UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            UnexpectedToken { found, expected } => write!(f, "expected {expected}, found {found}"),
            BadNumber(s) => write!(f, "malformed number `{s}`"),
            DivisionByZero => write!(f, "division by zero"),
            NegativeSqrt => write!(f, "square root of a negative value"),
            NonFinite => write!(f, "coefficient is not finite"),
            UnknownSite(s) => write!(f, "unknown site `{s}`"),
            DuplicateSite(s) => write!(f, "site `{s}` appears twice in one term"),
            DuplicateSiteName(s) => write!(f, "site name `{s}` declared twice"),
            MissingFactors => write!(f, "term has no Pauli factors"),
            BadFactor(s) => write!(
                f,
                "`{s}` is not a factor (expected x, y or z followed by a site name)"
            ),
            HeaderAfterTerms => write!(f, "`spins` header must precede all terms"),
            DuplicateHeader => write!(f, "`spins` header given twice"),
            EmptyHeader => write!(f, "`spins` header names no sites"),
        }
    }
}

/// Parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

pub type ParseResult<T> = Result<T, ParseError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourcePos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamFileDocument {
    pub system: SpinSystem,
    pub terms: Vec<PauliTerm>,
    /// Start of each term's line, parallel to `terms`.
    pub positions: Vec<SourcePos>,
}

impl HamFileDocument {
    pub fn from_hamiltonian(h: &Hamiltonian) -> Self {
        HamFileDocument {
            system: h.system().clone(),
            terms: h.terms().to_vec(),
            positions: Vec::new(),
        }
    }

    pub fn to_hamiltonian(&self) -> Result<Hamiltonian, PauliError> {
        Hamiltonian::new(self.system.clone(), self.terms.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Number(x) => write!(f, "number {x}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::End => write!(f, "end of line"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

fn tokenize(text: &str, line: usize) -> ParseResult<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let err = |column: usize, kind| ParseError { line, column, kind };
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            tokens.push(Token { tok, column });
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let value: f64 = s
                .parse()
                .map_err(|_| err(column, ParseErrorKind::BadNumber(s.clone())))?;
            tokens.push(Token {
                tok: Tok::Number(value),
                column,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            tokens.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                column,
            });
        } else {
            return Err(err(column, ParseErrorKind::UnexpectedChar(c)));
        }
    }
    tokens.push(Token {
        tok: Tok::End,
        column: chars.len() + 1,
    });
    Ok(tokens)
}

/// Single-token-lookahead evaluator over one line's tokens.
struct ExprParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column,
            kind,
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> ParseResult<()> {
        let t = self.bump().clone();
        if t.tok == tok {
            Ok(())
        } else {
            Err(self.error(
                t.column,
                ParseErrorKind::UnexpectedToken {
                    found: t.tok.to_string(),
                    expected,
                },
            ))
        }
    }

    fn expr(&mut self) -> ParseResult<f64> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc += self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> ParseResult<f64> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    acc *= self.unary()?;
                }
                Tok::Slash => {
                    let column = self.bump().column;
                    let divisor = self.unary()?;
                    if divisor == 0.0 {
                        return Err(self.error(column, ParseErrorKind::DivisionByZero));
                    }
                    acc /= divisor;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> ParseResult<f64> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(-self.atom()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> ParseResult<f64> {
        let t = self.bump().clone();
        match t.tok {
            Tok::Number(x) => Ok(x),
            Tok::Ident(ref s) if s == "pi" => Ok(std::f64::consts::PI),
            Tok::Ident(ref s) if s == "sqrt" => {
                self.expect(Tok::LParen, "`(` after sqrt")?;
                let arg_column = self.peek().column;
                let v = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                if v < 0.0 {
                    return Err(self.error(arg_column, ParseErrorKind::NegativeSqrt));
                }
                Ok(v.sqrt())
            }
            Tok::LParen => {
                let v = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(v)
            }
            other => Err(self.error(
                t.column,
                ParseErrorKind::UnexpectedToken {
                    found: other.to_string(),
                    expected: "a number, `pi`, `sqrt` or `(`",
                },
            )),
        }
    }
}

/// Evaluate a standalone coefficient expression.
pub fn parse_expression(text: &str) -> ParseResult<f64> {
    let tokens = tokenize(text, 1)?;
    let mut p = ExprParser {
        tokens: &tokens,
        pos: 0,
        line: 1,
    };
    let value = p.expr()?;
    let rest = p.peek().clone();
    if rest.tok != Tok::End {
        return Err(p.error(
            rest.column,
            ParseErrorKind::UnexpectedToken {
                found: rest.tok.to_string(),
                expected: "an operator or end of input",
            },
        ));
    }
    if !value.is_finite() {
        return Err(p.error(1, ParseErrorKind::NonFinite));
    }
    Ok(value)
}

struct RawTerm {
    coefficient: f64,
    factors: Vec<(PauliLabel, String, usize)>,
    pos: SourcePos,
}

pub fn parse_file(text: &str) -> ParseResult<HamFileDocument> {
    let mut header: Option<SpinSystem> = None;
    let mut raw_terms: Vec<RawTerm> = Vec::new();

    for (idx, raw_line) in text.split('\n').enumerate() {
        let line = idx + 1;
        let content = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        let content = content.split('#').next().unwrap_or("");
        let tokens = tokenize(content, line)?;
        let first = &tokens[0];
        let err = |column, kind| ParseError { line, column, kind };
        match &first.tok {
            Tok::End => continue,
            Tok::Ident(s) if s == "spins" => {
                if header.is_some() {
                    return Err(err(first.column, ParseErrorKind::DuplicateHeader));
                }
                if !raw_terms.is_empty() {
                    return Err(err(first.column, ParseErrorKind::HeaderAfterTerms));
                }
                let mut names = Vec::new();
                for t in &tokens[1..] {
                    match &t.tok {
                        Tok::Ident(name) => {
                            if names.contains(name) {
                                return Err(err(
                                    t.column,
                                    ParseErrorKind::DuplicateSiteName(name.clone()),
                                ));
                            }
                            names.push(name.clone());
                        }
                        Tok::End => {}
                        other => {
                            return Err(err(
                                t.column,
                                ParseErrorKind::UnexpectedToken {
                                    found: other.to_string(),
                                    expected: "a site name",
                                },
                            ))
                        }
                    }
                }
                if names.is_empty() {
                    return Err(err(first.column, ParseErrorKind::EmptyHeader));
                }
                header = Some(SpinSystem::new(names).expect("names are identifiers and unique"));
            }
            _ => {
                let mut p = ExprParser {
                    tokens: &tokens,
                    pos: 0,
                    line,
                };
                let coefficient = p.expr()?;
                if !coefficient.is_finite() {
                    return Err(err(first.column, ParseErrorKind::NonFinite));
                }
                let mut factors = Vec::new();
                loop {
                    let t = p.bump().clone();
                    match t.tok {
                        Tok::End => break,
                        Tok::Ident(word) => {
                            let label = match word.chars().next() {
                                Some('x') => PauliLabel::X,
                                Some('y') => PauliLabel::Y,
                                Some('z') => PauliLabel::Z,
                                _ => return Err(err(t.column, ParseErrorKind::BadFactor(word))),
                            };
                            let site = word[1..].to_string();
                            if site.is_empty() {
                                return Err(err(t.column, ParseErrorKind::BadFactor(word)));
                            }
                            factors.push((label, site, t.column));
                        }
                        other => {
                            return Err(err(
                                t.column,
                                ParseErrorKind::UnexpectedToken {
                                    found: other.to_string(),
                                    expected: "a Pauli factor such as `zA`",
                                },
                            ))
                        }
                    }
                }
                if factors.is_empty() {
                    let column = tokens.last().map_or(1, |t| t.column);
                    return Err(err(column, ParseErrorKind::MissingFactors));
                }
                raw_terms.push(RawTerm {
                    coefficient,
                    factors,
                    pos: SourcePos {
                        line,
                        column: first.column,
                    },
                });
            }
        }
    }

    let system = header.unwrap_or_else(|| SpinSystem::new(["A", "B", "C"]).expect("default sites"));
    let mut terms = Vec::with_capacity(raw_terms.len());
    let mut positions = Vec::with_capacity(raw_terms.len());
    for raw in raw_terms {
        let err = |column, kind| ParseError {
            line: raw.pos.line,
            column,
            kind,
        };
        let mut factors: Vec<(usize, PauliLabel)> = Vec::with_capacity(raw.factors.len());
        for (label, name, column) in &raw.factors {
            let site = system
                .site_index(name)
                .ok_or_else(|| err(*column, ParseErrorKind::UnknownSite(name.clone())))?;
            if factors.iter().any(|&(s, _)| s == site) {
                return Err(err(*column, ParseErrorKind::DuplicateSite(name.clone())));
            }
            factors.push((site, *label));
        }
        terms.push(PauliTerm::new(raw.coefficient, factors).expect("validated above"));
        positions.push(raw.pos);
    }
    Ok(HamFileDocument {
        system,
        terms,
        positions,
    })
}

/// Canonical rendering: header, then one term per line with factors in site
/// order and the coefficient as its shortest round-trip decimal.
pub fn write_file(doc: &HamFileDocument) -> String {
    let mut out = String::from("spins");
    for name in doc.system.names() {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
    for term in &doc.terms {
        let _ = write!(out, "{:?}", term.coefficient());
        for (&site, &label) in term.factors() {
            let _ = write!(out, " {}{}", label.letter(), doc.system.name(site));
        }
        out.push('\n');
    }
    out
}

pub fn write_hamiltonian(h: &Hamiltonian) -> String {
    write_file(&HamFileDocument::from_hamiltonian(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::xor_hamiltonian;
    use proptest::prelude::*;

    const XOR_FILE: &str = "spins A B C\nsqrt(2)*pi/4 zA yB\nsqrt(2)*pi/4 zB yC\n-pi/4 yB xC";

    #[test]
    #[allow(clippy::approx_constant)]
    fn expressions() {
        // π√2/4 and π/4 to 10 decimals, from a 30-digit evaluation.
        assert!((parse_expression("sqrt(2)*pi/4").unwrap() - 1.1107207345).abs() < 0.5e-10);
        assert!((parse_expression("-pi/4").unwrap() + 0.7853981634).abs() < 0.5e-10);
        assert_eq!(parse_expression("2*(1+3)").unwrap(), 8.0);
        assert_eq!(parse_expression("8/2/2").unwrap(), 2.0);
        assert_eq!(parse_expression("1-2-3").unwrap(), -4.0);
        assert_eq!(parse_expression("-2*-3").unwrap(), 6.0);
        assert_eq!(parse_expression("1.5e3 + .5").unwrap(), 1500.5);
        assert_eq!(
            parse_expression("-1.1107207345395916e-7").unwrap(),
            -1.1107207345395916e-7
        );
    }

    #[test]
    fn expression_errors() {
        let e = parse_expression("1/0").unwrap_err();
        assert_eq!(
            (e.line, e.column, e.kind),
            (1, 2, ParseErrorKind::DivisionByZero)
        );
        let e = parse_expression("2 * (1 + ").unwrap_err();
        assert_eq!((e.line, e.column), (1, 10));
        assert_eq!(
            parse_expression("2 $").unwrap_err().kind,
            ParseErrorKind::UnexpectedChar('$')
        );
        assert_eq!(
            parse_expression("sqrt(-1)").unwrap_err().kind,
            ParseErrorKind::NegativeSqrt
        );
        assert!(parse_expression("2 3").is_err());
        assert!(parse_expression("2^3").is_err());
        assert!(parse_expression("1..2").is_err());
        assert!(parse_expression("").is_err());
    }

    #[test]
    fn parses_xor_file() {
        let doc = parse_file(XOR_FILE).unwrap();
        assert_eq!(doc.to_hamiltonian().unwrap(), xor_hamiltonian());
        assert_eq!(doc.positions[2], SourcePos { line: 4, column: 1 });
    }

    #[test]
    fn default_header_and_comments() {
        let text = "# comment only\n\n  sqrt(2)*pi/4 zA yB   # trailing\r\nsqrt(2)*pi/4 zB yC\r\n-pi/4 yB xC\n";
        let doc = parse_file(text).unwrap();
        assert_eq!(doc.to_hamiltonian().unwrap(), xor_hamiltonian());
    }

    #[test]
    fn whitespace_insensitive() {
        let spaced =
            "  spins\tA  B\tC\n\tsqrt ( 2 ) * pi / 4\tzA   yB\nsqrt(2)*pi/4 zB yC\n - pi/4 yB xC  ";
        assert_eq!(
            parse_file(spaced).unwrap().terms,
            parse_file(XOR_FILE).unwrap().terms
        );
    }

    #[test]
    fn empty_documents() {
        let doc = parse_file("spins A\n").unwrap();
        assert_eq!(doc.system.site_count(), 1);
        assert!(doc.terms.is_empty());
        assert_eq!(write_file(&doc), "spins A\n");
        assert_eq!(parse_file("").unwrap().system.site_count(), 3);
    }

    #[test]
    fn file_errors() {
        let cases: &[(&str, usize, usize, ParseErrorKind)] = &[
            ("1.0 zA zA", 1, 8, ParseErrorKind::DuplicateSite("A".into())),
            (
                "spins A B\n1.0 zC",
                2,
                5,
                ParseErrorKind::UnknownSite("C".into()),
            ),
            ("1.0", 1, 4, ParseErrorKind::MissingFactors),
            ("1.0 zA\nspins A", 2, 1, ParseErrorKind::HeaderAfterTerms),
            ("spins A\nspins A", 2, 1, ParseErrorKind::DuplicateHeader),
            ("spins", 1, 1, ParseErrorKind::EmptyHeader),
            (
                "spins A A",
                1,
                9,
                ParseErrorKind::DuplicateSiteName("A".into()),
            ),
            ("1.0 wA", 1, 5, ParseErrorKind::BadFactor("wA".into())),
            ("1.0 z", 1, 5, ParseErrorKind::BadFactor("z".into())),
            ("spins A\n\n1/0 zA", 3, 2, ParseErrorKind::DivisionByZero),
        ];
        for (text, line, column, kind) in cases {
            let e = parse_file(text).unwrap_err();
            assert_eq!(
                (e.line, e.column, &e.kind),
                (*line, *column, kind),
                "input {text:?}"
            );
        }
        assert!(matches!(
            parse_file("1.0 zA (").unwrap_err().kind,
            ParseErrorKind::UnexpectedToken { .. }
        ));
    }

    #[test]
    fn writes_xor_hamiltonian() {
        let text = write_hamiltonian(&xor_hamiltonian());
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("spins A B C\n"));
        assert!(text.contains(" zA yB\n"));
        assert_eq!(
            parse_file(&text).unwrap().to_hamiltonian().unwrap(),
            xor_hamiltonian()
        );
    }

    fn arb_document() -> impl Strategy<Value = HamFileDocument> {
        (1usize..=4).prop_flat_map(|n| {
            let term = (
                prop_oneof![-1e3f64..1e3, -1e-6f64..1e-6, Just(0.0)],
                proptest::collection::vec(0u8..4, n),
            );
            proptest::collection::vec(term, 0..=10).prop_map(move |raw| {
                let system = SpinSystem::with_sites(n).unwrap();
                let terms = raw
                    .into_iter()
                    .map(|(c, mut labels)| {
                        if labels.iter().all(|&l| l == 0) {
                            labels[0] = 1;
                        }
                        let factors = labels.into_iter().enumerate().filter(|&(_, l)| l != 0).map(
                            |(s, l)| {
                                (
                                    s,
                                    [PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z]
                                        [l as usize],
                                )
                            },
                        );
                        PauliTerm::new(c, factors).unwrap()
                    })
                    .collect();
                HamFileDocument {
                    system,
                    terms,
                    positions: Vec::new(),
                }
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip_preserves_document(doc in arb_document()) {
            let back = parse_file(&write_file(&doc)).unwrap();
            prop_assert_eq!(&back.system, &doc.system);
            prop_assert_eq!(&back.terms, &doc.terms);
            let a = doc.to_hamiltonian().unwrap().assemble();
            let b = back.to_hamiltonian().unwrap().assemble();
            prop_assert!(a.max_abs_diff(&b).unwrap() <= 1e-15);
        }

        #[test]
        fn parser_never_panics(text in "[ -~\t\n]{0,60}") {
            let _ = parse_file(&text);
        }
    }
}
