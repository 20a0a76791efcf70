//! Recursive-descent parser for the concrete formula syntax.
//!
//! ```text
//! formula := iff
//! iff     := impl ("<->" impl)*
//! impl    := or ("->" impl)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "K[" ident "]" unary | "B[" ident "]" unary | atomexp
//! atomexp := "false" | "true" | ident | "(" formula ")"
//! ```
//!
//! Derived connectives are expanded into the primitive constructors while
//! parsing.

use std::fmt;

use thiserror::Error;

use super::formula::{Agent, Formula};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message} (expected one of: {})", .expected.join(", "))]
    Syntax {
        offset: usize,
        message: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown operator `{op}` at byte {offset}")]
    UnknownOperator { offset: usize, op: String },
    #[error("unbalanced `{bracket}` at byte {offset}")]
    Unbalanced { offset: usize, bracket: char },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownOperator { offset, .. }
            | ParseError::Unbalanced { offset, .. } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Knows(String),
    Believes(String),
    True,
    False,
    Not,
    And,
    Or,
    Arrow,
    Iff,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Knows(a) => write!(f, "`K[{a}]`"),
            Tok::Believes(a) => write!(f, "`B[{a}]`"),
            Tok::True => f.write_str("`true`"),
            Tok::False => f.write_str("`false`"),
            Tok::Not => f.write_str("`~`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const FORMULA_START: &[&str] = &["identifier", "`false`", "`true`", "`~`", "`K[`", "`B[`", "`(`"];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let ident_end = |mut j: usize| {
        while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
            j += 1;
        }
        j
    };
    let skip_ws = |mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_whitespace() {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            let end = ident_end(i);
            let word = &text[i..end];
            if (word == "K" || word == "B") && bytes.get(end) == Some(&b'[') {
                let a_start = skip_ws(end + 1);
                let a_end = ident_end(a_start);
                let valid_start = bytes
                    .get(a_start)
                    .is_some_and(|b| b.is_ascii_alphabetic() || *b == b'_');
                if !valid_start {
                    if a_start >= bytes.len() {
                        return Err(ParseError::Unbalanced { offset: end, bracket: '[' });
                    }
                    return Err(ParseError::Syntax {
                        offset: a_start,
                        message: "expected agent identifier inside modality".into(),
                        expected: vec!["identifier"],
                    });
                }
                let close = skip_ws(a_end);
                if bytes.get(close) != Some(&b']') {
                    return Err(ParseError::Unbalanced { offset: end, bracket: '[' });
                }
                let agent = text[a_start..a_end].to_string();
                out.push((
                    start,
                    if word == "K" { Tok::Knows(agent) } else { Tok::Believes(agent) },
                ));
                i = close + 1;
                continue;
            }
            out.push((
                start,
                match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word.to_string()),
                },
            ));
            i = end;
            continue;
        }
        let (tok, len) = match c {
            b'~' => (Tok::Not, 1),
            b'&' => (Tok::And, 1),
            b'|' => (Tok::Or, 1),
            b'(' => (Tok::LParen, 1),
            b')' => (Tok::RParen, 1),
            b'-' if bytes.get(i + 1) == Some(&b'>') => (Tok::Arrow, 2),
            b'<' if text[i..].starts_with("<->") => (Tok::Iff, 3),
            b'[' | b']' => {
                return Err(ParseError::Unbalanced { offset: i, bracket: c as char });
            }
            _ => {
                // Group a run of punctuation so `=>` or `!=` is reported whole.
                let mut end = i + text[i..].chars().next().map_or(1, char::len_utf8);
                while end < bytes.len()
                    && bytes[end].is_ascii_punctuation()
                    && !matches!(bytes[end], b'(' | b')' | b'[' | b']' | b'~' | b'_')
                {
                    end += 1;
                }
                return Err(ParseError::UnknownOperator { offset: i, op: text[i..end].to_string() });
            }
        };
        out.push((start, tok));
        i += len;
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    open_parens: Vec<usize>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary(None)?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary(None)?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    /// `after` names the prefix operator just consumed, for error messages.
    fn unary(&mut self, after: Option<&'static str>) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary(Some("negation"))?))
            }
            Tok::Knows(a) => {
                self.bump();
                Ok(Formula::Knows(Agent::new(a), self.unary(Some("modality"))?.into()))
            }
            Tok::Believes(a) => {
                self.bump();
                Ok(Formula::Believes(Agent::new(a), self.unary(Some("modality"))?.into()))
            }
            _ => self.atomic(after),
        }
    }

    fn atomic(&mut self, after: Option<&'static str>) -> Result<Formula, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Tok::False => Ok(Formula::Falsum),
            Tok::True => Ok(Formula::verum()),
            Tok::Ident(p) => Ok(Formula::atom(p)),
            Tok::LParen => {
                self.open_parens.push(offset);
                let inner = self.formula()?;
                match self.peek() {
                    Tok::RParen => {
                        self.bump();
                        self.open_parens.pop();
                        Ok(inner)
                    }
                    Tok::Eof => Err(ParseError::Unbalanced { offset, bracket: '(' }),
                    other => Err(ParseError::Syntax {
                        offset: self.offset(),
                        message: format!("unexpected {other}"),
                        expected: vec!["`)`", "`&`", "`|`", "`->`", "`<->`"],
                    }),
                }
            }
            Tok::RParen if self.open_parens.is_empty() => {
                Err(ParseError::Unbalanced { offset, bracket: ')' })
            }
            found => {
                let message = match after {
                    Some(op) => format!("expected formula after {op}"),
                    None if found == Tok::Eof => "expected formula".to_string(),
                    None => format!("expected formula, found {found}"),
                };
                // Keep the position of the missing operand, not the token past it.
                self.pos = self.pos.saturating_sub(usize::from(found != Tok::Eof));
                Err(ParseError::Syntax { offset, message, expected: FORMULA_START.to_vec() })
            }
        }
    }
}

/// Parses a formula from its concrete syntax.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0, open_parens: Vec::new() };
    let f = parser.formula()?;
    let offset = parser.offset();
    match parser.peek() {
        Tok::Eof => Ok(f),
        Tok::RParen => Err(ParseError::Unbalanced { offset, bracket: ')' }),
        other => Err(ParseError::Syntax {
            offset,
            message: format!("unexpected {other}"),
            expected: vec!["`&`", "`|`", "`->`", "`<->`", "end of input"],
        }),
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn knowledge_implies_belief() {
        let f = parse_formula("K[a] p -> B[a] p").unwrap();
        assert_eq!(f, Formula::implies(Formula::knows("a", p()), Formula::believes("a", p())));
    }

    #[test]
    fn negation_is_sugar() {
        assert_eq!(parse_formula("~p").unwrap(), Formula::implies(p(), Formula::Falsum));
    }

    #[test]
    fn dangling_modality() {
        let err = parse_formula("B[a]").unwrap_err();
        match &err {
            ParseError::Syntax { offset, message, expected } => {
                assert_eq!(*offset, 4);
                assert_eq!(message, "expected formula after modality");
                assert!(expected.contains(&"identifier"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn arrow_is_right_associative() {
        let q = Formula::atom("q");
        let r = Formula::atom("r");
        let f = parse_formula("p -> q -> r").unwrap();
        assert_eq!(f, Formula::implies(p(), Formula::implies(q, r)));
    }

    #[test]
    fn precedence_levels() {
        let q = Formula::atom("q");
        let r = Formula::atom("r");
        let f = parse_formula("~p & q | r <-> p").unwrap();
        let expected = Formula::iff(Formula::or(Formula::and(Formula::not(p()), q), r), p());
        assert_eq!(f, expected);
        // modality binds tighter than &
        let g = parse_formula("K[a] p & q").unwrap();
        assert_eq!(g, Formula::and(Formula::knows("a", p()), Formula::atom("q")));
    }

    #[test]
    fn modality_whitespace_and_atoms_named_k() {
        assert_eq!(parse_formula("K[ a ]p").unwrap(), Formula::knows("a", p()));
        assert_eq!(parse_formula("K").unwrap(), Formula::atom("K"));
        assert_eq!(parse_formula("K -> B").unwrap(), Formula::implies(Formula::atom("K"), Formula::atom("B")));
    }

    #[test]
    fn constants() {
        assert_eq!(parse_formula("false").unwrap(), Formula::Falsum);
        assert_eq!(parse_formula("true").unwrap(), Formula::verum());
    }

    #[test]
    fn unknown_operator() {
        let err = parse_formula("p => q").unwrap_err();
        assert_eq!(err, ParseError::UnknownOperator { offset: 2, op: "=>".into() });
        assert!(matches!(parse_formula("p ∧ q"), Err(ParseError::UnknownOperator { offset: 2, .. })));
    }

    #[test]
    fn unbalanced() {
        assert_eq!(parse_formula("(p -> q").unwrap_err(), ParseError::Unbalanced { offset: 0, bracket: '(' });
        assert_eq!(parse_formula("p)").unwrap_err(), ParseError::Unbalanced { offset: 1, bracket: ')' });
        assert_eq!(parse_formula("K[a p").unwrap_err(), ParseError::Unbalanced { offset: 1, bracket: '[' });
        assert!(matches!(parse_formula("p ]"), Err(ParseError::Unbalanced { bracket: ']', .. })));
    }

    #[test]
    fn trailing_garbage() {
        let err = parse_formula("p q").unwrap_err();
        assert_eq!(err.offset(), 2);
    }

    #[test]
    fn missing_operand() {
        let err = parse_formula("p &").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 3, .. }));
        let err = parse_formula("p -> )").unwrap_err();
        assert!(matches!(err, ParseError::Unbalanced { offset: 5, bracket: ')' }));
    }
}
