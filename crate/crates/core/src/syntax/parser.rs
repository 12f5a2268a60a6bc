//! Recursive-descent parser for the concrete formula syntax.
//!
//! ```text
//! formula := impl
//! impl    := or [ "->" impl ]
//! or      := and { "|" and }
//! and     := unary { "&" unary }
//! unary   := "~" unary | "[]" unary | "<>" unary | "[" nat "]" unary
//!          | "<" nat ">" unary | "[d:" nat "]" unary | atom
//! atom    := "false" | "true" | ident | "(" impl ")"
//! ident   := [a-z][a-z0-9_]*
//! nat     := [1-9][0-9]*
//! ```

use std::fmt;

use thiserror::Error;

use super::formula::{Agent, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Not,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    BoxOp,
    DiamondOp,
    Stit(Agent),
    StitDual(Agent),
    Deliberative(Agent),
    False,
    True,
    Ident(String),
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Not => write!(f, "'~'"),
            Token::And => write!(f, "'&'"),
            Token::Or => write!(f, "'|'"),
            Token::Arrow => write!(f, "'->'"),
            Token::LParen => write!(f, "'('"),
            Token::RParen => write!(f, "')'"),
            Token::BoxOp => write!(f, "'[]'"),
            Token::DiamondOp => write!(f, "'<>'"),
            Token::Stit(j) => write!(f, "'[{j}]'"),
            Token::StitDual(j) => write!(f, "'<{j}>'"),
            Token::Deliberative(j) => write!(f, "'[d:{j}]'"),
            Token::False => write!(f, "'false'"),
            Token::True => write!(f, "'true'"),
            Token::Ident(s) => write!(f, "identifier '{s}'"),
            Token::End => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn error(&self, position: usize, expected: &str) -> ParseError {
        let found = match self.src.get(position) {
            Some(c) => format!("'{}'", *c as char),
            None => "end of input".to_string(),
        };
        ParseError {
            position,
            expected: expected.to_string(),
            found,
        }
    }

    fn nat(&mut self) -> Result<Agent, ParseError> {
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(b'1'..=b'9') => {}
            _ => return Err(self.error(self.pos, "agent number")),
        }
        while matches!(self.src.get(self.pos), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<u32>()
            .ok()
            .and_then(Agent::new)
            .ok_or_else(|| self.error(start, "agent number"))
    }

    fn expect_byte(&mut self, b: u8, what: &str) -> Result<(), ParseError> {
        if self.src.get(self.pos) == Some(&b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(self.pos, what))
        }
    }

    fn tokenize(mut self) -> Result<Vec<(usize, Token)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.src.get(self.pos), Some(c) if c.is_ascii_whitespace()) {
                self.pos += 1;
            }
            let start = self.pos;
            let Some(&c) = self.src.get(self.pos) else {
                out.push((start, Token::End));
                return Ok(out);
            };
            let tok = match c {
                b'~' => {
                    self.pos += 1;
                    Token::Not
                }
                b'&' => {
                    self.pos += 1;
                    Token::And
                }
                b'|' => {
                    self.pos += 1;
                    Token::Or
                }
                b'(' => {
                    self.pos += 1;
                    Token::LParen
                }
                b')' => {
                    self.pos += 1;
                    Token::RParen
                }
                b'-' => {
                    self.pos += 1;
                    self.expect_byte(b'>', "'->'")?;
                    Token::Arrow
                }
                b'[' => {
                    self.pos += 1;
                    match self.src.get(self.pos) {
                        Some(b']') => {
                            self.pos += 1;
                            Token::BoxOp
                        }
                        Some(b'd') => {
                            self.pos += 1;
                            self.expect_byte(b':', "':' in '[d:n]'")?;
                            let j = self.nat()?;
                            self.expect_byte(b']', "']'")?;
                            Token::Deliberative(j)
                        }
                        _ => {
                            let j = self.nat()?;
                            self.expect_byte(b']', "']'")?;
                            Token::Stit(j)
                        }
                    }
                }
                b'<' => {
                    self.pos += 1;
                    if self.src.get(self.pos) == Some(&b'>') {
                        self.pos += 1;
                        Token::DiamondOp
                    } else {
                        let j = self.nat()?;
                        self.expect_byte(b'>', "'>'")?;
                        Token::StitDual(j)
                    }
                }
                b'a'..=b'z' => {
                    while matches!(
                        self.src.get(self.pos),
                        Some(b'a'..=b'z' | b'0'..=b'9' | b'_')
                    ) {
                        self.pos += 1;
                    }
                    let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    match word {
                        "false" => Token::False,
                        "true" => Token::True,
                        _ => Token::Ident(word.to_string()),
                    }
                }
                _ => return Err(self.error(start, "a formula token")),
            };
            out.push((start, tok));
        }
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].1.clone();
        if t != Token::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let (position, tok) = &self.tokens[self.pos];
        ParseError {
            position: *position,
            expected: expected.to_string(),
            found: tok.to_string(),
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if *self.peek() == Token::Arrow {
            self.bump();
            let right = self.implication()?;
            Ok(Formula::implies(left, right))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conjunction()?;
        while *self.peek() == Token::Or {
            self.bump();
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while *self.peek() == Token::And {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Token::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Token::BoxOp => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Token::DiamondOp => {
                self.bump();
                Ok(Formula::diamond(self.unary()?))
            }
            Token::Stit(j) => {
                self.bump();
                Ok(Formula::stit(j, self.unary()?))
            }
            Token::StitDual(j) => {
                self.bump();
                Ok(Formula::stit_dual(j, self.unary()?))
            }
            Token::Deliberative(j) => {
                self.bump();
                Ok(Formula::deliberative(j, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Token::False => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Token::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Token::Ident(name) => {
                self.bump();
                Ok(Formula::Var(name))
            }
            Token::LParen => {
                self.bump();
                let inner = self.implication()?;
                if *self.peek() != Token::RParen {
                    return Err(self.error("')'"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error("a formula")),
        }
    }
}

/// Parses a formula. Notation is kept as written; see [`Formula::desugar`].
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = Lexer {
        src: text.as_bytes(),
        pos: 0,
    }
    .tokenize()?;
    let mut parser = Parser { tokens, pos: 0 };
    let f = parser.implication()?;
    if *parser.peek() != Token::End {
        return Err(parser.error("end of input"));
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::agent;

    fn p() -> Formula {
        Formula::var("p")
    }

    fn q() -> Formula {
        Formula::var("q")
    }

    #[test]
    fn literals() {
        assert_eq!(parse("false").unwrap(), Formula::Bottom);
        assert_eq!(parse("true").unwrap(), Formula::Top);
        assert_eq!(parse(" p_1 ").unwrap(), Formula::var("p_1"));
    }

    #[test]
    fn diamond_of_two_stits() {
        let f = parse("<>([1]p & [2](p -> q))").unwrap();
        let expected = Formula::diamond(Formula::and(
            Formula::stit(agent(1), p()),
            Formula::stit(agent(2), Formula::implies(p(), q())),
        ));
        assert_eq!(f, expected);
    }

    #[test]
    fn deliberative_stit() {
        let f = parse("[d:3]p").unwrap();
        assert_eq!(f, Formula::deliberative(agent(3), p()));
        let spelled = Formula::and(
            Formula::stit(agent(3), p()),
            Formula::not(Formula::boxed(p())),
        );
        assert_eq!(f.desugar(), spelled.desugar());
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("p -> q -> p").unwrap(),
            Formula::implies(p(), Formula::implies(q(), p()))
        );
        assert_eq!(
            parse("p | q & p").unwrap(),
            Formula::or(p(), Formula::and(q(), p()))
        );
        assert_eq!(
            parse("p & q & p").unwrap(),
            Formula::and(Formula::and(p(), q()), p())
        );
        assert_eq!(
            parse("~p & q").unwrap(),
            Formula::and(Formula::not(p()), q())
        );
        assert_eq!(
            parse("[][2]q").unwrap(),
            Formula::boxed(Formula::stit(agent(2), q()))
        );
        assert_eq!(
            parse("<><1>p").unwrap(),
            Formula::diamond(Formula::stit_dual(agent(1), p()))
        );
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("p &").unwrap_err();
        assert_eq!(e.position, 3);
        assert_eq!(e.found, "end of input");

        let e = parse("[0]p").unwrap_err();
        assert_eq!(e.position, 1);
        assert!(e.expected.contains("agent"));

        let e = parse("(p -> q").unwrap_err();
        assert_eq!(e.expected, "')'");

        let e = parse("p q").unwrap_err();
        assert_eq!(e.position, 2);

        assert!(parse("P").is_err());
        assert!(parse("p - q").is_err());
        assert!(parse("").is_err());
    }
}
