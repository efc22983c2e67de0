//! Recursive-descent parser for the textual formula grammar.
//!
//! Precedence, tightest first: unary `!`, `X`, `G`, `F`; then `U` and `R`
//! (right-associative); then `&`; then `|`; then `->` (right-associative).

use std::fmt;

use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownCharacter(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    TrailingInput(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnknownCharacter(c) => write!(f, "unknown character `{c}`"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token `{t}`"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::TrailingInput(t) => write!(f, "trailing input starting at `{t}`"),
        }
    }
}

/// Syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    True,
    False,
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Next,
    Until,
    Release,
    Globally,
    Finally,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::True => "true",
            Tok::False => "false",
            Tok::Ident(s) => s,
            Tok::Not => "!",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Implies => "->",
            Tok::Next => "X",
            Tok::Until => "U",
            Tok::Release => "R",
            Tok::Globally => "G",
            Tok::Finally => "F",
            Tok::LParen => "(",
            Tok::RParen => ")",
        };
        f.write_str(s)
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<(Vec<Spanned>, (usize, usize)), ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match c {
            '!' => {
                bump(&mut chars);
                Tok::Not
            }
            '&' => {
                bump(&mut chars);
                Tok::And
            }
            '|' => {
                bump(&mut chars);
                Tok::Or
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    Tok::Implies
                } else {
                    return Err(ParseError {
                        line: l,
                        column: col,
                        kind: ParseErrorKind::UnknownCharacter('-'),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    "G" => Tok::Globally,
                    "F" => Tok::Finally,
                    _ => Tok::Ident(word),
                }
            }
            other => {
                return Err(ParseError {
                    line: l,
                    column: col,
                    kind: ParseErrorKind::UnknownCharacter(other),
                })
            }
        };
        out.push(Spanned {
            tok,
            line: l,
            column: col,
        });
    }
    Ok((out, (line, column)))
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error_here(&self) -> ParseError {
        match self.toks.get(self.pos) {
            Some(s) => ParseError {
                line: s.line,
                column: s.column,
                kind: ParseErrorKind::UnexpectedToken(s.tok.to_string()),
            },
            None => ParseError {
                line: self.end.0,
                column: self.end.1,
                kind: ParseErrorKind::UnexpectedEnd,
            },
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Or) {
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.binary_temporal()?;
        while self.eat(&Tok::And) {
            acc = Formula::and(acc, self.binary_temporal()?);
        }
        Ok(acc)
    }

    fn binary_temporal(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::Until) {
            Ok(Formula::until(lhs, self.binary_temporal()?))
        } else if self.eat(&Tok::Release) {
            Ok(Formula::release(lhs, self.binary_temporal()?))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error_here());
        };
        let wrap: fn(Formula) -> Formula = match tok {
            Tok::Not => Formula::not,
            Tok::Next => Formula::next,
            Tok::Globally => Formula::globally,
            Tok::Finally => Formula::finally,
            _ => return self.primary(),
        };
        self.pos += 1;
        Ok(wrap(self.unary()?))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let f = match self.peek() {
            Some(Tok::True) => Formula::True,
            Some(Tok::False) => Formula::False,
            Some(Tok::Ident(name)) => Formula::Atom(name.clone()),
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.implication()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error_here());
                }
                return Ok(inner);
            }
            _ => return Err(self.error_here()),
        };
        self.pos += 1;
        Ok(f)
    }
}

/// Parses one formula. Negated atoms come back as `Not(Atom)`; [`to_nnf`]
/// turns them into `NegAtom`.
///
/// [`to_nnf`]: super::to_nnf
pub fn parse_ltl(text: &str) -> Result<Formula, ParseError> {
    let (toks, end) = lex(text)?;
    let mut parser = Parser { toks, pos: 0, end };
    let f = parser.implication()?;
    if let Some(s) = parser.toks.get(parser.pos) {
        return Err(ParseError {
            line: s.line,
            column: s.column,
            kind: ParseErrorKind::TrailingInput(s.tok.to_string()),
        });
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn globally_request_grant() {
        assert_eq!(
            parse_ltl("G (r -> X g)").unwrap(),
            Formula::globally(Formula::implies(a("r"), Formula::next(a("g"))))
        );
    }

    #[test]
    fn until_is_right_associative() {
        assert_eq!(
            parse_ltl("a U b U c").unwrap(),
            Formula::until(a("a"), Formula::until(a("b"), a("c")))
        );
        assert_eq!(
            parse_ltl("a R b U c").unwrap(),
            Formula::release(a("a"), Formula::until(a("b"), a("c")))
        );
    }

    #[test]
    fn precedence_levels() {
        // -> binds loosest, then |, then &, then U/R, then unary
        assert_eq!(
            parse_ltl("a | b & c -> X d U e").unwrap(),
            Formula::implies(
                Formula::or(a("a"), Formula::and(a("b"), a("c"))),
                Formula::until(Formula::next(a("d")), a("e"))
            )
        );
        assert_eq!(
            parse_ltl("a -> b -> c").unwrap(),
            Formula::implies(a("a"), Formula::implies(a("b"), a("c")))
        );
        assert_eq!(
            parse_ltl("!G F p").unwrap(),
            Formula::not(Formula::globally(Formula::finally(a("p"))))
        );
    }

    #[test]
    fn identifiers_may_start_with_operator_letters() {
        assert_eq!(parse_ltl("Xa").unwrap(), a("Xa"));
        assert_eq!(parse_ltl("X_1 & G2").unwrap(), Formula::and(a("X_1"), a("G2")));
        assert_eq!(parse_ltl("true").unwrap(), Formula::True);
    }

    #[test]
    fn unbalanced_parenthesis_is_an_error() {
        let err = parse_ltl("G (a &").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!((err.line, err.column), (1, 7));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_ltl("a &\n  # b").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownCharacter('#'));
        assert_eq!((err.line, err.column), (2, 3));

        let err = parse_ltl("a b").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::TrailingInput("b".into()));
        assert_eq!(err.column, 3);

        let err = parse_ltl("a - b").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownCharacter('-'));

        let err = parse_ltl("(a))").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::TrailingInput(")".into()));

        assert!(parse_ltl("").is_err());
        assert!(parse_ltl("a & & b").is_err());
    }
}
