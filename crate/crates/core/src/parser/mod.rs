// SPDX-License-Identifier: Apache-2.0
//! Text syntax for formulas and JSON formats for teams and models.
//!
//! Precedence, loosest first: quantifiers `E p .` / `A p .`, `\/`, `|`, `&`,
//! then the prefix operators `[]`, `<>`, `~`, `!`. Binary operators associate
//! to the left. A quantifier's scope extends as far right as possible.

mod json;
mod render;

use std::fmt;

use thiserror::Error;

use crate::syntax::{is_identifier, Formula, RelSymbol, Var};

pub use json::{kripke_to_json, parse_kripke, parse_team, team_to_json, KripkeJson, TeamJson};
pub use render::render;

/// Byte range into the parsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Fragment,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at {span}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseError {
    fn syntax(message: impl Into<String>, span: SourceSpan) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax,
            message: message.into(),
            span,
        }
    }

    pub(crate) fn json(message: impl Into<String>) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Json,
            message: message.into(),
            span: SourceSpan::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Exists,
    Forall,
    Dot,
    IDisj,
    Or,
    And,
    Nec,
    Pos,
    Tilde,
    Bang,
    LParen,
    RParen,
    Comma,
    Semi,
    Eq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Exists => "E",
            Tok::Forall => "A",
            Tok::Dot => ".",
            Tok::IDisj => "\\/",
            Tok::Or => "|",
            Tok::And => "&",
            Tok::Nec => "[]",
            Tok::Pos => "<>",
            Tok::Tilde => "~",
            Tok::Bang => "!",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Eq => "=",
        };
        write!(f, "`{s}`")
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |t: Tok| (t, SourceSpan { start, end: start + 1 });
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "E" => Tok::Exists,
                    "A" => Tok::Forall,
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((tok, SourceSpan { start, end: i }));
                continue;
            }
            b'\\' | b'[' | b'<' => {
                let (want, tok) = match c {
                    b'\\' => (b'/', Tok::IDisj),
                    b'[' => (b']', Tok::Nec),
                    _ => (b'>', Tok::Pos),
                };
                if bytes.get(i + 1) != Some(&want) {
                    return Err(ParseError::syntax(
                        format!("expected `{}{}`", c as char, want as char),
                        SourceSpan { start, end: start + 1 },
                    ));
                }
                out.push((tok, SourceSpan { start, end: start + 2 }));
                i += 2;
                continue;
            }
            b'.' => out.push(single(Tok::Dot)),
            b'|' => out.push(single(Tok::Or)),
            b'&' => out.push(single(Tok::And)),
            b'~' => out.push(single(Tok::Tilde)),
            b'!' => out.push(single(Tok::Bang)),
            b'(' => out.push(single(Tok::LParen)),
            b')' => out.push(single(Tok::RParen)),
            b',' => out.push(single(Tok::Comma)),
            b';' => out.push(single(Tok::Semi)),
            b'=' => out.push(single(Tok::Eq)),
            _ => {
                let ch = text[start..].chars().next().expect("non-empty");
                return Err(ParseError::syntax(
                    format!("unexpected character `{ch}`"),
                    SourceSpan {
                        start,
                        end: start + ch.len_utf8(),
                    },
                ));
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Function applications collected when parsing ADQBF matrices.
pub(crate) type Apps = Vec<(String, Vec<Var>)>;

struct Parser<'a> {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    len: usize,
    apps: Option<&'a mut Apps>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn span(&self) -> SourceSpan {
        self.toks
            .get(self.pos)
            .map(|(_, s)| *s)
            .unwrap_or(SourceSpan {
                start: self.len,
                end: self.len,
            })
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::syntax(format!("expected {wanted}, found {t}"), self.span()),
            None => ParseError::syntax(format!("expected {wanted}, found end of input"), self.span()),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn ident(&mut self) -> Result<Var, ParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let v = Var::try_new(name).map_err(|e| ParseError::syntax(e.to_string(), self.span()))?;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.unexpected("a variable")),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.disjunction()?;
        while self.peek() == Some(&Tok::IDisj) {
            self.pos += 1;
            let rhs = self.disjunction()?;
            lhs = Formula::idisj(lhs, rhs);
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let span = self.span();
        match self.peek().cloned() {
            Some(Tok::Nec) => {
                self.pos += 1;
                Ok(Formula::nec(self.unary()?))
            }
            Some(Tok::Pos) => {
                self.pos += 1;
                Ok(Formula::diamond(self.unary()?))
            }
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::cneg(self.unary()?))
            }
            Some(Tok::Bang) => {
                self.pos += 1;
                let is_ident = matches!(self.peek(), Some(Tok::Ident(_)));
                let is_call = self.peek_at(1) == Some(&Tok::LParen);
                if is_ident && is_call && self.apps.is_some() {
                    let inner = self.unary()?;
                    if matches!(inner, Formula::Rel(..)) {
                        return Ok(Formula::cneg(inner));
                    }
                }
                if !is_ident || is_call {
                    return Err(ParseError {
                        kind: ParseErrorKind::Fragment,
                        message: "`!` applies to variables only".into(),
                        span: SourceSpan {
                            start: span.start,
                            end: self.span().end,
                        },
                    });
                }
                Ok(Formula::NegAtom(self.ident()?))
            }
            Some(Tok::Exists) | Some(Tok::Forall) => {
                let exists = self.peek() == Some(&Tok::Exists);
                self.pos += 1;
                let v = self.ident()?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if exists {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Eq) => {
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let mut args = vec![self.formula()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    args.push(self.formula()?);
                }
                self.expect(Tok::RParen)?;
                let target = args.pop().expect("at least one argument");
                Ok(Formula::dep(args, target))
            }
            Some(Tok::Ident(name)) => {
                if self.peek_at(1) != Some(&Tok::LParen) {
                    return Ok(Formula::Atom(self.ident()?));
                }
                if name == "ind" {
                    self.pos += 2;
                    let cond = self.var_list(&Tok::Semi)?;
                    self.expect(Tok::Semi)?;
                    let left = self.var_list(&Tok::Semi)?;
                    self.expect(Tok::Semi)?;
                    let right = self.var_list(&Tok::RParen)?;
                    self.expect(Tok::RParen)?;
                    return Ok(Formula::ind(cond, left, right));
                }
                if name == "inc" {
                    self.pos += 2;
                    let left = self.var_list(&Tok::Comma)?;
                    self.expect(Tok::Comma)?;
                    let right = self.var_list(&Tok::RParen)?;
                    if left.len() != right.len() {
                        return Err(ParseError::syntax("inclusion sides differ in length", span));
                    }
                    self.expect(Tok::RParen)?;
                    return Ok(Formula::inc(left, right));
                }
                if let Ok(sym) = name.parse::<RelSymbol>() {
                    self.pos += 2;
                    let mut args = Vec::new();
                    if self.peek() != Some(&Tok::RParen) {
                        args.push(self.formula()?);
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            args.push(self.formula()?);
                        }
                    }
                    self.expect(Tok::RParen)?;
                    return Ok(Formula::Rel(sym, args));
                }
                if self.apps.is_some() {
                    self.pos += 2;
                    let mut args = Vec::new();
                    if self.peek() != Some(&Tok::RParen) {
                        args.push(self.ident()?);
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            args.push(self.ident()?);
                        }
                    }
                    self.expect(Tok::RParen)?;
                    let apps = self.apps.as_mut().expect("checked");
                    let key = (name, args.clone());
                    let idx = match apps.iter().position(|a| *a == key) {
                        Some(i) => i,
                        None => {
                            apps.push(key);
                            apps.len() - 1
                        }
                    };
                    return Ok(Formula::Rel(RelSymbol(idx as u32), args.into_iter().map(Formula::Atom).collect()));
                }
                Err(ParseError::syntax(format!("`{name}` is not a function or atom"), span))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn var_list(&mut self, stop: &Tok) -> Result<Vec<Var>, ParseError> {
        let mut out = Vec::new();
        while self.peek() != Some(stop) {
            out.push(self.ident()?);
        }
        Ok(out)
    }
}

fn parse_inner(text: &str, apps: Option<&mut Apps>) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        len: text.len(),
        apps,
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

/// Parses a formula.
///
/// ```
/// use teamlogic::parser::parse;
/// use teamlogic::syntax::Formula;
/// assert_eq!(parse("=(p,q)").unwrap(), Formula::dep_vars(&["p"], "q"));
/// assert!(parse("!(p & q)").is_err());
/// ```
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_inner(text, None)
}

/// Parses a formula whose atoms may be function applications `f(p1,...)`.
/// Applications become relational atoms indexed into the returned table.
pub(crate) fn parse_with_apps(text: &str) -> Result<(Formula, Apps), ParseError> {
    let mut apps = Apps::new();
    let f = parse_inner(text, Some(&mut apps))?;
    Ok((f, apps))
}

/// Checks that `name` is a legal variable name for the text syntax.
pub fn check_identifier(name: &str) -> Result<Var, ParseError> {
    if is_identifier(name) {
        Ok(Var::new(name))
    } else {
        Err(ParseError::syntax(format!("invalid identifier `{name}`"), SourceSpan::default()))
    }
}
