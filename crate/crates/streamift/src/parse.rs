//! Parsing of polynomial systems and expressions.
//!
//! Expression grammar (no juxtaposition, `^` takes a nonnegative integer
//! literal, rational literals written `a/b` with no spaces):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := '-' factor | primary ('^' nat)?
//! primary := '(' expr ')' | number | ident
//! ```
//!
//! System files are line oriented with `#` comments:
//!
//! ```text
//! vars:  <id> <id> ...
//! order: <id> <id> ...          # optional, least variable first
//! eqs:   one expression or `lhs = rhs` per line
//! init:  <rational> <rational> ...
//! ```
//!
//! `x` is reserved for the distinguished series variable. An equation
//! written `lhs = rhs` is stored as `lhs - rhs`.

use std::fmt;

use crate::poly::Polynomial;
use crate::rat::{parse_rat, Rat};
use crate::var::{VarId, VarOrder};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ParseError {
    Syntax { pos: Pos, msg: String },
    UnknownIdent { pos: Pos, name: String },
    ReservedIdent { pos: Pos, name: String },
    DuplicateIdent { pos: Pos, name: String },
    Arity { what: &'static str, expected: usize, got: usize },
    ZeroEquation { index: usize, line: usize },
    MissingSection { name: &'static str },
    DuplicateSection { name: &'static str, line: usize },
    BadRational { pos: Pos, text: String },
    BadOrder { line: usize, msg: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { pos, msg } => write!(f, "{pos}: {msg}"),
            ParseError::UnknownIdent { pos, name } => {
                write!(f, "{pos}: unknown identifier `{name}`")
            }
            ParseError::ReservedIdent { pos, name } => {
                write!(f, "{pos}: `{name}` is reserved and cannot be declared")
            }
            ParseError::DuplicateIdent { pos, name } => {
                write!(f, "{pos}: duplicate identifier `{name}`")
            }
            ParseError::Arity { what, expected, got } => {
                write!(f, "expected {expected} {what}, got {got}")
            }
            ParseError::ZeroEquation { index, line } => {
                write!(f, "line {line}: equation {index} normalizes to 0")
            }
            ParseError::MissingSection { name } => write!(f, "missing `{name}:` section"),
            ParseError::DuplicateSection { name, line } => {
                write!(f, "line {line}: duplicate `{name}:` section")
            }
            ParseError::BadRational { pos, text } => {
                write!(f, "{pos}: `{text}` is not a rational literal")
            }
            ParseError::BadOrder { line, msg } => write!(f, "line {line}: {msg}"),
        }
    }
}

impl std::error::Error for ParseError {}

/// A system of `n` polynomial equations over `x, y_1..y_n` together with an
/// initial tuple, as read from a system file.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolySystem {
    pub names: Vec<String>,
    pub equations: Vec<Polynomial>,
    pub r0: Vec<Rat>,
    /// Declared differentiation order; declaration order unless the file
    /// carries an `order:` directive.
    pub order: VarOrder,
}

impl PolySystem {
    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn var_of(&self, name: &str) -> Option<VarId> {
        if name == "x" {
            return Some(VarId::X);
        }
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| VarId::Y(i as u32 + 1))
    }

    pub fn name_of(&self, v: VarId) -> String {
        match v {
            VarId::X => "x".to_string(),
            VarId::Y(i) => self.names[i as usize - 1].clone(),
            VarId::Y0(i) => format!("{}0", self.names[i as usize - 1]),
            VarId::YPrime(i) => format!("{}'", self.names[i as usize - 1]),
            VarId::W => "w".to_string(),
        }
    }

    /// Serializes back to the system-file grammar.
    pub fn render_file(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("vars: {}\n", self.names.join(" ")));
        if self.order != VarOrder::identity(self.n()) {
            let mut by_rank: Vec<(u32, &str)> = self
                .names
                .iter()
                .enumerate()
                .map(|(i, n)| (self.order.key(VarId::Y(i as u32 + 1)).1, n.as_str()))
                .collect();
            by_rank.sort();
            let listed: Vec<&str> = by_rank.into_iter().map(|(_, n)| n).collect();
            out.push_str(&format!("order: {}\n", listed.join(" ")));
        }
        out.push_str("eqs:\n");
        let namer = |v: VarId| self.name_of(v);
        for eq in &self.equations {
            out.push_str(&format!("  {}\n", eq.render(&namer)));
        }
        let inits: Vec<String> = self.r0.iter().map(|r| r.to_string()).collect();
        out.push_str(&format!("init: {}\n", inits.join(" ")));
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Number(Rat),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Equals,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    pos: Pos,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenizes one logical line; `#` starts a comment.
fn lex(text: &str, line: usize, col_offset: usize) -> Result<Vec<Spanned>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos {
            line,
            col: col_offset + i + 1,
        };
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                i += 1;
            }
            '+' => {
                toks.push(Spanned { tok: Tok::Plus, pos });
                i += 1;
            }
            '-' => {
                toks.push(Spanned { tok: Tok::Minus, pos });
                i += 1;
            }
            '*' => {
                toks.push(Spanned { tok: Tok::Star, pos });
                i += 1;
            }
            '^' => {
                toks.push(Spanned { tok: Tok::Caret, pos });
                i += 1;
            }
            '(' => {
                toks.push(Spanned { tok: Tok::LParen, pos });
                i += 1;
            }
            ')' => {
                toks.push(Spanned { tok: Tok::RParen, pos });
                i += 1;
            }
            '=' => {
                toks.push(Spanned { tok: Tok::Equals, pos });
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '/' {
                    if i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                        i += 1;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    } else {
                        return Err(ParseError::Syntax {
                            pos: Pos {
                                line,
                                col: col_offset + i + 1,
                            },
                            msg: "expected digits after `/` in rational literal".to_string(),
                        });
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value = parse_rat(&text).ok_or_else(|| ParseError::BadRational {
                    pos,
                    text: text.clone(),
                })?;
                toks.push(Spanned {
                    tok: Tok::Number(value),
                    pos,
                });
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_continue(chars[i]) {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                toks.push(Spanned {
                    tok: Tok::Ident(name),
                    pos,
                });
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(toks)
}

struct ExprParser<'a> {
    toks: &'a [Spanned],
    at: usize,
    names: &'a [String],
    end: Pos,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|s| &s.tok)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|s| s.pos).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<&Spanned> {
        let s = self.toks.get(self.at);
        self.at += 1;
        s
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        let base = self.primary()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let pos = self.pos();
            match self.bump().map(|s| s.tok.clone()) {
                Some(Tok::Number(r)) if r.is_integer() && !num::traits::Signed::is_negative(&r) => {
                    let e = u32::try_from(r.to_integer()).map_err(|_| ParseError::Syntax {
                        pos,
                        msg: "exponent too large".to_string(),
                    })?;
                    return Ok(base.pow(e));
                }
                _ => {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: "`^` needs a nonnegative integer literal".to_string(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Polynomial, ParseError> {
        let pos = self.pos();
        match self.bump().map(|s| s.tok.clone()) {
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let pos = self.pos();
                match self.bump().map(|s| s.tok.clone()) {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(ParseError::Syntax {
                        pos,
                        msg: "expected `)`".to_string(),
                    }),
                }
            }
            Some(Tok::Number(r)) => Ok(Polynomial::constant(r)),
            Some(Tok::Ident(name)) => {
                if name == "x" {
                    return Ok(Polynomial::var(VarId::X));
                }
                match self.names.iter().position(|n| *n == name) {
                    Some(i) => Ok(Polynomial::var(VarId::Y(i as u32 + 1))),
                    None => Err(ParseError::UnknownIdent { pos, name }),
                }
            }
            _ => Err(ParseError::Syntax {
                pos,
                msg: "expected an expression".to_string(),
            }),
        }
    }
}

fn parse_expr_at(
    text: &str,
    names: &[String],
    line: usize,
    col_offset: usize,
) -> Result<(Polynomial, bool), ParseError> {
    let toks = lex(text, line, col_offset)?;
    let end = Pos {
        line,
        col: col_offset + text.chars().count() + 1,
    };
    let mut p = ExprParser {
        toks: &toks,
        at: 0,
        names,
        end,
    };
    let lhs = p.expr()?;
    let (poly, had_equals) = if matches!(p.peek(), Some(Tok::Equals)) {
        p.bump();
        let rhs = p.expr()?;
        (lhs.sub(&rhs), true)
    } else {
        (lhs, false)
    };
    if p.at != toks.len() {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            msg: "unexpected trailing input".to_string(),
        });
    }
    Ok((poly, had_equals))
}

/// Parses one expression over `{x} ∪ names` (no `=` allowed).
pub fn parse_expr(text: &str, names: &[String]) -> Result<Polynomial, ParseError> {
    let toks = lex(text, 1, 0)?;
    let end = Pos {
        line: 1,
        col: text.chars().count() + 1,
    };
    let mut p = ExprParser {
        toks: &toks,
        at: 0,
        names,
        end,
    };
    let poly = p.expr()?;
    if p.at != toks.len() {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            msg: "unexpected trailing input".to_string(),
        });
    }
    Ok(poly)
}

fn split_idents(content: &str, line: usize, col_offset: usize) -> Result<Vec<(String, Pos)>, ParseError> {
    let toks = lex(content, line, col_offset)?;
    let mut out = Vec::new();
    for s in toks {
        match s.tok {
            Tok::Ident(name) => out.push((name, s.pos)),
            _ => {
                return Err(ParseError::Syntax {
                    pos: s.pos,
                    msg: "expected an identifier".to_string(),
                })
            }
        }
    }
    Ok(out)
}

/// Parses a full system document into a `PolySystem`.
pub fn parse_system(text: &str) -> Result<PolySystem, ParseError> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Eqs,
    }

    let mut names: Option<Vec<String>> = None;
    let mut order_spec: Option<(Vec<(String, Pos)>, usize)> = None;
    let mut init_spec: Option<(String, usize, usize)> = None;
    let mut eq_lines: Vec<(String, usize, usize)> = Vec::new();
    let mut seen_eqs = false;
    let mut current = Section::None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let stripped = match raw.find('#') {
            Some(h) => &raw[..h],
            None => raw,
        };
        if stripped.trim().is_empty() {
            continue;
        }
        let trimmed_start = stripped.len() - stripped.trim_start().len();
        let body = stripped.trim_start();

        let header = ["vars:", "order:", "eqs:", "init:"]
            .iter()
            .find(|h| body.starts_with(**h))
            .copied();

        match header {
            Some("vars:") => {
                if names.is_some() {
                    return Err(ParseError::DuplicateSection {
                        name: "vars",
                        line: line_no,
                    });
                }
                let content = &body["vars:".len()..];
                let col = trimmed_start + "vars:".len();
                let idents = split_idents(content, line_no, col)?;
                let mut list = Vec::new();
                for (name, pos) in idents {
                    if name == "x" {
                        return Err(ParseError::ReservedIdent { pos, name });
                    }
                    if list.contains(&name) {
                        return Err(ParseError::DuplicateIdent { pos, name });
                    }
                    list.push(name);
                }
                if list.is_empty() {
                    return Err(ParseError::Arity {
                        what: "declared variables",
                        expected: 1,
                        got: 0,
                    });
                }
                names = Some(list);
                current = Section::None;
            }
            Some("order:") => {
                if order_spec.is_some() {
                    return Err(ParseError::DuplicateSection {
                        name: "order",
                        line: line_no,
                    });
                }
                let content = &body["order:".len()..];
                let col = trimmed_start + "order:".len();
                order_spec = Some((split_idents(content, line_no, col)?, line_no));
                current = Section::None;
            }
            Some("eqs:") => {
                if seen_eqs {
                    return Err(ParseError::DuplicateSection {
                        name: "eqs",
                        line: line_no,
                    });
                }
                seen_eqs = true;
                let content = &body["eqs:".len()..];
                if !content.trim().is_empty() {
                    eq_lines.push((
                        content.to_string(),
                        line_no,
                        trimmed_start + "eqs:".len(),
                    ));
                }
                current = Section::Eqs;
            }
            Some("init:") => {
                if init_spec.is_some() {
                    return Err(ParseError::DuplicateSection {
                        name: "init",
                        line: line_no,
                    });
                }
                let content = &body["init:".len()..];
                init_spec = Some((
                    content.to_string(),
                    line_no,
                    trimmed_start + "init:".len(),
                ));
                current = Section::None;
            }
            _ => match current {
                Section::Eqs => eq_lines.push((body.to_string(), line_no, trimmed_start)),
                Section::None => {
                    return Err(ParseError::Syntax {
                        pos: Pos {
                            line: line_no,
                            col: trimmed_start + 1,
                        },
                        msg: "expected `vars:`, `order:`, `eqs:` or `init:`".to_string(),
                    })
                }
            },
        }
    }

    let names = names.ok_or(ParseError::MissingSection { name: "vars" })?;
    if !seen_eqs {
        return Err(ParseError::MissingSection { name: "eqs" });
    }
    let (init_text, init_line, init_col) =
        init_spec.ok_or(ParseError::MissingSection { name: "init" })?;
    let n = names.len();

    let mut equations = Vec::new();
    for (src, line, col) in &eq_lines {
        let (poly, _) = parse_expr_at(src, &names, *line, *col)?;
        if poly.is_zero() {
            return Err(ParseError::ZeroEquation {
                index: equations.len() + 1,
                line: *line,
            });
        }
        equations.push(poly);
    }
    if equations.len() != n {
        return Err(ParseError::Arity {
            what: "equations",
            expected: n,
            got: equations.len(),
        });
    }

    let mut r0 = Vec::new();
    let mut col = init_col;
    for chunk in init_text.split_whitespace() {
        let found = init_text[col - init_col..].find(chunk).unwrap_or(0);
        let pos = Pos {
            line: init_line,
            col: col + found + 1,
        };
        col += found + chunk.len();
        let value = parse_rat(chunk).ok_or_else(|| ParseError::BadRational {
            pos,
            text: chunk.to_string(),
        })?;
        r0.push(value);
    }
    if r0.len() != n {
        return Err(ParseError::Arity {
            what: "initial values",
            expected: n,
            got: r0.len(),
        });
    }

    let order = match order_spec {
        None => VarOrder::identity(n),
        Some((idents, line)) => {
            let mut perm = Vec::with_capacity(idents.len());
            for (name, pos) in idents {
                match names.iter().position(|v| *v == name) {
                    Some(i) => perm.push(i as u32 + 1),
                    None => return Err(ParseError::UnknownIdent { pos, name }),
                }
            }
            VarOrder::from_permutation(&perm).ok_or_else(|| ParseError::BadOrder {
                line,
                msg: "order must list every declared variable exactly once".to_string(),
            })?
        }
    };

    Ok(PolySystem {
        names,
        equations,
        r0,
        order,
    })
}
