//! Lexer and recursive-descent parser for expressions and script commands.
//!
//! ```text
//! command := "let" NAME "=" expr | "assert_eq" pair | "assert_zero" expr
//!          | "assert_close" NUMBER pair | ":dim" INT | expr
//! pair    := expr ","? expr
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "^" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("**" INT)?
//! atom    := INT | REAL | "i" | NAME | NAME "(" args ")" | "V" "[" args "]"
//!          | "(" expr ")" | "(" expr "," args ")"
//! ```
//!
//! `*` and `^` are the same product; wedges of functions commute.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

/// Byte range inside one line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

/// A diagnostic anchored in a line of input.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct Diagnostic {
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn at(text: &str, line: usize, span: Span, message: impl Into<String>) -> Self {
        let column = text.get(..span.start).map_or(1, |s| s.chars().count() + 1);
        Diagnostic { line, column, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Real(f64),
    Ident(String),
    Colon,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Plus,
    Minus,
    Star,
    StarStar,
    Caret,
    Slash,
    Equals,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Real(x) => write!(f, "`{x}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::StarStar => write!(f, "`**`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Equals => write!(f, "`=`"),
            Tok::End => write!(f, "end of line"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, (Span, String)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b',' => Some(Tok::Comma),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'^' => Some(Tok::Caret),
            b'/' => Some(Tok::Slash),
            b'=' => Some(Tok::Equals),
            b':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, Span { start, end: i + 1 }));
            i += 1;
            continue;
        }
        if c == b'*' {
            if bytes.get(i + 1) == Some(&b'*') {
                out.push((Tok::StarStar, Span { start, end: i + 2 }));
                i += 2;
            } else {
                out.push((Tok::Star, Span { start, end: i + 1 }));
                i += 1;
            }
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut real = false;
            if i < bytes.len() && bytes[i] == b'.' {
                real = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    real = true;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s = &text[start..i];
            let span = Span { start, end: i };
            let tok = if real {
                Tok::Real(s.parse().map_err(|_| (span, format!("bad number `{s}`")))?)
            } else {
                Tok::Int(s.parse().expect("digits"))
            };
            out.push((tok, span));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), Span { start, end: i }));
            continue;
        }
        let ch = text[i..].chars().next().expect("in bounds");
        return Err((Span { start, end: i + ch.len_utf8() }, format!("unexpected character `{ch}`")));
    }
    out.push((Tok::End, Span { start: text.len(), end: text.len() }));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    /// `*` or `^`.
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Int(BigInt),
    Real(f64),
    /// The imaginary unit.
    Imag,
    /// `t{j+1}`.
    Var(usize),
    Name(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(String, Vec<Expr>),
    Tuple(Vec<Expr>),
    Variety(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Let(String, Expr),
    Eval(Expr),
    AssertEq(Expr, Expr),
    AssertZero(Expr),
    AssertClose(f64, Expr, Expr),
    Dim(usize),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Let(..) => "let",
            Command::Eval(_) => "eval",
            Command::AssertEq(..) => "assert_eq",
            Command::AssertZero(_) => "assert_zero",
            Command::AssertClose(..) => "assert_close",
            Command::Dim(_) => "dim",
        }
    }
}

/// `t7` ↦ `6`.
fn coordinate(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('t')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse::<usize>().ok().map(|j| j - 1)
}

const KEYWORDS: [&str; 5] = ["let", "assert_eq", "assert_zero", "assert_close", "i"];

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

type PResult<T> = Result<T, (Span, String)>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    /// Two operands, optionally separated by a comma. Without the comma a
    /// leading minus on the second operand reads as subtraction.
    fn pair(&mut self, cmd: &str) -> PResult<(Expr, Expr)> {
        let a = self.expr()?;
        if *self.peek() == Tok::Comma {
            self.bump();
        }
        if *self.peek() == Tok::End {
            return Err((self.span(), format!("{cmd} takes two expressions")));
        }
        Ok((a, self.expr()?))
    }

    fn expect(&mut self, want: Tok) -> PResult<Span> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err((self.span(), format!("expected {want}, found {}", self.peek())))
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr { kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star | Tok::Caret => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr { kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            let start = self.bump().1;
            let inner = self.unary()?;
            let span = start.join(inner.span);
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), span });
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.atom()?;
        if *self.peek() != Tok::StarStar {
            return Ok(base);
        }
        self.bump();
        let (tok, span) = self.bump();
        let Tok::Int(n) = tok else {
            return Err((span, format!("expected an integer exponent, found {tok}")));
        };
        let e: u32 = n.try_into().map_err(|_| (span, "exponent too large".to_string()))?;
        let span = base.span.join(span);
        Ok(Expr { kind: ExprKind::Pow(Box::new(base), e), span })
    }

    fn args(&mut self, close: Tok) -> PResult<(Vec<Expr>, Span)> {
        let mut out = Vec::new();
        if *self.peek() == close {
            return Ok((out, self.bump().1));
        }
        loop {
            out.push(self.expr()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                t if *t == close => return Ok((out, self.bump().1)),
                t => return Err((self.span(), format!("expected `,` or {close}, found {t}"))),
            }
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        let (tok, span) = self.bump();
        let kind = match tok {
            Tok::Int(n) => ExprKind::Int(n),
            Tok::Real(x) => ExprKind::Real(x),
            Tok::LParen => {
                let (mut items, close) = self.args(Tok::RParen)?;
                let span = span.join(close);
                return match items.len() {
                    0 => Err((span, "empty parentheses".into())),
                    1 => {
                        let mut e = items.pop().expect("one item");
                        e.span = span;
                        Ok(e)
                    }
                    _ => Ok(Expr { kind: ExprKind::Tuple(items), span }),
                };
            }
            Tok::Ident(name) => {
                if name == "i" {
                    ExprKind::Imag
                } else if name == "V" && *self.peek() == Tok::LBracket {
                    self.bump();
                    let (items, close) = self.args(Tok::RBracket)?;
                    return Ok(Expr { kind: ExprKind::Variety(items), span: span.join(close) });
                } else if *self.peek() == Tok::LParen {
                    self.bump();
                    let (items, close) = self.args(Tok::RParen)?;
                    return Ok(Expr { kind: ExprKind::Call(name, items), span: span.join(close) });
                } else if let Some(j) = coordinate(&name) {
                    ExprKind::Var(j)
                } else if KEYWORDS.contains(&name.as_str()) {
                    return Err((span, format!("`{name}` is a keyword")));
                } else {
                    ExprKind::Name(name)
                }
            }
            t => return Err((span, format!("expected an expression, found {t}"))),
        };
        Ok(Expr { kind, span })
    }
}

fn finish<T>(p: &mut Parser, value: T) -> PResult<T> {
    if *p.peek() == Tok::End {
        Ok(value)
    } else {
        Err((p.span(), format!("unexpected {} after the end of the command", p.peek())))
    }
}

fn parse_command_inner(text: &str) -> PResult<Option<Command>> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let cmd = match p.peek().clone() {
        Tok::End => return Ok(None),
        Tok::Colon => {
            p.bump();
            let (tok, span) = p.bump();
            if tok != Tok::Ident("dim".into()) {
                return Err((span, format!("unknown directive {tok}")));
            }
            let (tok, span) = p.bump();
            let Tok::Int(n) = tok else { return Err((span, format!("expected a dimension, found {tok}"))) };
            Command::Dim(n.try_into().map_err(|_| (span, "dimension too large".to_string()))?)
        }
        Tok::Ident(k) if k == "let" => {
            p.bump();
            let (tok, span) = p.bump();
            let name = match tok {
                Tok::Ident(n) if coordinate(&n).is_none() && !KEYWORDS.contains(&n.as_str()) && n != "V" => n,
                t => return Err((span, format!("expected a name to bind, found {t}"))),
            };
            p.expect(Tok::Equals)?;
            Command::Let(name, p.expr()?)
        }
        Tok::Ident(k) if k == "assert_eq" => {
            p.bump();
            let (a, b) = p.pair("assert_eq")?;
            Command::AssertEq(a, b)
        }
        Tok::Ident(k) if k == "assert_zero" => {
            p.bump();
            Command::AssertZero(p.expr()?)
        }
        Tok::Ident(k) if k == "assert_close" => {
            p.bump();
            let (tok, span) = p.bump();
            let tol = match tok {
                Tok::Real(x) => x,
                Tok::Int(n) => n.to_string().parse().expect("integer"),
                t => return Err((span, format!("expected a tolerance, found {t}"))),
            };
            let (a, b) = p.pair("assert_close")?;
            Command::AssertClose(tol, a, b)
        }
        _ => Command::Eval(p.expr()?),
    };
    finish(&mut p, cmd).map(Some)
}

/// Strips a `#` comment.
pub fn strip_comment(text: &str) -> &str {
    text.split('#').next().unwrap_or("")
}

/// Parses one line; `None` for blank and comment lines.
pub fn parse_command(text: &str, line: usize) -> Result<Option<Command>, Diagnostic> {
    let body = strip_comment(text);
    parse_command_inner(body).map_err(|(span, msg)| Diagnostic::at(body, line, span, msg))
}

/// Parses a single expression.
pub fn parse_expr(text: &str) -> Result<Expr, Diagnostic> {
    let run = || -> PResult<Expr> {
        let toks = lex(text)?;
        let mut p = Parser { toks, pos: 0 };
        let e = p.expr()?;
        finish(&mut p, e)
    };
    run().map_err(|(span, msg)| Diagnostic::at(text, 1, span, msg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse_expr("-3/2*t1**2 + d(t1)^pv(t2,1)").unwrap();
        let ExprKind::Bin(BinOp::Add, lhs, rhs) = e.kind else { panic!("{e:?}") };
        assert!(matches!(lhs.kind, ExprKind::Bin(BinOp::Mul, _, _)));
        assert!(matches!(rhs.kind, ExprKind::Bin(BinOp::Mul, _, _)));
    }

    #[test]
    fn tuples_varieties_and_numbers() {
        let e = parse_expr("bm((t1,t2), psi)").unwrap();
        let ExprKind::Call(name, args) = e.kind else { panic!() };
        assert_eq!(name, "bm");
        assert!(matches!(args[0].kind, ExprKind::Tuple(ref v) if v.len() == 2));
        assert!(matches!(parse_expr("V[t1, t1*t2]").unwrap().kind, ExprKind::Variety(ref v) if v.len() == 2));
        assert_eq!(parse_expr("1e-2").unwrap().kind, ExprKind::Real(0.01));
        assert_eq!(parse_expr("(1+2*i)").unwrap().span, Span { start: 0, end: 7 });
    }

    #[test]
    fn commands() {
        assert_eq!(parse_command("  # note", 1).unwrap(), None);
        let c = parse_command("assert_eq dbar(dbar(x)) 0", 1).unwrap().unwrap();
        assert!(matches!(c, Command::AssertEq(..)));
        let c = parse_command("assert_close 1e-2 pair(x, psi) bm((t1,t2), psi)", 1).unwrap().unwrap();
        assert!(matches!(c, Command::AssertClose(t, ..) if t == 0.01));
        assert_eq!(parse_command(":dim 3", 1).unwrap(), Some(Command::Dim(3)));
        assert!(matches!(parse_command("let x = rand()", 1).unwrap(), Some(Command::Let(ref n, _)) if n == "x"));
        let Some(Command::AssertEq(_, b)) = parse_command("assert_eq x, -y", 1).unwrap() else { panic!() };
        assert!(matches!(b.kind, ExprKind::Neg(_)));
        let Some(Command::AssertEq(a, _)) = parse_command("assert_eq x -y 0", 1).unwrap() else { panic!() };
        assert!(matches!(a.kind, ExprKind::Bin(BinOp::Sub, ..)));
        assert_eq!(parse_command("assert_eq x", 1).unwrap_err().message, "assert_eq takes two expressions");
    }

    #[test]
    fn diagnostics_carry_line_and_column() {
        let err = parse_command("let x = dbar(pv(t1,1)", 3).unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.column, 22);
        let err = parse_command("x $ y", 7).unwrap_err();
        assert_eq!((err.line, err.column), (7, 3));
        assert!(parse_command("let t1 = 2", 1).is_err());
        assert!(parse_command("t1**x", 1).is_err());
    }
}
