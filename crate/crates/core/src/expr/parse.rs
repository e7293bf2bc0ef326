use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use super::{Expr, Func, Node, Symbol, VarKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at offset {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("implicit multiplication at offset {pos}; write `*` explicitly")]
    ImplicitMultiplication { pos: usize },
    #[error("`{name}` expects {expected} argument(s), got {got} (offset {pos})")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
        pos: usize,
    },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownIdentifier { pos, .. }
            | ParseError::ImplicitMultiplication { pos }
            | ParseError::Arity { pos, .. } => *pos,
        }
    }
}

/// Variables the parser may resolve, with their kinds. `pi` and `I` are
/// always available and cannot be redefined.
#[derive(Clone, Debug, Default)]
pub struct VarRegistry {
    vars: BTreeMap<String, VarKind>,
}

impl VarRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn real(names: &[&str]) -> Self {
        let mut r = Self::new();
        for n in names {
            r.insert(n, VarKind::Real);
        }
        r
    }

    pub fn insert(&mut self, name: &str, kind: VarKind) -> &mut Self {
        assert!(
            name != "pi" && name != "I" && Func::from_name(name).is_none(),
            "`{name}` is reserved"
        );
        self.vars.insert(name.to_string(), kind);
        self
    }

    pub fn with(mut self, name: &str, kind: VarKind) -> Self {
        self.insert(name, kind);
        self
    }

    pub fn get(&self, name: &str) -> Option<VarKind> {
        self.vars.get(name).copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                pos: start,
                msg: format!("malformed number `{text}`"),
            })?;
            out.push((Tok::Num(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => {
                let ch = src[start..].chars().next().unwrap();
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    reg: &'a VarRegistry,
}

/// Parse an infix expression.
///
/// Precedence, loosest first: `+ -`, `* /`, unary `-`, `^` (right
/// associative). Chains of `+`/`-` and of `*` become a single n-ary node; a
/// subtraction is a `Neg` term. Juxtaposition is rejected.
pub fn parse(src: &str, reg: &VarRegistry) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
        reg,
    };
    let e = p.sum()?;
    match p.peek() {
        Tok::End => Ok(e),
        Tok::RParen => Err(p.syntax("unbalanced `)`")),
        _ => Err(p.syntax("unexpected token")),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            msg: msg.to_string(),
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.product()?];
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    terms.push(self.product()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    let t = self.product()?;
                    terms.push(Expr::from_node(Node::Neg(t)));
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    factors.push(self.unary()?);
                }
                Tok::Op('/') => {
                    self.bump();
                    let num = Expr::product(std::mem::take(&mut factors));
                    let den = self.unary()?;
                    factors.push(Expr::from_node(Node::Quotient(num, den)));
                }
                _ => break,
            }
        }
        Ok(Expr::product(factors))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Expr::from_node(Node::Neg(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::from_node(Node::Pow(base, exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        let e = match self.bump() {
            Tok::Num(v) => Expr::constant(v),
            Tok::LParen => {
                let inner = self.sum()?;
                let close = self.pos();
                if self.bump() != Tok::RParen {
                    return Err(ParseError::Syntax {
                        pos: close,
                        msg: "expected `)`".into(),
                    });
                }
                inner
            }
            Tok::Ident(name) => self.identifier(name, pos)?,
            Tok::End => {
                return Err(ParseError::Syntax {
                    pos,
                    msg: "unexpected end of input".into(),
                })
            }
            _ => {
                return Err(ParseError::Syntax {
                    pos,
                    msg: "expected a number, variable, function or `(`".into(),
                })
            }
        };
        if matches!(self.peek(), Tok::Num(_) | Tok::Ident(_) | Tok::LParen) {
            return Err(ParseError::ImplicitMultiplication { pos: self.pos() });
        }
        Ok(e)
    }

    fn identifier(&mut self, name: String, pos: usize) -> Result<Expr, ParseError> {
        if let Some(func) = Func::from_name(&name) {
            if self.peek() != &Tok::LParen {
                return Err(ParseError::Syntax {
                    pos: self.pos(),
                    msg: format!("expected `(` after `{name}`"),
                });
            }
            self.bump();
            let mut args = vec![self.sum()?];
            while self.peek() == &Tok::Comma {
                self.bump();
                args.push(self.sum()?);
            }
            let close = self.pos();
            if self.bump() != Tok::RParen {
                return Err(ParseError::Syntax {
                    pos: close,
                    msg: "expected `)` closing the argument list".into(),
                });
            }
            if args.len() != func.arity() {
                return Err(ParseError::Arity {
                    name,
                    expected: func.arity(),
                    got: args.len(),
                    pos,
                });
            }
            return Ok(Expr::call(func, args));
        }
        match name.as_str() {
            "pi" => Ok(Expr::constant(std::f64::consts::PI)),
            "I" => Ok(Expr::complex_constant(Complex64::new(0.0, 1.0))),
            _ => match self.reg.get(&name) {
                Some(kind) => Ok(Expr::symbol(Symbol::new(&name, kind))),
                None => Err(ParseError::UnknownIdentifier { name, pos }),
            },
        }
    }
}
