use std::fmt;

use thiserror::Error;

use super::{Arg, Expr, ExprKind, Span};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset of the offending token.
    pub offset: usize,
    /// 1-based line.
    pub line: usize,
    /// 1-based column, counted in characters.
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at line {}, column {}: expected {}, found {}",
            self.line,
            self.column,
            self.expected.join(" or "),
            self.found
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Var(usize),
    Int(u64),
    Ident(String),
    Not,
    And,
    Or,
    Xor,
    LParen,
    RParen,
    Comma,
    Eof,
    Bad(char),
    /// A doubled binary operator such as `^^` or `&&`.
    BadOp(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Var(i) => format!("variable x{i}"),
            Tok::Int(v) => format!("integer {v}"),
            Tok::Ident(s) => format!("name {s:?}"),
            Tok::Not => "'!'".into(),
            Tok::And => "'&'".into(),
            Tok::Or => "'|'".into(),
            Tok::Xor => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Eof => "end of input".into(),
            Tok::Bad(c) => format!("character {c:?}"),
            Tok::BadOp(op) => format!("operator {op:?}"),
        }
    }
}

fn lex(src: &str) -> Vec<(Tok, Span)> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if matches!(c, b'&' | b'|' | b'^') && bytes.get(i + 1) == Some(&c) {
            while i < bytes.len() && bytes[i] == c {
                i += 1;
            }
            out.push((Tok::BadOp(src[start..i].to_string()), Span::new(start, i)));
            continue;
        }
        let single = match c {
            b'!' => Some(Tok::Not),
            b'&' => Some(Tok::And),
            b'|' => Some(Tok::Or),
            b'^' => Some(Tok::Xor),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, Span::new(start, start + 1)));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let tok = src[start..i].parse().map_or(Tok::Bad(c as char), Tok::Int);
            out.push((tok, Span::new(start, i)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &src[start..i];
            let tok = match word.strip_prefix('x') {
                Some(digits) if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => {
                    digits.parse().map_or(Tok::Bad('x'), Tok::Var)
                }
                _ => Tok::Ident(word.to_string()),
            };
            out.push((tok, Span::new(start, i)));
            continue;
        }
        let ch = src[start..].chars().next().expect("in bounds");
        out.push((Tok::Bad(ch), Span::new(start, start + ch.len_utf8())));
        i += ch.len_utf8();
    }
    out.push((Tok::Eof, Span::new(src.len(), src.len())));
    out
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

const ATOM_START: [&str; 6] = ["'!'", "'('", "'0'", "'1'", "variable", "name"];

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        &self.toks[(self.pos + ahead).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let tok = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let offset = self.span().start;
        let before = &self.src[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError {
            offset,
            line,
            column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, label: &str) -> Result<Span, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.error(&[label]))
        }
    }

    fn binary(
        &mut self,
        op: Tok,
        next: fn(&mut Self) -> Result<Expr, ParseError>,
        build: fn(Box<Expr>, Box<Expr>) -> ExprKind,
    ) -> Result<Expr, ParseError> {
        let mut lhs = next(self)?;
        while *self.peek() == op {
            self.bump();
            let rhs = next(self)?;
            let span = Span::new(lhs.span.start, rhs.span.end);
            lhs = Expr {
                kind: build(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        self.binary(Tok::Or, Self::xor, ExprKind::Or)
    }

    fn xor(&mut self) -> Result<Expr, ParseError> {
        self.binary(Tok::Xor, Self::and, ExprKind::Xor)
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        self.binary(Tok::And, Self::unary, ExprKind::And)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Not {
            let start = self.bump().1.start;
            let inner = self.unary()?;
            let span = Span::new(start, inner.span.end);
            return Ok(Expr {
                kind: ExprKind::Not(Box::new(inner)),
                span,
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(v @ (0 | 1)) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Const(v == 1),
                    span,
                })
            }
            Tok::Var(i) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Var(i),
                    span,
                })
            }
            Tok::LParen => {
                self.bump();
                let mut inner = self.or()?;
                let close = self.expect(Tok::RParen, "')'")?;
                inner.span = Span::new(span.start, close.end);
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Ok(Expr {
                        kind: ExprKind::Call { name, args: Vec::new() },
                        span,
                    });
                }
                self.bump();
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        args.push(self.arg()?);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                let close = self.expect(Tok::RParen, "')'")?;
                Ok(Expr {
                    kind: ExprKind::Call { name, args },
                    span: Span::new(span.start, close.end),
                })
            }
            _ => Err(self.error(&ATOM_START)),
        }
    }

    /// A bare integer followed by `,` or `)` is an integer argument; anything else is an expression.
    fn arg(&mut self) -> Result<Arg, ParseError> {
        if let Tok::Int(v) = *self.peek() {
            if matches!(self.peek_at(1), Tok::Comma | Tok::RParen) {
                let span = self.bump().1;
                return Ok(Arg::Int(v, span));
            }
        }
        Ok(Arg::Expr(self.or()?))
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        src,
        toks: lex(src),
        pos: 0,
    };
    let mut expr = parser.or()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error(&["'|'", "'^'", "'&'", "end of input"]));
    }
    expr.span = Span::new(0, src.len());
    Ok(expr)
}
