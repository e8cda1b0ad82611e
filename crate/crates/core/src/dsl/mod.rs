//! A small expression language for Boolean functions.
//!
//! ```text
//! expr  := or
//! or    := xor ("|" xor)*
//! xor   := and ("^" and)*
//! and   := unary ("&" unary)*
//! unary := "!" unary | atom
//! atom  := "0" | "1" | var | name | name "(" args ")" | "(" expr ")"
//! var   := "x" integer
//! ```
//!
//! Builtins: `parity`, `and`, `or`, `maj` take either one integer (the arity,
//! giving the family on `x0..x{n-1}`) or a list of expressions. `paper_f` is
//! the four-variable base function, bare or applied to four expressions.
//! `compose(outer, inner)` and `iterate(f, k)` elaborate their table
//! arguments in a fresh variable frame.

mod parser;

use std::collections::BTreeSet;
use std::fmt;

pub use parser::{parse, ParseError};

use crate::error::{Error, Result};
use crate::table::{Builtin, TruthTable, MAX_VARS};

/// Byte range `[start, end)` in the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Var(usize),
    Const(bool),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
    Call { name: String, args: Vec<Arg> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Int(u64, Span),
    Expr(Expr),
}

impl Expr {
    /// Copy with every span reset, for structural comparison.
    pub fn without_spans(&self) -> Expr {
        let strip = |e: &Expr| Box::new(e.without_spans());
        let kind = match &self.kind {
            ExprKind::Var(i) => ExprKind::Var(*i),
            ExprKind::Const(b) => ExprKind::Const(*b),
            ExprKind::Not(e) => ExprKind::Not(strip(e)),
            ExprKind::And(a, b) => ExprKind::And(strip(a), strip(b)),
            ExprKind::Or(a, b) => ExprKind::Or(strip(a), strip(b)),
            ExprKind::Xor(a, b) => ExprKind::Xor(strip(a), strip(b)),
            ExprKind::Call { name, args } => ExprKind::Call {
                name: name.clone(),
                args: args
                    .iter()
                    .map(|a| match a {
                        Arg::Int(v, _) => Arg::Int(*v, Span::default()),
                        Arg::Expr(e) => Arg::Expr(e.without_spans()),
                    })
                    .collect(),
            },
        };
        Expr {
            kind,
            span: Span::default(),
        }
    }

    fn precedence(&self) -> u8 {
        match self.kind {
            ExprKind::Or(..) => 1,
            ExprKind::Xor(..) => 2,
            ExprKind::And(..) => 3,
            _ => 4,
        }
    }

    /// Writes `self`, parenthesized if it binds looser than `min`.
    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            write!(f, "(")?;
        }
        match &self.kind {
            ExprKind::Var(i) => write!(f, "x{i}")?,
            ExprKind::Const(b) => write!(f, "{}", u8::from(*b))?,
            ExprKind::Not(e) => {
                write!(f, "!")?;
                e.write_prec(f, 4)?;
            }
            ExprKind::And(a, b) | ExprKind::Or(a, b) | ExprKind::Xor(a, b) => {
                let op = ["", "|", "^", "&"][prec as usize];
                a.write_prec(f, prec)?;
                write!(f, " {op} ")?;
                b.write_prec(f, prec + 1)?;
            }
            ExprKind::Call { name, args } => {
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (k, arg) in args.iter().enumerate() {
                        if k > 0 {
                            write!(f, ", ")?;
                        }
                        match arg {
                            Arg::Int(v, _) => write!(f, "{v}")?,
                            // A bare constant would read back as an integer argument.
                            Arg::Expr(e @ Expr { kind: ExprKind::Const(_), .. }) => write!(f, "({e})")?,
                            Arg::Expr(e) => e.write_prec(f, 1)?,
                        }
                    }
                    write!(f, ")")?;
                }
            }
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 1)
    }
}

/// Expression with every closed sub-table already built.
enum Lowered {
    Var(usize),
    Const(bool),
    Not(Box<Lowered>),
    Bin(BinOp, Box<Lowered>, Box<Lowered>),
    /// A table over `x0..x{m-1}` of the enclosing frame.
    Closed(TruthTable),
    Apply(Builtin, Vec<Lowered>),
}

#[derive(Clone, Copy)]
enum BinOp {
    And,
    Or,
    Xor,
}

fn elab_err(msg: impl Into<String>) -> Error {
    Error::Elaborate(msg.into())
}

fn int_arg(arg: &Arg, what: &str) -> Result<u64> {
    match arg {
        Arg::Int(v, _) => Ok(*v),
        Arg::Expr(_) => Err(elab_err(format!("{what} must be an integer"))),
    }
}

fn expr_arg(arg: &Arg) -> Result<Lowered> {
    match arg {
        Arg::Int(v @ (0 | 1), _) => Ok(Lowered::Const(*v == 1)),
        Arg::Int(v, _) => Err(elab_err(format!("integer {v} where an expression is expected"))),
        Arg::Expr(e) => lower(e),
    }
}

fn table_arg(arg: &Arg) -> Result<TruthTable> {
    match arg {
        Arg::Expr(e) => elaborate(e),
        Arg::Int(..) => Err(elab_err("expected a function expression, found an integer")),
    }
}

fn lower_call(name: &str, args: &[Arg]) -> Result<Lowered> {
    match name {
        "compose" => match args {
            [outer, inner] => Ok(Lowered::Closed(TruthTable::compose(
                &table_arg(outer)?,
                &table_arg(inner)?,
            )?)),
            _ => Err(elab_err("compose takes two function arguments")),
        },
        "iterate" => match args {
            [f, k] => {
                let k = int_arg(k, "iteration count")?;
                let k = u32::try_from(k).map_err(|_| Error::capacity("iteration count too large"))?;
                Ok(Lowered::Closed(TruthTable::iterate(&table_arg(f)?, k)?))
            }
            _ => Err(elab_err("iterate takes a function and an integer")),
        },
        "paper_f" => match args.len() {
            0 => Ok(Lowered::Closed(TruthTable::builtin(Builtin::PaperF, 4)?)),
            4 => Ok(Lowered::Apply(
                Builtin::PaperF,
                args.iter().map(expr_arg).collect::<Result<_>>()?,
            )),
            k => Err(elab_err(format!("paper_f takes 0 or 4 arguments, got {k}"))),
        },
        "parity" | "and" | "or" | "maj" => {
            let family: Builtin = name.parse()?;
            match args {
                [] => Err(elab_err(format!("{name} needs an arity or arguments"))),
                [Arg::Int(n, _)] => {
                    let n = usize::try_from(*n)
                        .ok()
                        .filter(|&n| n <= MAX_VARS)
                        .ok_or_else(|| Error::capacity(format!("{name}({n}) exceeds {MAX_VARS} variables")))?;
                    Ok(Lowered::Closed(TruthTable::builtin(family, n)?))
                }
                _ => {
                    if family == Builtin::Majority && args.len().is_multiple_of(2) {
                        return Err(elab_err("maj needs an odd number of arguments"));
                    }
                    Ok(Lowered::Apply(family, args.iter().map(expr_arg).collect::<Result<_>>()?))
                }
            }
        }
        _ => Err(elab_err(format!("unknown builtin {name:?}"))),
    }
}

fn lower(e: &Expr) -> Result<Lowered> {
    let bin = |op, a: &Expr, b: &Expr| -> Result<Lowered> {
        Ok(Lowered::Bin(op, Box::new(lower(a)?), Box::new(lower(b)?)))
    };
    match &e.kind {
        ExprKind::Var(i) => Ok(Lowered::Var(*i)),
        ExprKind::Const(b) => Ok(Lowered::Const(*b)),
        ExprKind::Not(inner) => Ok(Lowered::Not(Box::new(lower(inner)?))),
        ExprKind::And(a, b) => bin(BinOp::And, a, b),
        ExprKind::Or(a, b) => bin(BinOp::Or, a, b),
        ExprKind::Xor(a, b) => bin(BinOp::Xor, a, b),
        ExprKind::Call { name, args } => lower_call(name, args),
    }
}

fn collect_vars(e: &Lowered, used: &mut BTreeSet<usize>) {
    match e {
        Lowered::Var(i) => {
            used.insert(*i);
        }
        Lowered::Const(_) => {}
        Lowered::Not(a) => collect_vars(a, used),
        Lowered::Bin(_, a, b) => {
            collect_vars(a, used);
            collect_vars(b, used);
        }
        Lowered::Closed(t) => used.extend(0..t.n()),
        Lowered::Apply(_, args) => args.iter().for_each(|a| collect_vars(a, used)),
    }
}

fn zip_words(a: &TruthTable, b: &TruthTable, op: impl Fn(u64, u64) -> u64) -> Result<TruthTable> {
    let words = a.words().iter().zip(b.words()).map(|(&x, &y)| op(x, y)).collect();
    TruthTable::from_words(a.n(), words)
}

fn evaluate(e: &Lowered, n: usize) -> Result<TruthTable> {
    match e {
        Lowered::Var(i) => TruthTable::variable(n, *i),
        Lowered::Const(b) => TruthTable::constant(n, *b),
        Lowered::Not(a) => Ok(evaluate(a, n)?.complement()),
        Lowered::Bin(op, a, b) => {
            let (a, b) = (evaluate(a, n)?, evaluate(b, n)?);
            match op {
                BinOp::And => zip_words(&a, &b, |x, y| x & y),
                BinOp::Or => zip_words(&a, &b, |x, y| x | y),
                BinOp::Xor => zip_words(&a, &b, |x, y| x ^ y),
            }
        }
        Lowered::Closed(t) if t.n() == n => Ok(t.clone()),
        Lowered::Closed(t) => {
            let mask = (1usize << t.n()) - 1;
            TruthTable::from_fn(n, |x| t.bit(x & mask))
        }
        Lowered::Apply(family, args) => {
            let tables = args
                .iter()
                .map(|a| evaluate(a, n))
                .collect::<Result<Vec<_>>>()?;
            let mut buf = vec![false; tables.len()];
            TruthTable::from_fn(n, |x| {
                for (slot, t) in buf.iter_mut().zip(&tables) {
                    *slot = t.bit(x);
                }
                family.apply(&buf)
            })
        }
    }
}

/// Builds the truth table of `expr`. Its variables must be exactly `x0..x{n-1}`.
pub fn elaborate(expr: &Expr) -> Result<TruthTable> {
    let lowered = lower(expr)?;
    let mut used = BTreeSet::new();
    collect_vars(&lowered, &mut used);
    let n = used.last().map_or(1, |&max| max + 1);
    if n > MAX_VARS {
        return Err(Error::capacity(format!(
            "expression uses {n} variables, at most {MAX_VARS} supported"
        )));
    }
    if used.len() != n && !used.is_empty() {
        let missing = (0..n).find(|i| !used.contains(i)).expect("gap exists");
        return Err(elab_err(format!(
            "variables must be contiguous from x0; x{missing} is unused"
        )));
    }
    evaluate(&lowered, n)
}

/// Parses and elaborates in one step.
pub fn compile(src: &str) -> Result<TruthTable> {
    elaborate(&parse(src)?)
}

/// Renders `t` as an XOR of minterms; `compile(render(t)) == t` for every table.
pub fn render_minterms(t: &TruthTable) -> String {
    let n = t.n();
    let all_vars = (0..n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(" & ");
    let minterm = |x: usize| {
        (0..n)
            .map(|i| if x >> i & 1 == 1 { format!("x{i}") } else { format!("!x{i}") })
            .collect::<Vec<_>>()
            .join(" & ")
    };
    // `0 & (x0 & ...)` pins the variable count even when no minterm survives.
    let mut terms = vec![format!("0 & ({all_vars})")];
    terms.extend((0..t.len()).filter(|&x| t.bit(x)).map(|x| format!("({})", minterm(x))));
    terms.join(" ^ ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(i: usize) -> Box<Expr> {
        Box::new(Expr {
            kind: ExprKind::Var(i),
            span: Span::default(),
        })
    }

    fn node(kind: ExprKind) -> Expr {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    fn spans_nest(e: &Expr) -> bool {
        let children: Vec<&Expr> = match &e.kind {
            ExprKind::Not(a) => vec![a],
            ExprKind::And(a, b) | ExprKind::Or(a, b) | ExprKind::Xor(a, b) => vec![a, b],
            ExprKind::Call { args, .. } => args
                .iter()
                .filter_map(|a| match a {
                    Arg::Expr(e) => Some(e),
                    Arg::Int(..) => None,
                })
                .collect(),
            _ => vec![],
        };
        children.iter().all(|c| e.span.contains(&c.span) && spans_nest(c))
    }

    #[test]
    fn parse_xor() {
        let e = parse("x0 ^ x1").unwrap();
        assert_eq!(e.without_spans(), node(ExprKind::Xor(var(0), var(1))));
    }

    #[test]
    fn parse_precedence() {
        let e = parse("!(x0 & x1) | x2").unwrap();
        let expected = node(ExprKind::Or(
            Box::new(node(ExprKind::Not(Box::new(node(ExprKind::And(var(0), var(1))))))),
            var(2),
        ));
        assert_eq!(e.without_spans(), expected);
        let e = parse("x0 | x1 ^ x2 & !x3").unwrap();
        assert_eq!(e.to_string(), "x0 | x1 ^ x2 & !x3");
        assert!(matches!(e.kind, ExprKind::Or(..)));
    }

    #[test]
    fn parse_errors_have_positions() {
        let err = parse("x0 ^^ x1").unwrap_err();
        assert_eq!(err.offset, 3);
        assert_eq!((err.line, err.column), (1, 4));
        let err = parse("x0 &\n  (x1 | )").unwrap_err();
        assert_eq!((err.line, err.column), (2, 9));
        assert!(err.expected.iter().any(|e| e == "variable"));
        let err = parse("(x0").unwrap_err();
        assert_eq!(err.expected, vec!["')'".to_string()]);
        assert!(parse("x0 x1").is_err());
        assert!(parse("2").is_err());
        assert!(parse("").is_err());
        assert!(parse("x0 $ x1").is_err());
    }

    #[test]
    fn spans_cover_source() {
        let src = " maj(x0, x1 & x2, !x3) ^ (x4) ";
        let e = parse(src).unwrap();
        assert_eq!(e.span, Span::new(0, src.len()));
        assert!(spans_nest(&e));
    }

    #[test]
    fn elaborate_basics() {
        let t = compile("x0 ^ x1").unwrap();
        assert_eq!(t, TruthTable::builtin(Builtin::Parity, 2).unwrap());
        assert_eq!(compile("parity(8)").unwrap(), TruthTable::builtin(Builtin::Parity, 8).unwrap());
        assert_eq!(compile("or(2)").unwrap(), TruthTable::builtin(Builtin::Or, 2).unwrap());
        let maj = compile("maj(x0, x1, x2)").unwrap();
        assert_eq!(maj, TruthTable::builtin(Builtin::Majority, 3).unwrap());
        let zero = compile("0").unwrap();
        assert_eq!(zero, TruthTable::constant(1, false).unwrap());
        assert_eq!(compile("x0 & !x0 | 1").unwrap(), TruthTable::constant(1, true).unwrap());
    }

    #[test]
    fn elaborate_paper_family() {
        let f = TruthTable::builtin(Builtin::PaperF, 4).unwrap();
        assert_eq!(compile("paper_f").unwrap(), f);
        let by_formula = compile("x0 & (x1 ^ x2) | !x0 & (x2 ^ x3)").unwrap();
        assert_eq!(by_formula, f);
        assert_eq!(compile("paper_f(x0, x1, x2, x3)").unwrap(), f);
        let f2 = compile("iterate(paper_f, 2)").unwrap();
        assert_eq!(f2, TruthTable::iterate(&f, 2).unwrap());
        assert_eq!(compile("compose(paper_f, paper_f)").unwrap(), f2);
        assert_eq!(
            compile("compose(x0 ^ x1, x0 ^ x1)").unwrap(),
            TruthTable::builtin(Builtin::Parity, 4).unwrap()
        );
    }

    #[test]
    fn elaborate_errors() {
        assert!(matches!(compile("x0 & x2"), Err(Error::Elaborate(_))));
        assert!(matches!(compile("frobnicate(3)"), Err(Error::Elaborate(_))));
        assert!(matches!(compile("x20"), Err(Error::Capacity(_))));
        assert!(matches!(compile("iterate(paper_f, 3)"), Err(Error::Capacity(_))));
        assert!(matches!(compile("parity(21)"), Err(Error::Capacity(_))));
        assert!(compile("maj(x0, x1)").is_err());
        assert!(compile("paper_f(x0)").is_err());
        assert!(compile("iterate(paper_f, x0)").is_err());
        assert!(matches!(compile("x0 ^^ x1"), Err(Error::Parse(_))));
    }

    #[test]
    fn closed_tables_share_the_frame() {
        // parity(2) reads x0, x1; x2 extends the frame.
        let t = compile("parity(2) & x2").unwrap();
        assert_eq!(t.n(), 3);
        for x in 0..8usize {
            assert_eq!(t.bit(x), (x & 3).count_ones() == 1 && x & 4 != 0);
        }
    }

    #[test]
    fn printer_round_trip_examples() {
        for src in [
            "x0 ^ x1",
            "!(x0 & x1) | x2",
            "(x0 | x1) & x2",
            "x0 ^ (x1 ^ x2)",
            "!!x0",
            "parity(3)",
            "and(x0, (1), x1 | x2)",
            "iterate(paper_f, 2)",
            "compose(maj(x0, x1, x2), x0 ^ x1)",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed).unwrap().without_spans(), e.without_spans(), "{src} -> {printed}");
        }
    }

    #[test]
    fn minterm_rendering() {
        for n in 1..=5 {
            let t = TruthTable::random(n, 70 + n as u64).unwrap();
            assert_eq!(compile(&render_minterms(&t)).unwrap(), t);
        }
        let zero = TruthTable::constant(3, false).unwrap();
        assert_eq!(compile(&render_minterms(&zero)).unwrap(), zero);
    }
}
