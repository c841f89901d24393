//! Field expression language.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' unary)?
//! atom  := number | x1..x9 | func '(' expr ')' | '(' expr ')'
//! func  := exp | abs | tanh | sin | cos | sqrt
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so
//! `-x1^2` is `-(x1^2)` and `2^3^2` is `2^(3^2)`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Abs,
    Tanh,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "tanh" => Func::Tanh,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Tanh => "tanh",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Abs => v.abs(),
            Func::Tanh => v.tanh(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Sqrt => v.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Parsed expression tree. Variables are stored 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Neg(e) => -e.eval(x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
            Expr::Call(f, e) => f.apply(e.eval(x)),
        }
    }

    /// True if any subexpression applies `abs`.
    pub fn uses_abs(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Var(_) => false,
            Expr::Neg(e) => e.uses_abs(),
            Expr::Bin(_, a, b) => a.uses_abs() || b.uses_abs(),
            Expr::Call(f, e) => *f == Func::Abs || e.uses_abs(),
        }
    }

    /// Largest variable index used, 1-based; 0 when the expression is constant.
    pub fn max_variable(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(e) | Expr::Call(_, e) => e.max_variable(),
            Expr::Bin(_, a, b) => a.max_variable().max(b.max_variable()),
        }
    }
}

// Integer exponents go through powi so that e.g. (-2)^3 = -8 rather than NaN.
fn pow(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

/// Fully parenthesized output that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => {
                write!(f, "(-{:?})", -v)
            }
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a}{}{b})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        while let Some(t) = lx.next_token()? {
            out.push(t);
        }
        Ok(out)
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn next_token(&mut self) -> Result<Option<(usize, Tok)>> {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let tok = match c {
            b'0'..=b'9' | b'.' => self.number()?,
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(c as char)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b',' => {
                self.pos += 1;
                Tok::Comma
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        Ok(Some((start, tok)))
    }

    fn number(&mut self) -> Result<Tok> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let digits = |lx: &mut Self| {
            let s = lx.pos;
            while matches!(lx.peek(), Some(b'0'..=b'9')) {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let mut n = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(syntax(start, "malformed number".into()));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mut look = self.pos + 1;
            if matches!(bytes.get(look), Some(b'+' | b'-')) {
                look += 1;
            }
            if matches!(bytes.get(look), Some(b'0'..=b'9')) {
                self.pos = look;
                digits(self);
            }
        }
        let text = &self.src[start..self.pos];
        let v: f64 = text
            .parse()
            .map_err(|_| syntax(start, format!("malformed number `{text}`")))?;
        if !v.is_finite() {
            return Err(syntax(start, format!("number `{text}` is out of range")));
        }
        Ok(Tok::Num(v))
    }
}

fn syntax(offset: usize, message: String) -> Error {
    Error::Syntax { offset, message }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn expect_end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(syntax(self.offset(), format!("unexpected {}", describe(t)))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.close_paren()?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.ident(name, offset),
            Some(t) => Err(syntax(offset, format!("unexpected {}", describe(&t)))),
            None => Err(syntax(offset, "unexpected end of input".into())),
        }
    }

    fn close_paren(&mut self) -> Result<()> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::RParen) => Ok(()),
            Some(t) => Err(syntax(
                offset,
                format!("expected `)`, found {}", describe(&t)),
            )),
            None => Err(syntax(offset, "expected `)`, found end of input".into())),
        }
    }

    fn ident(&mut self, name: String, offset: usize) -> Result<Expr> {
        if let Some(func) = Func::from_name(&name) {
            let open = self.offset();
            if self.bump() != Some(Tok::LParen) {
                return Err(syntax(open, format!("expected `(` after `{name}`")));
            }
            if let Some(Tok::RParen) = self.peek() {
                return Err(Error::Arity {
                    name,
                    expected: 1,
                    found: 0,
                    offset,
                });
            }
            let arg = self.expr()?;
            let mut found = 1;
            while let Some(Tok::Comma) = self.peek() {
                self.bump();
                self.expr()?;
                found += 1;
            }
            if found != 1 {
                return Err(Error::Arity {
                    name,
                    expected: 1,
                    found,
                    offset,
                });
            }
            self.close_paren()?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        let bytes = name.as_bytes();
        if bytes.len() == 2 && bytes[0] == b'x' && (b'1'..=b'9').contains(&bytes[1]) {
            let index = (bytes[1] - b'0') as usize;
            if index > self.dim {
                return Err(Error::VariableOutOfRange {
                    index,
                    dim: self.dim,
                    offset,
                });
            }
            return Ok(Expr::Var(index - 1));
        }
        Err(syntax(offset, format!("unknown identifier `{name}`")))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
    }
}

/// Parses `src` as a field on ℝ^`dim`.
pub fn parse(src: &str, dim: usize) -> Result<Expr> {
    let toks = Lexer::tokens(src)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: src.len(),
        dim,
    };
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval(src: &str, dim: usize, x: &[f64]) -> f64 {
        parse(src, dim).unwrap().eval(x)
    }

    #[test]
    fn evaluates_documented_examples() {
        assert_eq!(eval("exp(-x1^2)", 1, &[0.0]), 1.0);
        assert_eq!(eval("abs(x1)+0.5*x2^2", 2, &[1.0, 2.0]), 3.0);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("-x1^2", 1, &[3.0]), -9.0);
        assert_eq!(eval("2^3^2", 1, &[0.0]), 512.0);
        assert_eq!(eval("1-2-3", 1, &[0.0]), -4.0);
        assert_eq!(eval("8/4/2", 1, &[0.0]), 1.0);
        assert_eq!(eval("1+2*3", 1, &[0.0]), 7.0);
        assert_eq!(eval("(1+2)*3", 1, &[0.0]), 9.0);
        assert_eq!(eval("2^-1", 1, &[0.0]), 0.5);
        assert_eq!(eval("(-2)^3", 1, &[0.0]), -8.0);
        assert_eq!(eval("--x1", 1, &[2.5]), 2.5);
        assert_eq!(eval("1.5e2 + .5 + 2E-1", 1, &[0.0]), 150.7);
        assert_eq!(eval("sqrt(x1) * cos(0) + sin(0) + tanh(0)", 1, &[4.0]), 2.0);
    }

    #[test]
    fn syntax_error_offsets() {
        match parse("x1*", 1) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse("x1 + )", 1) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse("(x1", 1) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse("x1 $ 2", 1) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse("log(x1)", 1) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("x0", 1), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse("x1 x1", 1),
            Err(Error::Syntax { offset: 3, .. })
        ));
        assert!(matches!(parse("", 1), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("1e999", 1), Err(Error::Syntax { .. })));
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(
            parse("exp(x1, 2)", 1),
            Err(Error::Arity {
                expected: 1,
                found: 2,
                offset: 0,
                ..
            })
        ));
        assert!(matches!(
            parse("1 + sin()", 1),
            Err(Error::Arity {
                found: 0,
                offset: 4,
                ..
            })
        ));
    }

    #[test]
    fn variable_range() {
        assert!(matches!(
            parse("x1 + x3", 2),
            Err(Error::VariableOutOfRange {
                index: 3,
                dim: 2,
                offset: 5
            })
        ));
        assert_eq!(parse("x2", 2).unwrap().max_variable(), 2);
        assert_eq!(parse("3", 2).unwrap().max_variable(), 0);
    }

    #[test]
    fn abs_detection() {
        assert!(parse("1 + exp(abs(x1))", 1).unwrap().uses_abs());
        assert!(!parse("exp(-x1^2)", 1).unwrap().uses_abs());
    }

    #[test]
    fn display_of_negative_literal_reparses() {
        let e = Expr::Bin(
            BinOp::Mul,
            Box::new(Expr::Num(-2.5)),
            Box::new(Expr::Var(0)),
        );
        let back = parse(&e.to_string(), 1).unwrap();
        assert_eq!(back.eval(&[2.0]), -5.0);
    }

    const SOURCES: &[&str] = &[
        "exp(-x1^2)",
        "abs(x1)+0.5*x2^2",
        "tanh(3*x1 - x2) / (1 + x3^2)",
        "-x1^2^0.5 + sqrt(1 + x2*x2) - cos(x3)",
        "2^-x1 * sin(x2) - -x3",
        "1e-3 * x1 - 4.25e+1 / (2 + abs(x2))",
    ];

    proptest! {
        #[test]
        fn serialized_form_reparses_to_same_evaluator(
            which in 0..SOURCES.len(),
            x in prop::array::uniform3(-3.0f64..3.0),
        ) {
            let e = parse(SOURCES[which], 3).unwrap();
            let printed = e.to_string();
            let again = parse(&printed, 3).unwrap();
            prop_assert_eq!(&again, &e);
            let (a, b) = (e.eval(&x), again.eval(&x));
            prop_assert!(a == b || (a.is_nan() && b.is_nan()));
        }
    }
}
