//! A small arithmetic grammar for user-supplied functions of `t`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 't' | ('log' | 'exp' | 'sqrt') '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right associative and binds tighter than unary minus, so `-t^2`
//! reads as `-(t^2)`.

use std::fmt;

use super::jet::{DomainFault, Taylor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Log,
    Exp,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Parsed function expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// True when the expression does not mention `t`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub(crate) fn taylor(&self, t: f64) -> std::result::Result<Taylor, DomainFault> {
        Ok(match self {
            Expr::Num(v) => Taylor::constant(*v),
            Expr::Var => Taylor::variable(t),
            Expr::Neg(a) => -a.taylor(t)?,
            Expr::Add(a, b) => a.taylor(t)? + b.taylor(t)?,
            Expr::Sub(a, b) => a.taylor(t)? - b.taylor(t)?,
            Expr::Mul(a, b) => a.taylor(t)? * b.taylor(t)?,
            Expr::Div(a, b) => a.taylor(t)?.div(&b.taylor(t)?)?,
            Expr::Pow(a, b) => {
                let base = a.taylor(t)?;
                if b.is_constant() {
                    base.powf(b.taylor(t)?.value())?
                } else {
                    base.pow(&b.taylor(t)?)?
                }
            }
            Expr::Call(Func::Log, a) => a.taylor(t)?.ln()?,
            Expr::Call(Func::Exp, a) => a.taylor(t)?.exp(),
            Expr::Call(Func::Sqrt, a) => a.taylor(t)?.sqrt()?,
        })
    }

    /// Plain value at `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.taylor(t).map(|s| s.value()).map_err(|fault| Error::Domain {
            function: format!("{} in `{self}`", fault.op),
            value: fault.at,
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var | Expr::Call(..) => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Canonical form: minimal parentheses, spaces around `+` and `-` only.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => f.write_str("t"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                write_operand(f, b, 3)
            }
            Expr::Pow(a, b) => {
                write_operand(f, a, 5)?;
                f.write_str("^")?;
                write_operand(f, b, 3)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (at, tok) = lx.next()?;
            let end = tok == Tok::End;
            out.push((at, tok));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next(&mut self) -> Result<(usize, Tok)> {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += self.peek().map_or(0, char::len_utf8);
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((start, Tok::End));
        };
        if c.is_ascii_digit() || c == '.' {
            return self.number(start).map(|n| (start, Tok::Num(n)));
        }
        if c.is_ascii_alphabetic() {
            while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                self.pos += 1;
            }
            return Ok((start, Tok::Ident(self.src[start..self.pos].to_string())));
        }
        if "+-*/^()".contains(c) {
            self.pos += 1;
            return Ok((start, Tok::Op(c)));
        }
        Err(Error::Parse {
            offset: start,
            message: format!("unexpected character `{c}`"),
        })
    }

    fn number(&mut self, start: usize) -> Result<f64> {
        let bytes = self.src.as_bytes();
        let digits = |lx: &mut Self| {
            let from = lx.pos;
            while lx.pos < bytes.len() && bytes[lx.pos].is_ascii_digit() {
                lx.pos += 1;
            }
            lx.pos - from
        };
        let mut count = digits(self);
        if self.pos < bytes.len() && bytes[self.pos] == b'.' {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return Err(Error::Parse {
                offset: start,
                message: "malformed number".into(),
            });
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < bytes.len() && (bytes[self.pos] == b'+' || bytes[self.pos] == b'-') {
                self.pos += 1;
            }
            if digits(self) == 0 {
                // not an exponent; leave `e` to the identifier lexer
                self.pos = save;
            }
        }
        self.src[start..self.pos].parse().map_err(|_| Error::Parse {
            offset: start,
            message: "malformed number".into(),
        })
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].1
    }

    fn offset(&self) -> usize {
        self.toks[self.i].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].1.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Op('(') => {
                self.bump();
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "t" => {
                        self.bump();
                        return Ok(Expr::Var);
                    }
                    "log" => Func::Log,
                    "exp" => Func::Exp,
                    "sqrt" => Func::Sqrt,
                    other => return self.fail(format!("unknown identifier `{other}`")),
                };
                self.bump();
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Tok::End => self.fail("unexpected end of input"),
            Tok::Op(c) => self.fail(format!("unexpected `{c}`")),
        }
    }
}

/// Parses an expression in the variable `t`.
pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: Lexer::tokens(src)?,
        i: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn jet(src: &str, t: f64) -> [f64; 4] {
        parse(src).unwrap().taylor(t).unwrap().jet().unwrap().as_array()
    }

    #[test]
    fn t_log_t_against_hand_derivatives() {
        let [v, d1, d2, d3] = jet("t*log(t)", 2.0);
        let l2 = 2f64.ln();
        assert!((v - 2.0 * l2).abs() < 1e-15);
        assert!((v - 1.386294).abs() < 1e-6);
        assert!((d1 - (l2 + 1.0)).abs() < 1e-15);
        assert!((d2 - 0.5).abs() < 1e-15);
        assert!((d3 + 0.25).abs() < 1e-15);
    }

    #[test]
    fn polynomial_jet() {
        assert_eq!(jet("t^2", 3.0), [9.0, 6.0, 2.0, 0.0]);
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        match parse("log(t") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors() {
        for bad in ["", "t +", "2 ** t", "foo(t)", "t t", "(t", "t)", "1.e", "$"] {
            assert!(matches!(parse(bad), Err(Error::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("-t^2").unwrap().eval(3.0).unwrap(), -9.0);
        assert_eq!(parse("2^3^2").unwrap().eval(1.0).unwrap(), 512.0);
        assert_eq!(parse("8/4/2").unwrap().eval(1.0).unwrap(), 1.0);
        assert_eq!(parse("1 - 2 - 3").unwrap().eval(1.0).unwrap(), -4.0);
        assert_eq!(parse("2*t^-1").unwrap().eval(4.0).unwrap(), 0.5);
        assert_eq!(parse("1.5e1 + t").unwrap().eval(1.0).unwrap(), 16.0);
    }

    #[test]
    fn domain_errors_are_lazy() {
        let e = parse("log(t - 1)").unwrap();
        assert!(e.eval(2.0).is_ok());
        assert!(matches!(e.eval(0.5), Err(Error::Domain { .. })));
        assert!(matches!(parse("1/(t - 1)").unwrap().eval(1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn canonical_strings() {
        assert_eq!(parse("t * log( t )").unwrap().to_string(), "t*log(t)");
        assert_eq!(parse("(t-(1+t))").unwrap().to_string(), "t - (1 + t)");
        assert_eq!(parse("(t^2)^0.5").unwrap().to_string(), "(t^2)^0.5");
        assert_eq!(parse("-(t+1)*2").unwrap().to_string(), "-(t + 1)*2");
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..1000, 0u32..4).prop_map(|(m, e)| Expr::Num(m as f64 / 10f64.powi(e as i32))),
            Just(Expr::Var),
        ];
        leaf.prop_recursive(5, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Pow(Box::new(a), Box::new(b))),
                inner.clone().prop_map(|a| Expr::Call(Func::Log, Box::new(a))),
                inner.prop_map(|a| Expr::Call(Func::Exp, Box::new(a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn canonical_form_round_trips(e in arb_expr()) {
            let s = e.to_string();
            let back = parse(&s).unwrap();
            prop_assert_eq!(&back, &e);
            prop_assert_eq!(back.to_string(), s);
        }
    }
}
