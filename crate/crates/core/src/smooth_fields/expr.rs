//! Small arithmetic expression language for model parameters such as
//! `exp(sin(x))` or `z + z^2/2`.

use super::{Jet2, Scalar, ScalarField, Site};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Tan,
    Sqrt,
    Ln,
}

/// Parses `src` with the given coordinate names bound to coordinate indices.
pub fn parse_expr(src: &str, vars: &[&str]) -> Result<Expr> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, pos: 0, vars };
    let e = p.sum()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!("unexpected `{}` in `{src}`", p.tokens[p.pos])));
    }
    Ok(e)
}

impl Expr {
    /// Coordinates the expression depends on.
    pub fn variables(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(i) => out.push(*i),
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Value of a coordinate-free expression.
    pub fn constant_value(&self) -> Option<f64> {
        if !self.variables().is_empty() {
            return None;
        }
        let site = Site::<f64>::new(super::ChartPoint::new(Vec::new()));
        self.eval_jet(&site).ok().map(|j| j.value())
    }

    pub fn eval_jet<T: Scalar>(&self, site: &Site<T>) -> Result<Jet2<T>> {
        Ok(match self {
            Expr::Num(v) => site.constant(T::lit(*v)),
            Expr::Var(i) => {
                if *i >= site.dim() {
                    return Err(Error::DimensionMismatch { expected: i + 1, found: site.dim() });
                }
                site.coordinate(*i)
            }
            Expr::Neg(a) => -a.eval_jet(site)?,
            Expr::Add(a, b) => a.eval_jet(site)? + b.eval_jet(site)?,
            Expr::Sub(a, b) => a.eval_jet(site)? - b.eval_jet(site)?,
            Expr::Mul(a, b) => a.eval_jet(site)? * b.eval_jet(site)?,
            Expr::Div(a, b) => a.eval_jet(site)?.try_div(&b.eval_jet(site)?)?,
            Expr::Pow(a, b) => {
                let base = a.eval_jet(site)?;
                match b.constant_value() {
                    Some(n) if n.fract() == 0.0 && n.abs() <= 64.0 => {
                        if n < 0.0 {
                            base.powi(-(n as i32)).recip()?
                        } else {
                            base.powi(n as i32)
                        }
                    }
                    _ => (b.eval_jet(site)? * base.ln()?).exp(),
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval_jet(site)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.sin().try_div(&x.cos())?,
                    Func::Sqrt => x.sqrt()?,
                    Func::Ln => x.ln()?,
                }
            }
        })
    }

    pub fn to_field<T: Scalar>(&self) -> ScalarField<T> {
        let e = self.clone();
        ScalarField::from_fn(move |site| e.eval_jet(site))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Op(c) => write!(f, "{c}"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}`")))?;
            out.push(Tok::Num(v));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{src}`")));
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek_op() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected `{c}`")))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.product()?;
            lhs = if c == '+' { Expr::Add(lhs.into(), rhs.into()) } else { Expr::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == '*' { Expr::Mul(lhs.into(), rhs.into()) } else { Expr::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(self.unary()?.into()))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    // `^` binds tighter than unary minus and associates to the right.
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(base.into(), exp.into()));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Op('(') => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op(c) => Err(Error::Parse(format!("unexpected `{c}`"))),
            Tok::Ident(name) => {
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::Var(i));
                }
                if name == "pi" {
                    return Ok(Expr::Num(std::f64::consts::PI));
                }
                let f = match name.as_str() {
                    "exp" => Func::Exp,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "tan" => Func::Tan,
                    "sqrt" => Func::Sqrt,
                    "ln" | "log" => Func::Ln,
                    _ => return Err(Error::Parse(format!("unknown name `{name}`"))),
                };
                self.expect('(')?;
                let arg = self.sum()?;
                self.expect(')')?;
                Ok(Expr::Call(f, arg.into()))
            }
        }
    }
}
