//! Expression language for user-supplied `phi(t, s)`, `u(a)` and `v(a)`.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-'? atom
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! The tree keeps parentheses and literal text, so printing a parsed
//! expression gives back the source with whitespace removed.

use std::fmt;

use crate::error::{Error, Result};
use crate::jetcalc::{BivariateFn, Jet2, Scalar};
use crate::normalform::Profile;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply<S: Scalar>(self, x: S) -> Result<S> {
        Ok(match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Exp => x.exp(),
            Func::Log => x.try_ln()?,
            Func::Sqrt => x.try_sqrt()?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Literal with its source text.
    Num(f64, String),
    /// Index into the declared variables, and the name.
    Var(usize, String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Paren(Box<Expr>),
}

impl Expr {
    /// Evaluates with `vals[i]` bound to the `i`-th declared variable.
    pub fn eval<S: Scalar>(&self, vals: &[S]) -> Result<S> {
        Ok(match self {
            Expr::Num(v, _) => S::constant(*v),
            Expr::Var(i, _) => vals[*i],
            Expr::Neg(e) => -e.eval(vals)?,
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.eval(vals)?, r.eval(vals)?);
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l.try_div(r)?,
                    BinOp::Pow => l.try_pow(r)?,
                }
            }
            Expr::Call(f, e) => f.apply(e.eval(vals)?)?,
            Expr::Paren(e) => e.eval(vals)?,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(_, text) => f.write_str(text),
            Expr::Var(_, name) => f.write_str(name),
            Expr::Neg(e) => write!(f, "-{e}"),
            Expr::Bin(op, l, r) => write!(f, "{l}{}{r}", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Paren(e) => write!(f, "({e})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_, s) => format!("number `{s}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            // Exponent only when digits follow, so `2e` stays `2` then `e`.
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
            let v: f64 = text
                .parse()
                .map_err(|_| syntax(start, format!("invalid number `{text}`")))?;
            out.push((Tok::Num(v, text.to_string()), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else {
            let tok = match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                _ => {
                    let ch = src[i..].chars().next().unwrap_or('?');
                    return Err(syntax(i, format!("unexpected character `{ch}`")));
                }
            };
            out.push((tok, i));
            i += 1;
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> Error {
        syntax(
            self.offset(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.factor()?)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.atom()?)));
        }
        self.atom()
    }

    fn close(&mut self) -> Result<()> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected("`)`"))
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num(v, text) => {
                self.bump();
                Ok(Expr::Num(v, text))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.close()?;
                Ok(Expr::Paren(Box::new(e)))
            }
            Tok::Ident(name) => {
                let at = self.offset();
                self.bump();
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::Var(i, name));
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(Error::UnknownIdentifier { name, offset: at });
                };
                if *self.peek() != Tok::LParen {
                    return Err(self.unexpected(&format!("`(` after `{name}`")));
                }
                self.bump();
                let arg = self.expr()?;
                self.close()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(self.unexpected("a number, variable, function call or `(`")),
        }
    }
}

/// Parses `src` with the given variable names in scope.
pub fn parse(src: &str, vars: &[&str]) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        vars,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

/// An expression in `(t, s)` used as a metric generator.
#[derive(Clone, Debug)]
pub struct ExprPhi(pub Expr);

impl ExprPhi {
    pub fn parse(src: &str) -> Result<Self> {
        Ok(ExprPhi(parse(src, &["t", "s"])?))
    }
}

impl BivariateFn for ExprPhi {
    fn eval_jet(&self, t: Jet2, s: Jet2) -> Result<Jet2> {
        self.0.eval(&[t, s])
    }
    fn eval(&self, t: f64, s: f64) -> Result<f64> {
        self.0.eval(&[t, s])
    }
}

/// An expression in `a` used as a profile function.
#[derive(Clone, Debug)]
pub struct ExprProfile(pub Expr);

impl ExprProfile {
    pub fn parse(src: &str) -> Result<Self> {
        Ok(ExprProfile(parse(src, &["a"])?))
    }
}

impl Profile for ExprProfile {
    fn derivatives(&self, a: f64) -> Result<[f64; 3]> {
        let j = self.0.eval(&[Jet2::var_t(a)])?.check_finite("profile")?;
        Ok([j.value(), j.partial(1, 0), j.partial(2, 0)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(src: &str) -> Result<Expr> {
        parse(src, &["t", "s"])
    }

    #[test]
    fn funk_source_at_origin() {
        let e = ts("(sqrt(s^2+1-2*t)+s)/(1-2*t)").unwrap();
        assert_eq!(e.eval(&[0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn identity() {
        let e = parse("a", &["a"]).unwrap();
        assert_eq!(e, Expr::Var(0, "a".into()));
        assert_eq!(e.eval(&[2.5]).unwrap(), 2.5);
    }

    #[test]
    fn unknown_function() {
        assert_eq!(
            ts("foo(t)"),
            Err(Error::UnknownIdentifier {
                name: "foo".into(),
                offset: 0
            })
        );
        assert!(matches!(ts("1 + a"), Err(Error::UnknownIdentifier { offset: 4, .. })));
    }

    #[test]
    fn power_is_right_associative() {
        let e = ts("2^3^2").unwrap();
        assert_eq!(e.eval(&[0.0, 0.0]).unwrap(), 512.0);
        // unary minus binds to the atom
        assert_eq!(ts("-2^2").unwrap().eval(&[0.0, 0.0]).unwrap(), 4.0);
        assert_eq!(ts("2^-1").unwrap().eval(&[0.0, 0.0]).unwrap(), 0.5);
    }

    #[test]
    fn precedence() {
        let e = ts("1+2*3-4/2").unwrap();
        assert_eq!(e.eval(&[0.0, 0.0]).unwrap(), 5.0);
        assert_eq!(ts("1-2-3").unwrap().eval(&[0.0, 0.0]).unwrap(), -4.0);
    }

    #[test]
    fn printing_drops_only_whitespace() {
        for src in ["( sqrt(s^2 + 1 - 2*t) + s ) / (1 - 2*t)", "-t ^ 2.50e-1 * cosh(s)", "1.5E+3-.5"] {
            let e = ts(src).unwrap();
            let squeezed: String = src.chars().filter(|c| !c.is_whitespace()).collect();
            assert_eq!(e.to_string(), squeezed);
            assert_eq!(ts(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn jet_and_real_agree() {
        let e = ts("exp(t)*sin(s)/(1+t^2)").unwrap();
        let real: f64 = e.eval(&[0.3, 0.7]).unwrap();
        let jet = e.eval(&[Jet2::var_t(0.3), Jet2::var_s(0.7)]).unwrap();
        assert!((jet.value() - real).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(ts("log(t)").unwrap().eval(&[-1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(ts("1/t").unwrap().eval(&[0.0, 0.0]), Err(Error::Domain(_))));
    }
}
