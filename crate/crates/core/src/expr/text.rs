//! Fully parenthesized prefix text form.
//!
//! ```text
//! (mul (rat 1 1) (arctanh (cos (mul 2 a x))))
//! (pow (sin (mul 2 a x)) (rat -1 2))
//! (cx 0 1)                       ; the imaginary unit
//! ```
//!
//! Besides the printed heads (`add`, `mul`, `pow`, `rat`, `cx`, function names) the
//! parser accepts `sub`, `neg`, `div`, decimal literals, `p/q` literals and `pi`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::scalar::fmt_rational;
use super::{Expr, Func, Node, Scalar, Symbol};

pub(crate) fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Const(c) => write!(f, "{c}"),
        Node::Sym(s) => write!(f, "{}", s.name()),
        Node::Sum(v) | Node::Product(v) => {
            let head = if matches!(e.node(), Node::Sum(_)) { "add" } else { "mul" };
            write!(f, "({head}")?;
            for t in v {
                write!(f, " ")?;
                write_expr(t, f)?;
            }
            write!(f, ")")
        }
        Node::Pow(b, q) => {
            write!(f, "(pow ")?;
            write_expr(b, f)?;
            write!(f, " ")?;
            fmt_rational(q, f)?;
            write!(f, ")")
        }
        Node::Apply(func, a) => {
            write!(f, "({} ", func.name())?;
            write_expr(a, f)?;
            write!(f, ")")
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("parse error at token {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

/// Decides which bare names are variables; every other name is a parameter.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    variables: BTreeSet<String>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        SymbolTable::with_variables(["x", "r", "theta", "phi", "psi", "x1", "x2", "x3", "x4"])
    }
}

impl SymbolTable {
    pub fn with_variables<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        SymbolTable { variables: names.into_iter().map(str::to_string).collect() }
    }

    /// A copy that also treats `names` as variables.
    pub fn with_extra_variables(&self, names: &[&str]) -> Self {
        let mut t = self.clone();
        t.variables.extend(names.iter().map(|s| s.to_string()));
        t
    }

    pub fn symbol(&self, name: &str) -> Symbol {
        if self.variables.contains(name) {
            Symbol::var(name)
        } else {
            Symbol::param(name)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

fn tokenize(s: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(Tok::Atom(std::mem::take(&mut cur)));
                }
                out.push(if ch == '(' { Tok::Open } else { Tok::Close });
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(Tok::Atom(std::mem::take(&mut cur)));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(Tok::Atom(cur));
    }
    out
}

fn parse_number(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    // exact decimal
    let (neg, body) = s.strip_prefix('-').map_or((false, s), |b| (true, b));
    let (int, frac) = body.split_once('.')?;
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = BigInt::from(10u32).pow(frac.len() as u32);
    let r = BigRational::new(digits, scale);
    Some(if neg { -r } else { r })
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    table: &'a SymbolTable,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, msg: msg.into() })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.next() {
            Some(Tok::Atom(a)) => self.atom(&a),
            Some(Tok::Open) => self.form(),
            Some(Tok::Close) => self.err("unexpected `)`"),
            None => self.err("unexpected end of input"),
        }
    }

    fn atom(&self, a: &str) -> Result<Expr, ParseError> {
        if let Some(r) = parse_number(a) {
            return Ok(Expr::constant(Scalar::real(r)));
        }
        if a == "pi" {
            return Ok(Expr::pi());
        }
        if a.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && a.chars().all(|c| c.is_alphanumeric() || c == '_')
        {
            return Ok(Expr::sym(&self.table.symbol(a)));
        }
        self.err(format!("bad atom `{a}`"))
    }

    fn rational_literal(&mut self) -> Result<BigRational, ParseError> {
        let e = self.expr()?;
        match e.as_const() {
            Some(c) if c.is_real() => Ok(c.re.clone()),
            _ => self.err("expected a rational literal"),
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut out = Vec::new();
        loop {
            match self.toks.get(self.pos) {
                Some(Tok::Close) => {
                    self.pos += 1;
                    return Ok(out);
                }
                None => return self.err("unclosed `(`"),
                _ => out.push(self.expr()?),
            }
        }
    }

    fn close(&mut self) -> Result<(), ParseError> {
        match self.next() {
            Some(Tok::Close) => Ok(()),
            _ => self.err("expected `)`"),
        }
    }

    fn form(&mut self) -> Result<Expr, ParseError> {
        let head = match self.next() {
            Some(Tok::Atom(a)) => a,
            _ => return self.err("expected a form head"),
        };
        match head.as_str() {
            "rat" => {
                let n = self.rational_literal()?;
                let d = self.rational_literal()?;
                self.close()?;
                if d.is_zero() {
                    return self.err("zero denominator");
                }
                Ok(Expr::constant(Scalar::real(n / d)))
            }
            "cx" => {
                let re = self.rational_literal()?;
                let im = self.rational_literal()?;
                self.close()?;
                Ok(Expr::constant(Scalar::new(re, im)))
            }
            "pow" => {
                let base = self.expr()?;
                let q = self.rational_literal()?;
                self.close()?;
                Ok(Expr::pow(base, q))
            }
            "add" | "mul" => {
                let args = self.args()?;
                if args.is_empty() {
                    return self.err(format!("empty `{head}`"));
                }
                Ok(if head == "add" { Expr::add(args) } else { Expr::mul(args) })
            }
            "sub" => {
                let args = self.args()?;
                if args.len() != 2 {
                    return self.err("`sub` takes two arguments");
                }
                Ok(Expr::sub(args[0].clone(), args[1].clone()))
            }
            "div" => {
                let args = self.args()?;
                if args.len() != 2 {
                    return self.err("`div` takes two arguments");
                }
                Ok(Expr::div(args[0].clone(), args[1].clone()))
            }
            "neg" => {
                let a = self.expr()?;
                self.close()?;
                Ok(a.neg())
            }
            name => match Func::from_name(name) {
                Some(f) => {
                    let a = self.expr()?;
                    self.close()?;
                    Ok(Expr::apply(f, a))
                }
                None => self.err(format!("unknown head `{name}`")),
            },
        }
    }
}

/// Parse the prefix text form.
pub fn parse_expr(text: &str, table: &SymbolTable) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: tokenize(text), pos: 0, table };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::super::build::*;
    use super::super::Bindings;
    use super::*;

    #[test]
    fn parses_the_documented_example() {
        let t = SymbolTable::default();
        let e = parse_expr("(mul (rat 1 1) (arctanh (cos (mul 2 a x))))", &t).unwrap();
        assert_eq!(e, arctanh(cos(int(2) * param("a") * var("x"))));
    }

    #[test]
    fn printing_round_trips() {
        let t = SymbolTable::default();
        let e = (Expr::i() * rat(-3, 4)) * powr(sin(var("x") * param("a")), -1, 2)
            + tanh(var("x"))
            + Expr::pi();
        let back = parse_expr(&e.to_string(), &t).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn decimals_are_exact() {
        let t = SymbolTable::default();
        assert_eq!(parse_expr("0.125", &t).unwrap(), rat(1, 8));
        assert_eq!(parse_expr("-1/2", &t).unwrap(), rat(-1, 2));
    }

    #[test]
    fn variables_follow_the_table() {
        let t = SymbolTable::default();
        let e = parse_expr("(mul a x)", &t).unwrap();
        let kinds: Vec<_> = e.symbols().into_iter().map(|s| (s.name().to_string(), s.is_variable())).collect();
        assert_eq!(kinds, vec![("a".into(), false), ("x".into(), true)]);
        let v = parse_expr("pi", &t).unwrap().eval(&Bindings::new()).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn errors_are_reported() {
        let t = SymbolTable::default();
        assert!(parse_expr("(add)", &t).is_err());
        assert!(parse_expr("(foo x)", &t).is_err());
        assert!(parse_expr("(sin x", &t).is_err());
        assert!(parse_expr("x y", &t).is_err());
    }
}
