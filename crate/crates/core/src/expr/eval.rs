//! Floating-point evaluation. Exact constants are converted only here.
//!
//! `exp`, `sin`, `cos`, `sinh`, `cosh` accept complex arguments; `log`, `arccos`,
//! `arctanh` take the principal real branch and need a real argument in range. A
//! non-integer power needs a positive real base.

use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::scalar::is_integer;
use super::{Expr, ExprError, Func, Node};

/// Numeric values for symbols, keyed by name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings {
    values: HashMap<String, f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn with(mut self, name: &str, v: f64) -> Self {
        self.set(name, v);
        self
    }

    pub fn set(&mut self, name: &str, v: f64) {
        self.values.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn extend(&mut self, other: &Bindings) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), *v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl<'a> FromIterator<(&'a str, f64)> for Bindings {
    fn from_iter<T: IntoIterator<Item = (&'a str, f64)>>(iter: T) -> Self {
        let mut b = Bindings::new();
        for (k, v) in iter {
            b.set(k, v);
        }
        b
    }
}

const IMAG_TOL: f64 = 1e-12;

fn real_arg(z: Complex64, what: &str) -> Result<f64, ExprError> {
    if z.im.abs() > IMAG_TOL * z.re.abs().max(1.0) {
        return Err(ExprError::DomainError(format!("{what} of non-real argument {z}")));
    }
    Ok(z.re)
}

fn apply_func(f: Func, z: Complex64) -> Result<Complex64, ExprError> {
    // entire functions take complex arguments; the rest need a real one
    match f {
        Func::Sin => return Ok(z.sin()),
        Func::Cos => return Ok(z.cos()),
        Func::Sinh => return Ok(z.sinh()),
        Func::Cosh => return Ok(z.cosh()),
        Func::Exp => return Ok(z.exp()),
        _ => {}
    }
    let x = real_arg(z, f.name())?;
    let v = match f {
        Func::Log => {
            if x <= 0.0 {
                return Err(ExprError::DomainError(format!("log({x})")));
            }
            x.ln()
        }
        Func::Arccos => {
            if x.abs() > 1.0 {
                return Err(ExprError::DomainError(format!("arccos({x})")));
            }
            x.acos()
        }
        Func::Arctanh => {
            if x.abs() >= 1.0 {
                return Err(ExprError::DomainError(format!("arctanh({x})")));
            }
            x.atanh()
        }
        other => unreachable!("{other:?} is never stored as a node"),
    };
    Ok(Complex64::new(v, 0.0))
}

fn pow_value(b: Complex64, q: f64, integer: Option<i32>) -> Result<Complex64, ExprError> {
    match integer {
        Some(n) => {
            if b == Complex64::new(0.0, 0.0) && n < 0 {
                return Err(ExprError::DomainError("pole: zero to a negative power".into()));
            }
            Ok(b.powi(n))
        }
        None => {
            let x = real_arg(b, "fractional power")?;
            if x < 0.0 || (x == 0.0 && q < 0.0) {
                return Err(ExprError::DomainError(format!("{x}^{q}")));
            }
            Ok(Complex64::new(x.powf(q), 0.0))
        }
    }
}

fn finite(z: Complex64) -> Result<Complex64, ExprError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(ExprError::DomainError(format!("non-finite value {z}")))
    }
}

impl Expr {
    /// Evaluate to a complex number.
    pub fn eval_complex(&self, b: &Bindings) -> Result<Complex64, ExprError> {
        let z = match self.node() {
            Node::Const(c) => c.to_c64(),
            Node::Sym(s) => Complex64::new(
                b.get(s.name()).ok_or_else(|| ExprError::UnboundSymbol(s.name().to_string()))?,
                0.0,
            ),
            Node::Sum(v) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in v {
                    acc += t.eval_complex(b)?;
                }
                acc
            }
            Node::Product(v) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for t in v {
                    acc *= t.eval_complex(b)?;
                }
                acc
            }
            Node::Pow(base, q) => {
                let bz = base.eval_complex(b)?;
                let int = if is_integer(q) { q.numer().to_i32() } else { None };
                pow_value(bz, q.to_f64().unwrap_or(f64::NAN), int)?
            }
            Node::Apply(f, a) => apply_func(*f, a.eval_complex(b)?)?,
        };
        finite(z)
    }

    /// Evaluate to a real number; a nonzero imaginary part is a domain error.
    pub fn eval(&self, b: &Bindings) -> Result<f64, ExprError> {
        let z = self.eval_complex(b)?;
        real_arg(z, "real evaluation")
    }
}

#[derive(Debug, Clone)]
enum Op {
    Const(Complex64),
    Slot(usize),
    Sum(Vec<Op>),
    Product(Vec<Op>),
    Pow(Box<Op>, f64, Option<i32>),
    Apply(Func, Box<Op>),
}

/// An expression lowered to floating point with symbols resolved to slots, for
/// evaluation in tight loops.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    op: Op,
    slots: Vec<String>,
}

impl CompiledExpr {
    /// Compile with the given slot order; symbols not listed are taken from `fixed`.
    pub fn new(e: &Expr, slots: &[&str], fixed: &Bindings) -> Result<Self, ExprError> {
        fn lower(e: &Expr, slots: &[&str], fixed: &Bindings) -> Result<Op, ExprError> {
            Ok(match e.node() {
                Node::Const(c) => Op::Const(c.to_c64()),
                Node::Sym(s) => match slots.iter().position(|n| *n == s.name()) {
                    Some(i) => Op::Slot(i),
                    None => Op::Const(Complex64::new(
                        fixed
                            .get(s.name())
                            .ok_or_else(|| ExprError::UnboundSymbol(s.name().to_string()))?,
                        0.0,
                    )),
                },
                Node::Sum(v) => {
                    Op::Sum(v.iter().map(|t| lower(t, slots, fixed)).collect::<Result<_, _>>()?)
                }
                Node::Product(v) => Op::Product(
                    v.iter().map(|t| lower(t, slots, fixed)).collect::<Result<_, _>>()?,
                ),
                Node::Pow(b, q) => Op::Pow(
                    Box::new(lower(b, slots, fixed)?),
                    q.to_f64().unwrap_or(f64::NAN),
                    if is_integer(q) { q.numer().to_i32() } else { None },
                ),
                Node::Apply(f, a) => Op::Apply(*f, Box::new(lower(a, slots, fixed)?)),
            })
        }
        Ok(CompiledExpr {
            op: lower(e, slots, fixed)?,
            slots: slots.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn slots(&self) -> &[String] {
        &self.slots
    }

    pub fn eval_complex(&self, x: &[f64]) -> Result<Complex64, ExprError> {
        fn run(op: &Op, x: &[f64]) -> Result<Complex64, ExprError> {
            Ok(match op {
                Op::Const(c) => *c,
                Op::Slot(i) => Complex64::new(x[*i], 0.0),
                Op::Sum(v) => {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for t in v {
                        acc += run(t, x)?;
                    }
                    acc
                }
                Op::Product(v) => {
                    let mut acc = Complex64::new(1.0, 0.0);
                    for t in v {
                        acc *= run(t, x)?;
                    }
                    acc
                }
                Op::Pow(b, q, n) => pow_value(run(b, x)?, *q, *n)?,
                Op::Apply(f, a) => apply_func(*f, run(a, x)?)?,
            })
        }
        finite(run(&self.op, x)?)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, ExprError> {
        real_arg(self.eval_complex(x)?, "real evaluation")
    }
}
