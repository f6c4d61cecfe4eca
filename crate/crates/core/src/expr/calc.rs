//! Differentiation, substitution, conjugation.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;

use super::build::{cos, cosh, sin, sinh};
use super::scalar::ratio;
use super::{Expr, Func, Node, Symbol};

impl Expr {
    /// Exact derivative with respect to `s`.
    pub fn derivative(&self, s: &Symbol) -> Expr {
        if !self.contains(s) {
            return Expr::zero();
        }
        match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Sym(t) => {
                if t == s {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Sum(terms) => Expr::add(terms.iter().map(|t| t.derivative(s))),
            Node::Product(factors) => {
                let mut terms = Vec::new();
                for (i, f) in factors.iter().enumerate() {
                    let df = f.derivative(s);
                    if df.is_zero() {
                        continue;
                    }
                    let mut prod: Vec<Expr> = Vec::with_capacity(factors.len());
                    prod.push(df);
                    prod.extend(
                        factors.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()),
                    );
                    terms.push(Expr::mul(prod));
                }
                Expr::add(terms)
            }
            Node::Pow(base, q) => {
                let db = base.derivative(s);
                Expr::mul([
                    Expr::constant(super::Scalar::real(q.clone())),
                    Expr::pow(base.clone(), q - BigRational::one()),
                    db,
                ])
            }
            Node::Apply(func, arg) => {
                let du = arg.derivative(s);
                let u = arg.clone();
                let outer = match func {
                    Func::Sin => cos(u),
                    Func::Cos => sin(u).neg(),
                    Func::Sinh => cosh(u),
                    Func::Cosh => sinh(u),
                    Func::Exp => self.clone(),
                    Func::Log => u.recip(),
                    Func::Arccos => Expr::pow(Expr::int(1) - Expr::powi(u, 2), ratio(-1, 2)).neg(),
                    Func::Arctanh => (Expr::int(1) - Expr::powi(u, 2)).recip(),
                    // rewritten away on construction
                    other => unreachable!("{other:?} is never stored as a node"),
                };
                Expr::mul([outer, du])
            }
        }
    }

    /// `n`-th derivative.
    pub fn nth_derivative(&self, s: &Symbol, n: usize) -> Expr {
        let mut e = self.clone();
        for _ in 0..n {
            e = e.derivative(s);
        }
        e
    }

    /// Replace every occurrence of `s` by `replacement` (no recursion into the
    /// replacement).
    pub fn substitute(&self, s: &Symbol, replacement: &Expr) -> Expr {
        let mut map = BTreeMap::new();
        map.insert(s.clone(), replacement.clone());
        self.substitute_all(&map)
    }

    /// Simultaneous substitution.
    pub fn substitute_all(&self, map: &BTreeMap<Symbol, Expr>) -> Expr {
        if map.keys().all(|s| !self.contains(s)) {
            return self.clone();
        }
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Sym(t) => map.get(t).cloned().unwrap_or_else(|| self.clone()),
            Node::Sum(v) => Expr::add(v.iter().map(|e| e.substitute_all(map))),
            Node::Product(v) => Expr::mul(v.iter().map(|e| e.substitute_all(map))),
            Node::Pow(b, q) => Expr::pow(b.substitute_all(map), q.clone()),
            Node::Apply(f, a) => Expr::apply(*f, a.substitute_all(map)),
        }
    }

    /// Complex conjugate, treating every symbol as real.
    pub fn conj(&self) -> Expr {
        match self.node() {
            Node::Const(c) => {
                if c.is_real() {
                    self.clone()
                } else {
                    Expr::constant(c.conj())
                }
            }
            Node::Sym(_) => self.clone(),
            Node::Sum(v) => Expr::add(v.iter().map(Expr::conj)),
            Node::Product(v) => Expr::mul(v.iter().map(Expr::conj)),
            Node::Pow(b, q) => Expr::pow(b.conj(), q.clone()),
            Node::Apply(f, a) => Expr::apply(*f, a.conj()),
        }
    }

    /// True when the tree holds no imaginary constant.
    pub fn is_manifestly_real(&self) -> bool {
        match self.node() {
            Node::Const(c) => c.is_real(),
            Node::Sym(_) => true,
            Node::Sum(v) | Node::Product(v) => v.iter().all(Expr::is_manifestly_real),
            Node::Pow(b, _) => b.is_manifestly_real(),
            Node::Apply(_, a) => a.is_manifestly_real(),
        }
    }
}
