//! Linear differential operators with symbolic coefficients.
//!
//! An operator is a finite sum `Σ c_α(x) ∂^α` over multi-indices `α` on an ordered
//! list of variables. Momentum is stored as `−iħ ∂`.

mod text;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::expr::{numerically_equal, Expr, ExprError, SampleDomain, Scalar, Symbol};

pub use text::{parse_op, OpJson, OpParseError, TermJson};

/// Derivative order per variable, aligned with [`DiffOp::variables`].
pub type MultiIndex = Vec<u8>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiffOpError {
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Whether the rotation generators carry a factor ħ (`−iħ∂`) or not (`−i∂`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HbarConvention {
    Present,
    #[default]
    Absent,
}

/// Integration weight `constant · density(var)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    pub var: Symbol,
    pub density: Expr,
    pub constant: Scalar,
}

impl Measure {
    pub fn flat(var: &Symbol) -> Self {
        Measure { var: var.clone(), density: Expr::one(), constant: Scalar::one() }
    }

    pub fn new(var: &Symbol, density: Expr) -> Self {
        Measure { var: var.clone(), density, constant: Scalar::one() }
    }

    pub fn with_constant(mut self, c: Scalar) -> Self {
        self.constant = c;
        self
    }

    /// The full weight `constant · density` as one expression.
    pub fn weight(&self) -> Expr {
        self.density.clone().scale(&self.constant)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffOp {
    vars: Vec<Symbol>,
    terms: BTreeMap<MultiIndex, Expr>,
}

fn binom(n: u8, k: u8) -> i64 {
    let (n, k) = (n as i64, k as i64);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All `γ ≤ α` componentwise.
fn sub_indices(alpha: &[u8]) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for &a in alpha {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=a).map(move |g| {
                    let mut q = p.clone();
                    q.push(g);
                    q
                })
            })
            .collect();
    }
    out
}

impl DiffOp {
    pub fn zero(vars: &[Symbol]) -> Self {
        DiffOp { vars: vars.to_vec(), terms: BTreeMap::new() }
    }

    pub fn identity(vars: &[Symbol]) -> Self {
        DiffOp::multiplication(vars, Expr::one())
    }

    /// Multiplication by a function.
    pub fn multiplication(vars: &[Symbol], f: Expr) -> Self {
        DiffOp::from_terms(vars, [(vec![0; vars.len()], f)])
    }

    /// `∂^n` with respect to `v`, which is added to `vars` if absent.
    pub fn partial(vars: &[Symbol], v: &Symbol, n: u8) -> Self {
        let mut vs = vars.to_vec();
        if !vs.contains(v) {
            vs.push(v.clone());
        }
        let mut idx = vec![0; vs.len()];
        idx[vs.iter().position(|s| s == v).unwrap()] = n;
        DiffOp::from_terms(&vs, [(idx, Expr::one())])
    }

    /// `∂_v` over the single variable `v`.
    pub fn d(v: &Symbol) -> Self {
        DiffOp::partial(&[], v, 1)
    }

    /// `−iħ ∂_v`.
    pub fn momentum(vars: &[Symbol], v: &Symbol, hbar: Expr) -> Self {
        DiffOp::partial(vars, v, 1).left_mul(&(Expr::i() * hbar).neg())
    }

    /// Build from explicit terms; like indices are summed and zeros dropped.
    pub fn from_terms(vars: &[Symbol], terms: impl IntoIterator<Item = (MultiIndex, Expr)>) -> Self {
        let mut acc: BTreeMap<MultiIndex, Vec<Expr>> = BTreeMap::new();
        for (idx, c) in terms {
            assert_eq!(idx.len(), vars.len(), "multi-index length must match variables");
            acc.entry(idx).or_default().push(c);
        }
        let terms = acc
            .into_iter()
            .map(|(k, v)| (k, Expr::add(v)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        DiffOp { vars: vars.to_vec(), terms }
    }

    pub fn variables(&self) -> &[Symbol] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Expr)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, idx: &[u8]) -> Expr {
        self.terms.get(idx).cloned().unwrap_or_else(Expr::zero)
    }

    /// Coefficient of `∂_v^n` alone (other orders zero).
    pub fn coefficient_of(&self, v: &Symbol, n: u8) -> Expr {
        match self.vars.iter().position(|s| s == v) {
            Some(i) => {
                let mut idx = vec![0; self.vars.len()];
                idx[i] = n;
                self.coefficient(&idx)
            }
            None if n == 0 => self.coefficient(&vec![0; self.vars.len()]),
            None => Expr::zero(),
        }
    }

    /// Highest total derivative order (0 for the zero operator).
    pub fn order(&self) -> usize {
        self.terms.keys().map(|k| k.iter().map(|&a| a as usize).sum()).max().unwrap_or(0)
    }

    /// Re-express over `vars` (which must contain every current variable).
    pub fn lift(&self, vars: &[Symbol]) -> Self {
        let pos: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("lift to a superset"))
            .collect();
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| {
                let mut idx = vec![0; vars.len()];
                for (i, &a) in k.iter().enumerate() {
                    idx[pos[i]] = a;
                }
                (idx, c.clone())
            })
            .collect();
        DiffOp { vars: vars.to_vec(), terms }
    }

    fn union_vars(a: &[Symbol], b: &[Symbol]) -> Vec<Symbol> {
        let mut out = a.to_vec();
        for v in b {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    fn aligned(&self, other: &DiffOp) -> (DiffOp, DiffOp) {
        if self.vars == other.vars {
            return (self.clone(), other.clone());
        }
        let vs = DiffOp::union_vars(&self.vars, &other.vars);
        (self.lift(&vs), other.lift(&vs))
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let (a, b) = self.aligned(other);
        DiffOp::from_terms(&a.vars, a.terms.into_iter().chain(b.terms))
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffOp {
        self.map_coefficients(|c| c.clone().neg())
    }

    /// `f · self` (multiply every coefficient by `f`).
    pub fn left_mul(&self, f: &Expr) -> DiffOp {
        self.map_coefficients(|c| f.clone() * c.clone())
    }

    pub fn scale(&self, s: &Scalar) -> DiffOp {
        self.map_coefficients(|c| c.clone().scale(s))
    }

    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Expr) -> DiffOp {
        DiffOp::from_terms(&self.vars, self.terms.iter().map(|(k, c)| (k.clone(), f(c))))
    }

    pub fn substitute_all(&self, map: &BTreeMap<Symbol, Expr>) -> DiffOp {
        self.map_coefficients(|c| c.substitute_all(map))
    }

    /// Act on a function.
    pub fn apply(&self, f: &Expr) -> Expr {
        Expr::add(self.terms.iter().map(|(k, c)| {
            let mut g = f.clone();
            for (v, &n) in self.vars.iter().zip(k) {
                g = g.nth_derivative(v, n as usize);
            }
            c.clone() * g
        }))
    }

    fn partial_of(&self, e: &Expr, idx: &[u8]) -> Expr {
        let mut g = e.clone();
        for (v, &n) in self.vars.iter().zip(idx) {
            g = g.nth_derivative(v, n as usize);
        }
        g
    }

    /// Operator product `self ∘ other`.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let (a, b) = self.aligned(other);
        let mut out = Vec::new();
        for (alpha, ca) in &a.terms {
            for (beta, cb) in &b.terms {
                for gamma in sub_indices(alpha) {
                    let mult: i64 = alpha.iter().zip(&gamma).map(|(&x, &g)| binom(x, g)).product();
                    let dcb = a.partial_of(cb, &gamma);
                    if dcb.is_zero() {
                        continue;
                    }
                    let idx: MultiIndex =
                        alpha.iter().zip(&gamma).zip(beta).map(|((&x, &g), &y)| x - g + y).collect();
                    out.push((idx, Expr::mul([Expr::int(mult), ca.clone(), dcb])));
                }
            }
        }
        DiffOp::from_terms(&a.vars, out)
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        self.compose(other).sub(&other.compose(self))
    }

    /// Formal adjoint with respect to `measure`, with all symbols taken real and
    /// boundary terms dropped:
    /// `(c ∂^α)† φ = (−1)^{|α|} g⁻¹ ∂^α (g c̄ φ)`.
    pub fn adjoint(&self, measure: &Measure) -> Result<DiffOp, DiffOpError> {
        if let Some(extra) = measure
            .density
            .symbols()
            .into_iter()
            .find(|s| s.is_variable() && *s != measure.var)
        {
            return Err(DiffOpError::UnsupportedShape(format!(
                "measure density depends on `{}` besides `{}`",
                extra.name(),
                measure.var.name()
            )));
        }
        let vs = DiffOp::union_vars(&self.vars, std::slice::from_ref(&measure.var));
        let op = self.lift(&vs);
        let g = measure.density.clone();
        let ginv = g.clone().recip();
        let mut out = Vec::new();
        for (alpha, c) in &op.terms {
            let order: u32 = alpha.iter().map(|&a| a as u32).sum();
            let sign = if order.is_multiple_of(2) { 1 } else { -1 };
            let gc = g.clone() * c.conj();
            for gamma in sub_indices(alpha) {
                let rest: MultiIndex = alpha.iter().zip(&gamma).map(|(&a, &g)| a - g).collect();
                let mult: i64 = alpha.iter().zip(&gamma).map(|(&a, &g)| binom(a, g)).product();
                let d = op.partial_of(&gc, &rest);
                if d.is_zero() {
                    continue;
                }
                out.push((gamma, Expr::mul([Expr::int(sign * mult), ginv.clone(), d])));
            }
        }
        Ok(DiffOp::from_terms(&vs, out))
    }

    /// Drop terms whose coefficient vanishes at every sample point.
    pub fn prune_numeric(&self, domain: &SampleDomain, seed: u64) -> Result<DiffOp, ExprError> {
        let mut keep = BTreeMap::new();
        for (k, c) in &self.terms {
            if !numerically_equal(c, &Expr::zero(), domain, seed)?.equal {
                keep.insert(k.clone(), c.clone());
            }
        }
        Ok(DiffOp { vars: self.vars.clone(), terms: keep })
    }
}

impl std::fmt::Display for DiffOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        text::write_op(self, f)
    }
}

/// Outcome of [`op_equal`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpEqReport {
    pub equal: bool,
    pub variables: Vec<String>,
    /// Per multi-index: largest absolute coefficient difference.
    pub terms: Vec<(MultiIndex, f64)>,
    pub worst_term: Option<MultiIndex>,
    pub max_abs_diff: f64,
}

/// Coefficientwise [`numerically_equal`].
pub fn op_equal(
    a: &DiffOp,
    b: &DiffOp,
    domain: &SampleDomain,
    seed: u64,
) -> Result<OpEqReport, ExprError> {
    let (a, b) = a.aligned(b);
    let mut keys: Vec<&MultiIndex> = a.terms.keys().chain(b.terms.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut equal = true;
    let mut terms = Vec::new();
    let mut worst: Option<(MultiIndex, f64)> = None;
    for k in keys {
        let r = numerically_equal(&a.coefficient(k), &b.coefficient(k), domain, seed)?;
        equal &= r.equal;
        // rank by failure first, then by size
        let score = if r.equal { 0.0 } else { 1.0 + r.max_abs_diff };
        if worst.as_ref().is_none_or(|(_, s)| score > *s) {
            worst = Some((k.clone(), score));
        }
        terms.push((k.clone(), r.max_abs_diff));
    }
    let max_abs_diff = terms.iter().map(|t| t.1).fold(0.0, f64::max);
    Ok(OpEqReport {
        equal,
        variables: a.vars.iter().map(|v| v.name().to_string()).collect(),
        terms,
        worst_term: worst.filter(|w| w.1 > 0.0).map(|w| w.0),
        max_abs_diff,
    })
}
