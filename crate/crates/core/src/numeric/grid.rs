use std::collections::BTreeMap;

use serde::Serialize;

use super::NumericError;
use crate::diffop::DiffOp;
use crate::expr::{Bindings, CompiledExpr, Expr, Symbol};
use crate::potentials::{Consts, EndpointKind, PotentialSpec};

/// `n` interior points of `[lo + inset, hi − inset]` with Dirichlet ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub variable: String,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub inset: f64,
}

impl Grid {
    pub fn new(variable: &str, lo: f64, hi: f64, n: usize) -> Result<Self, NumericError> {
        if n < 16 || !(lo < hi) {
            return Err(NumericError::DomainError(format!("grid [{lo}, {hi}] with n = {n}")));
        }
        Ok(Grid { variable: variable.into(), lo, hi, n, inset: 0.0 })
    }

    pub fn with_inset(mut self, inset: f64) -> Result<Self, NumericError> {
        if inset < 0.0 || 2.0 * inset >= self.hi - self.lo {
            return Err(NumericError::DomainError(format!("inset {inset} too large")));
        }
        self.inset = inset;
        Ok(self)
    }

    /// Grid covering a catalog domain; infinite ends are cut at `±cut`.
    pub fn for_spec(spec: &PotentialSpec, consts: &Consts, n: usize, cut: f64) -> Result<Self, NumericError> {
        let (lo, hi) = spec.domain.bounds(consts);
        let lo = if spec.domain.lo_kind == EndpointKind::Infinite { -cut } else { lo };
        let hi = if spec.domain.hi_kind == EndpointKind::Infinite { cut } else { hi };
        Grid::new(spec.variable.name(), lo, hi, n)
    }

    pub fn a(&self) -> f64 {
        self.lo + self.inset
    }

    pub fn b(&self) -> f64 {
        self.hi - self.inset
    }

    pub fn dx(&self) -> f64 {
        (self.b() - self.a()) / (self.n + 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.a() + (i + 1) as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// `Σ ρ_i conj(u_i) v_i Δx`, the grid inner product (trapezoid with zero ends).
    pub fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() * self.dx()
    }
}

/// Symmetric tridiagonal `−(ħ²/2μ)D² + V`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOperator {
    pub grid: Grid,
    pub diag: Vec<f64>,
    /// Off-diagonal entries, length `n − 1`.
    pub off: Vec<f64>,
    pub hbar: f64,
    pub provenance: String,
}

impl GridOperator {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Bindings for parameters plus `ħ, μ, a`.
pub fn bindings(params: &BTreeMap<String, f64>, consts: &Consts) -> Bindings {
    let mut b = consts.bindings();
    for (k, v) in params {
        b.set(k, *v);
    }
    b
}

/// Discretize `V` given as an expression in `grid.variable`.
pub fn fd_from_potential(
    potential: &Expr,
    b: &Bindings,
    consts: &Consts,
    grid: &Grid,
    provenance: &str,
) -> Result<GridOperator, NumericError> {
    let v = CompiledExpr::new(potential, &[grid.variable.as_str()], b)?;
    let dx = grid.dx();
    let t = consts.hbar * consts.hbar / (2.0 * consts.mu * dx * dx);
    let mut diag = Vec::with_capacity(grid.n);
    for x in grid.points() {
        let vx = v.eval(&[x]).map_err(|e| NumericError::DomainError(format!("V({x}): {e}")))?;
        if !vx.is_finite() {
            return Err(NumericError::DomainError(format!("V({x}) = {vx}")));
        }
        diag.push(2.0 * t + vx);
    }
    Ok(GridOperator { grid: grid.clone(), diag, off: vec![-t; grid.n - 1], hbar: consts.hbar, provenance: provenance.into() })
}

/// Finite-difference Hamiltonian for a catalog entry.
pub fn fd_hamiltonian(
    spec: &PotentialSpec,
    params: &BTreeMap<String, f64>,
    consts: &Consts,
    grid: &Grid,
) -> Result<GridOperator, NumericError> {
    if grid.variable != spec.variable.name() {
        return Err(NumericError::DomainError(format!(
            "grid variable `{}` is not `{}`",
            grid.variable,
            spec.variable.name()
        )));
    }
    let (lo, hi) = spec.domain.bounds(consts);
    if grid.a() < lo - 1e-12 || grid.b() > hi + 1e-12 {
        return Err(NumericError::DomainError(format!(
            "grid [{}, {}] leaves the domain [{lo}, {hi}]",
            grid.a(),
            grid.b()
        )));
    }
    for p in &spec.parameters {
        if let Some(&v) = params.get(&p.name) {
            if !p.admits(v) {
                return Err(NumericError::DomainError(format!("{} = {v} outside {}", p.name, p.range_text())));
            }
        }
    }
    let b = bindings(params, consts);
    let prov = format!("{} {:?}", spec.id, params);
    fd_from_potential(&spec.potential, &b, consts, grid, &prov)
}

/// Smallest inset keeping `|V| ≤ threshold · ħ²a²/μ` at the grid ends.
pub fn auto_inset(
    spec: &PotentialSpec,
    params: &BTreeMap<String, f64>,
    consts: &Consts,
    grid: &Grid,
    threshold: f64,
) -> Result<f64, NumericError> {
    let b = bindings(params, consts);
    let v = CompiledExpr::new(&spec.potential, &[grid.variable.as_str()], &b)?;
    let limit = threshold * consts.energy_unit();
    let bad = |x: f64| v.eval(&[x]).map_or(true, |y| !y.is_finite() || y.abs() > limit);
    let half = 0.5 * (grid.hi - grid.lo);
    let mut inset: f64 = 0.0;
    for end in [grid.lo, grid.hi] {
        let dir = if end == grid.lo { 1.0 } else { -1.0 };
        let (mut a, mut c) = (0.0, half);
        if !bad(end + dir * 1e-300_f64.max(1e-12 * half)) {
            continue;
        }
        for _ in 0..80 {
            let m = 0.5 * (a + c);
            if bad(end + dir * m) {
                a = m;
            } else {
                c = m;
            }
        }
        inset = inset.max(c);
    }
    Ok(inset)
}

/// Apply a one-variable differential operator (order ≤ 2) to grid samples with
/// central differences; entries next to the ends use the Dirichlet zeros.
pub fn apply_on_grid(op: &DiffOp, u: &[f64], grid: &Grid, b: &Bindings) -> Result<Vec<f64>, NumericError> {
    let var = Symbol::var(&grid.variable);
    if op.variables() != std::slice::from_ref(&var) || op.order() > 2 {
        return Err(NumericError::DomainError(format!("operator must be of order ≤ 2 in `{}`", grid.variable)));
    }
    let names = [grid.variable.as_str()];
    let c: Vec<CompiledExpr> =
        (0..3).map(|k| CompiledExpr::new(&op.coefficient(&[k]), &names, b)).collect::<Result<_, _>>()?;
    let dx = grid.dx();
    let n = u.len();
    let at = |i: isize| if i < 0 || i as usize >= n { 0.0 } else { u[i as usize] };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = grid.point(i);
        let (l, m, r) = (at(i as isize - 1), u[i], at(i as isize + 1));
        let d1 = (r - l) / (2.0 * dx);
        let d2 = (r - 2.0 * m + l) / (dx * dx);
        out.push(c[2].eval(&[x])? * d2 + c[1].eval(&[x])? * d1 + c[0].eval(&[x])? * m);
    }
    Ok(out)
}
