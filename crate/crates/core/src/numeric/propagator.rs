//! Grid check of a propagator relation between two catalog problems.

use std::collections::BTreeMap;

use serde::Serialize;

use super::eigen::sturm_count;
use super::grid::{bindings, fd_hamiltonian, Grid, GridOperator};
use super::resolvent::resolvent_matrix_element;
use super::NumericError;
use crate::expr::{Bindings, CompiledExpr};
use crate::potentials::{lookup, Consts};
use crate::xform::PropagatorRelation;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagatorEntry {
    pub energy: f64,
    pub target_energy: f64,
    pub target_params: BTreeMap<String, f64>,
    pub x0: f64,
    pub xf: f64,
    pub theta0: f64,
    pub thetaf: f64,
    /// `G_source(x_f, x_0; E)` as (re, im).
    pub lhs: [f64; 2],
    /// `constant · h(x_f) h(x_0) · G_target(θ_f, θ_0; E′)`.
    pub rhs: [f64; 2],
    pub rel_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagatorReport {
    pub source: String,
    pub target: String,
    pub source_grid: Grid,
    pub target_grid: Grid,
    pub eps: f64,
    /// Smallest and largest source energy swept.
    pub energy_range: [f64; 2],
    /// True when every swept energy lies below the source FD ground state.
    pub below_source_ground_state: bool,
    pub corrupt_prefactor: bool,
    pub entries: Vec<PropagatorEntry>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub struct PropagatorCheck<'a> {
    pub rel: &'a PropagatorRelation,
    /// Source parameters (without the energy).
    pub params: &'a BTreeMap<String, f64>,
    /// Name of the energy symbol in `parameter_map`.
    pub energy: &'a str,
    pub consts: Consts,
    pub energies: &'a [f64],
    pub points: &'a [(f64, f64)],
    pub source_grid: &'a Grid,
    pub target_grid: &'a Grid,
    pub eps: f64,
    pub tolerance: f64,
    /// Replace the endpoint prefactor by 1 (negative control).
    pub corrupt_prefactor: bool,
}

fn eigen_clearance(op: &GridOperator, e: f64, gap: f64, which: &str) -> Result<(), NumericError> {
    if sturm_count(op, e + gap) != sturm_count(op, e - gap) {
        return Err(NumericError::DomainError(format!("E = {e} lies within {gap} of a {which} eigenvalue")));
    }
    Ok(())
}

pub fn verify_propagator_relation(c: &PropagatorCheck) -> Result<PropagatorReport, NumericError> {
    let rel = c.rel;
    let source = lookup(&rel.source)?;
    let target = lookup(&rel.target)?;
    if c.energies.is_empty() || c.points.is_empty() {
        return Err(NumericError::DomainError("need at least one energy and one point pair".into()));
    }
    let h_src = fd_hamiltonian(&source, c.params, &c.consts, c.source_grid)?;
    let base = bindings(c.params, &c.consts);
    let sv = [rel.source_variable.name()];
    let theta = CompiledExpr::new(&rel.argument_map, &sv, &base)?;
    let h = CompiledExpr::new(&rel.endpoint_prefactor, &sv, &base)?;
    let k = rel.overall_constant.to_c64();
    let gap = 5.0 * c.eps;

    let mut entries = Vec::new();
    let mut below = true;
    for &e in c.energies {
        eigen_clearance(&h_src, e, gap, "source")?;
        below &= sturm_count(&h_src, e) == 0;
        let mut b: Bindings = base.clone();
        b.set(c.energy, e);
        let (tparams, te) = if rel.parameter_map.is_empty() {
            (c.params.clone(), e)
        } else {
            let mut tp = BTreeMap::new();
            let mut te = None;
            for (name, expr) in &rel.parameter_map {
                let v = expr.eval(&b)?;
                if name == c.energy {
                    te = Some(v);
                } else {
                    tp.insert(name.clone(), v);
                }
            }
            let te = te.ok_or_else(|| NumericError::DomainError(format!("parameter map has no `{}`", c.energy)))?;
            (tp, te)
        };
        let h_tgt = fd_hamiltonian(&target, &tparams, &c.consts, c.target_grid)?;
        eigen_clearance(&h_tgt, te, gap, "target")?;
        for &(x0, xf) in c.points {
            let lhs = resolvent_matrix_element(&h_src, e, c.eps, x0, xf)?;
            let (t0, tf) = (theta.eval(&[x0])?, theta.eval(&[xf])?);
            let g = resolvent_matrix_element(&h_tgt, te, c.eps, t0, tf)?;
            let pre = if c.corrupt_prefactor { 1.0 } else { h.eval(&[xf])? * h.eval(&[x0])? };
            let rhs = k * pre * g;
            let dev = (lhs - rhs).norm() / lhs.norm().max(f64::MIN_POSITIVE);
            entries.push(PropagatorEntry {
                energy: e,
                target_energy: te,
                target_params: tparams.clone(),
                x0,
                xf,
                theta0: t0,
                thetaf: tf,
                lhs: [lhs.re, lhs.im],
                rhs: [rhs.re, rhs.im],
                rel_deviation: dev,
            });
        }
    }
    let max_deviation = entries.iter().map(|e| e.rel_deviation).fold(0.0, f64::max);
    let lo = c.energies.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = c.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PropagatorReport {
        source: rel.source.clone(),
        target: rel.target.clone(),
        source_grid: c.source_grid.clone(),
        target_grid: c.target_grid.clone(),
        eps: c.eps,
        energy_range: [lo, hi],
        below_source_ground_state: below,
        corrupt_prefactor: c.corrupt_prefactor,
        entries,
        max_deviation,
        tolerance: c.tolerance,
        pass: max_deviation <= c.tolerance,
    })
}
