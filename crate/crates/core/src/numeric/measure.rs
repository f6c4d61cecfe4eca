//! Norm bookkeeping along a plan: `∫|ψ_k|² |ρ_k|` after every step.

use serde::Serialize;

use super::quad::gauss_legendre;
use super::NumericError;
use crate::diffop::Measure;
use crate::expr::{Bindings, CompiledExpr, Expr};
use crate::xform::{transform_measure, TransformPlan, TransformStep};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureStep {
    pub index: usize,
    pub kind: String,
    pub variable: String,
    pub interval: [f64; 2],
    pub norm: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureChainReport {
    pub test_function: String,
    pub source_norm: f64,
    pub steps: Vec<MeasureStep>,
    pub max_rel_err: f64,
}

/// Composite Gauss-Legendre, `panels × 8` nodes.
fn integrate(f: &CompiledExpr, lo: f64, hi: f64, panels: usize) -> Result<f64, NumericError> {
    let (x, w) = gauss_legendre(8);
    let h = (hi - lo) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        for (u, v) in x.iter().zip(&w) {
            s += 0.5 * h * v * f.eval(&[mid + 0.5 * h * u])?;
        }
    }
    Ok(s)
}

/// Push `psi` (an expression in the source variable) through the plan's state maps:
/// PCT composes, similarity by `g` multiplies by `g`, rescale by `c` multiplies by
/// `c`; conjugation leaves both state and measure alone. The norm under the
/// tracked measure is compared with the source norm after each step.
pub fn measure_chain(
    plan: &TransformPlan,
    psi: &Expr,
    source_interval: (f64, f64),
    b: &Bindings,
    panels: usize,
) -> Result<MeasureChainReport, NumericError> {
    let mut var = plan.source_variable.clone();
    let mut state = psi.clone();
    let mut mu = Measure::flat(&var);
    let mut interval = source_interval;
    let norm = |state: &Expr, mu: &Measure, var: &str, iv: (f64, f64)| -> Result<f64, NumericError> {
        let dens = Expr::constant(mu.constant.clone()) * mu.density.clone();
        let integrand = Expr::powi(state.clone(), 2) * dens;
        let c = CompiledExpr::new(&integrand, &[var], b)?;
        Ok(integrate(&c, iv.0, iv.1, panels)?.abs())
    };
    let n0 = norm(&state, &mu, var.name(), interval)?;
    let mut steps = Vec::new();
    for (i, (step, iv)) in plan.steps.iter().enumerate() {
        let xerr = |e: crate::xform::XformError| NumericError::DomainError(e.to_string());
        match step {
            TransformStep::Pct { f, .. } => {
                let new = plan.target_variable.clone();
                mu = transform_measure(&mu, step, &new).map_err(xerr)?;
                state = state.substitute(&var, f);
                var = new;
            }
            TransformStep::Similarity { g } => {
                mu = transform_measure(&mu, step, &var).map_err(xerr)?;
                state = state * g.clone();
            }
            TransformStep::Conjugation { .. } => {}
            TransformStep::Rescale { c } => {
                mu = transform_measure(&mu, step, &var).map_err(xerr)?;
                state = state * c.clone();
            }
        }
        if let Some(iv) = iv {
            interval = iv.numeric(b).map_err(xerr)?;
        }
        let n = norm(&state, &mu, var.name(), interval)?;
        steps.push(MeasureStep {
            index: i,
            kind: step.name().into(),
            variable: var.name().into(),
            interval: [interval.0, interval.1],
            norm: n,
            rel_err: (n - n0).abs() / n0,
        });
    }
    let max_rel_err = steps.iter().map(|s| s.rel_err).fold(0.0, f64::max);
    Ok(MeasureChainReport { test_function: psi.to_string(), source_norm: n0, steps, max_rel_err })
}
