//! Operator transformations between Schrödinger problems: point canonical
//! transformation, similarity, conjugation and rescaling, with measure tracking.

mod matching;
mod pipeline;
mod plan;

use std::collections::BTreeMap;

use crate::diffop::{DiffOp, DiffOpError, Measure};
use crate::expr::{reconstruct_rational, Bindings, Expr, ExprError, Scalar, Symbol};
use crate::potentials::PotentialError;

pub use matching::{least_squares, match_parameters, ParameterFit};
pub use pipeline::{run_pipeline, run_pipeline_report, Flag, FlagStatus, PipelineResult, PropagatorRelation, StepRecord};
pub use plan::{builtin_plan, ReferenceForm, TransformPlan, BUILTIN_RM_TO_PT};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum XformError {
    #[error("singular transform: {0}")]
    SingularTransform(String),
    #[error("not proportional: {0}")]
    NotProportional(String),
    #[error("no parameter match (residual {residual:.3e}): {detail}")]
    NoMatch { residual: f64, detail: String },
    #[error("plan: {0}")]
    Plan(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    DiffOp(#[from] DiffOpError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Working interval with endpoints given as expressions in the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: Expr,
    pub hi: Expr,
}

impl Interval {
    pub fn new(lo: Expr, hi: Expr) -> Self {
        Interval { lo, hi }
    }

    pub fn numeric(&self, b: &Bindings) -> Result<(f64, f64), XformError> {
        let lo = self.lo.eval(b)?;
        let hi = self.hi.eval(b)?;
        if !(lo < hi) {
            return Err(XformError::Plan(format!("empty interval [{lo}, {hi}]")));
        }
        Ok((lo, hi))
    }

    /// `n` interior points, excluding a relative margin at both ends.
    pub fn interior(&self, b: &Bindings, n: usize, margin: f64) -> Result<Vec<f64>, XformError> {
        let (lo, hi) = self.numeric(b)?;
        let (lo, hi) = (lo + margin * (hi - lo), hi - margin * (hi - lo));
        Ok((0..n).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransformStep {
    /// Old variable `= f(new variable)`; `inverse` expresses the new variable in the
    /// old one and is needed for the propagator argument map.
    Pct { f: Expr, inverse: Option<Expr> },
    Similarity { g: Expr },
    /// With `solve_constant`, `g` is scaled by `C^{1/2}` from
    /// [`solve_kinetic_constant`] before use.
    Conjugation { g: Expr, solve_constant: bool },
    /// State rescaling `⟨x| → c⟨x|`.
    Rescale { c: Expr },
}

impl TransformStep {
    pub fn name(&self) -> &'static str {
        match self {
            TransformStep::Pct { .. } => "pct",
            TransformStep::Similarity { .. } => "similarity",
            TransformStep::Conjugation { .. } => "conjugation",
            TransformStep::Rescale { .. } => "rescale",
        }
    }
}

const CHECK_POINTS: usize = 257;

/// Require `e(var)` finite, nonzero and of one sign on the open interval.
fn check_definite(
    e: &Expr,
    var: &Symbol,
    iv: &Interval,
    b: &Bindings,
    what: &str,
) -> Result<(), XformError> {
    let mut sign = 0.0;
    for t in iv.interior(b, CHECK_POINTS, 1e-3)? {
        let mut bt = b.clone();
        bt.set(var.name(), t);
        let v = e.eval(&bt).map_err(|err| {
            XformError::SingularTransform(format!("{what} undefined at {}={t}: {err}", var.name()))
        })?;
        if v == 0.0 || (sign != 0.0 && v.signum() != sign) {
            return Err(XformError::SingularTransform(format!(
                "{what} vanishes or changes sign near {}={t}",
                var.name()
            )));
        }
        sign = v.signum();
    }
    Ok(())
}

/// Point canonical transformation: substitute `old = f(new)` and realize
/// `∂_old^n` as `((1/f′) ∂_new)^n`. Derivatives in other variables are untouched.
pub fn pct(op: &DiffOp, old: &Symbol, f: &Expr, new: &Symbol) -> DiffOp {
    let vars: Vec<Symbol> =
        op.variables().iter().map(|v| if v == old { new.clone() } else { v.clone() }).collect();
    let Some(pos) = op.variables().iter().position(|v| v == old) else {
        return op.clone();
    };
    let fp = f.derivative(new);
    let d = DiffOp::partial(&vars, new, 1).left_mul(&fp.recip());
    let mut map = BTreeMap::new();
    map.insert(old.clone(), f.clone());
    let mut powers = vec![DiffOp::identity(&vars)];
    let mut out = DiffOp::zero(&vars);
    for (idx, c) in op.terms() {
        let n = idx[pos] as usize;
        while powers.len() <= n {
            let next = d.compose(powers.last().unwrap());
            powers.push(next);
        }
        let mut rest = idx.clone();
        rest[pos] = 0;
        let others = DiffOp::from_terms(&vars, [(rest, Expr::one())]);
        let term = powers[n].compose(&others).left_mul(&c.substitute_all(&map));
        out = out.add(&term);
    }
    out
}

/// [`pct`] with the monotonicity precondition checked on `iv` (in the new variable).
pub fn pct_checked(
    op: &DiffOp,
    old: &Symbol,
    f: &Expr,
    new: &Symbol,
    iv: &Interval,
    b: &Bindings,
) -> Result<DiffOp, XformError> {
    check_definite(&f.derivative(new), new, iv, b, "f′")?;
    Ok(pct(op, old, f, new))
}

/// `g ∘ op ∘ g⁻¹`.
pub fn similarity(op: &DiffOp, g: &Expr) -> DiffOp {
    let vs = op.variables();
    DiffOp::multiplication(vs, g.clone())
        .compose(&op.compose(&DiffOp::multiplication(vs, g.clone().recip())))
}

/// `g ∘ op ∘ g`.
pub fn conjugate(op: &DiffOp, g: &Expr) -> DiffOp {
    let vs = op.variables();
    let m = DiffOp::multiplication(vs, g.clone());
    m.compose(&op.compose(&m))
}

pub fn similarity_checked(
    op: &DiffOp,
    g: &Expr,
    var: &Symbol,
    iv: &Interval,
    b: &Bindings,
) -> Result<DiffOp, XformError> {
    check_definite(g, var, iv, b, "similarity factor")?;
    Ok(similarity(op, g))
}

pub fn conjugate_checked(
    op: &DiffOp,
    g: &Expr,
    var: &Symbol,
    iv: &Interval,
    b: &Bindings,
) -> Result<DiffOp, XformError> {
    check_definite(g, var, iv, b, "conjugation factor")?;
    Ok(conjugate(op, g))
}

/// Measure rules: PCT `ρ(old) → ρ(f(new)) f′(new)`; similarity by `g`: `ρ → ρ/g²`;
/// conjugation: unchanged; rescale by `c`: constant `→ constant/c²`.
///
/// For PCT the measure variable becomes `new`, supplied through `new_var`.
pub fn transform_measure(
    mu: &Measure,
    step: &TransformStep,
    new_var: &Symbol,
) -> Result<Measure, XformError> {
    Ok(match step {
        TransformStep::Pct { f, .. } => {
            let density = mu.density.substitute(&mu.var, f) * f.derivative(new_var);
            Measure { var: new_var.clone(), density, constant: mu.constant.clone() }
        }
        TransformStep::Similarity { g } => Measure {
            var: mu.var.clone(),
            density: mu.density.clone() * Expr::powi(g.clone(), -2),
            constant: mu.constant.clone(),
        },
        TransformStep::Conjugation { .. } => mu.clone(),
        TransformStep::Rescale { c } => {
            let c2 = Expr::powi(c.clone(), 2);
            let inv = c2
                .as_const()
                .and_then(Scalar::inv)
                .ok_or_else(|| XformError::Plan(format!("rescale factor {c} must have a constant square")))?;
            Measure { var: mu.var.clone(), density: mu.density.clone(), constant: &mu.constant * &inv }
        }
    })
}

/// `C` such that `C^{1/2} g` conjugation brings the `∂²_var` coefficient of `op` to
/// `−ħ²/2μ`. Sampled on `iv` and reconstructed as a rational.
pub fn solve_kinetic_constant(
    op: &DiffOp,
    g: &Expr,
    var: &Symbol,
    iv: &Interval,
    b: &Bindings,
) -> Result<Scalar, XformError> {
    let c2 = op.coefficient_of(var, 2);
    if c2.is_zero() {
        return Err(XformError::NotProportional("no second-derivative term".into()));
    }
    let want = (Expr::powi(Expr::param("hbar"), 2) / (Expr::int(2) * Expr::param("mu"))).neg();
    let ratio_expr = want / (Expr::powi(g.clone(), 2) * c2);
    let mut vals = Vec::new();
    for t in iv.interior(b, 17, 0.02)? {
        let mut bt = b.clone();
        bt.set(var.name(), t);
        vals.push(ratio_expr.eval(&bt)?);
    }
    let c = vals[0];
    if vals.iter().any(|v| (v - c).abs() > 1e-9 * c.abs().max(1.0)) {
        return Err(XformError::NotProportional(format!(
            "ratio ranges over [{}, {}]",
            vals.iter().cloned().fold(f64::INFINITY, f64::min),
            vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        )));
    }
    if c <= 0.0 {
        return Err(XformError::NotProportional(format!("constant {c} is not positive")));
    }
    reconstruct_rational(c, 10_000, 1e-9 * c.abs().max(1.0))
        .map(Scalar::real)
        .ok_or_else(|| XformError::NotProportional(format!("constant {c} is not a small rational")))
}

#[cfg(test)]
mod tests;
