//! Fold a plan over a Schrödinger operator and assemble the propagator relation.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::matching::{match_parameters, ParameterFit};
use super::plan::TransformPlan;
use super::{
    conjugate_checked, pct_checked, similarity_checked, solve_kinetic_constant, transform_measure,
    Interval, TransformStep, XformError,
};
use crate::diffop::{op_equal, DiffOp, Measure};
use crate::expr::{numerically_equal, reconstruct_rational, Bindings, Expr, SampleDomain, Scalar, Symbol};
use crate::potentials::lookup;

/// `G_source(x_f, x_0; E) = overall_constant · h(x_f) · h(x_0) · G_target(θ(x_f), θ(x_0))`
/// with `h = endpoint_prefactor` and `θ = argument_map`, both in the source variable.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorRelation {
    pub source: String,
    pub target: String,
    pub source_variable: Symbol,
    pub target_variable: Symbol,
    pub argument_map: Expr,
    /// Inverse of `argument_map`: the source variable in terms of the target one.
    pub coordinate_map: Expr,
    pub endpoint_prefactor: Expr,
    pub overall_constant: Scalar,
    /// Target parameter → expression in the source parameters and energy.
    pub parameter_map: BTreeMap<String, Expr>,
    pub measure_out: Measure,
    /// Product of the similarity factors, in the target variable.
    pub similarity_factor: Expr,
    /// Product of the conjugation factors, in the target variable.
    pub conjugation_factor: Expr,
    /// Product of the state rescalings `c`.
    pub state_rescale: Expr,
}

impl PropagatorRelation {
    pub fn identity(source: &str, var: &Symbol) -> Self {
        PropagatorRelation {
            source: source.into(),
            target: source.into(),
            source_variable: var.clone(),
            target_variable: var.clone(),
            argument_map: Expr::sym(var),
            coordinate_map: Expr::sym(var),
            endpoint_prefactor: Expr::one(),
            overall_constant: Scalar::one(),
            parameter_map: BTreeMap::new(),
            measure_out: Measure::flat(var),
            similarity_factor: Expr::one(),
            conjugation_factor: Expr::one(),
            state_rescale: Expr::one(),
        }
    }

    /// Map a source eigenfunction value `ψ(x)` to the target problem's state at
    /// `θ(x)`: `ψ′ = c · g₁ · ψ` in the tracked measure (orthonormal when `ψ` is).
    pub fn state_weight(&self) -> Expr {
        self.state_rescale.clone() * self.similarity_factor.clone()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "source": self.source,
            "target": self.target,
            "source_variable": self.source_variable.name(),
            "target_variable": self.target_variable.name(),
            "argument_map": self.argument_map.to_string(),
            "coordinate_map": self.coordinate_map.to_string(),
            "endpoint_prefactor": self.endpoint_prefactor.to_string(),
            "overall_constant": self.overall_constant.to_string(),
            "parameter_map": self.parameter_map.iter().map(|(k, v)| (k.clone(), v.to_string())).collect::<BTreeMap<_, _>>(),
            "measure_out": {
                "variable": self.measure_out.var.name(),
                "density": self.measure_out.density.to_string(),
                "constant": self.measure_out.constant.to_string(),
            },
            "similarity_factor": self.similarity_factor.to_string(),
            "conjugation_factor": self.conjugation_factor.to_string(),
            "state_rescale": self.state_rescale.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlagStatus {
    Match,
    Mismatch,
    Info,
}

/// One line of the comparison report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flag {
    pub component: String,
    pub status: FlagStatus,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
}

impl Flag {
    fn new(component: &str, status: FlagStatus, detail: impl Into<String>, dev: Option<f64>) -> Self {
        Flag { component: component.into(), status, detail: detail.into(), max_deviation: dev }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub index: usize,
    pub kind: String,
    pub function: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solved_constant: Option<String>,
    pub variable: String,
    pub measure_density: String,
    pub measure_constant: String,
    /// Operator after the step.
    #[serde(skip)]
    pub operator: DiffOp,
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub operator: DiffOp,
    pub relation: PropagatorRelation,
    pub steps: Vec<StepRecord>,
    pub flags: Vec<Flag>,
    pub fit: Option<ParameterFit>,
    /// Set when a target is named and matching failed.
    pub match_error: Option<XformError>,
}

impl PipelineResult {
    pub fn mismatches(&self) -> impl Iterator<Item = &Flag> {
        self.flags.iter().filter(|f| f.status == FlagStatus::Mismatch)
    }
}

fn domain_for(var: &Symbol, iv: Option<&Interval>, b: &Bindings) -> Result<SampleDomain, XformError> {
    let (lo, hi) = match iv {
        Some(iv) => iv.numeric(b)?,
        None => (-2.0, 2.0),
    };
    Ok(SampleDomain::new().range(var.name(), lo, hi).with_bindings(b).margin(0.03))
}

fn numeric_constant(e: &Expr, var: &Symbol, iv: Option<&Interval>, b: &Bindings) -> Result<f64, XformError> {
    let d = domain_for(var, iv, b)?;
    let pts = d.points(0, 9);
    let v0 = e.eval(&pts[0])?;
    for p in &pts[1..] {
        let v = e.eval(p)?;
        if (v - v0).abs() > 1e-9 * v0.abs().max(1.0) {
            return Err(XformError::Plan(format!(
                "tracked measure density {e} is not constant ({v0} vs {v}); no symmetric relation"
            )));
        }
    }
    Ok(v0)
}

fn perturbed(b: &Bindings, seed: u64, count: usize) -> Vec<Bindings> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<(String, f64)> = b.iter().map(|(k, v)| (k.to_string(), v)).collect();
    names.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = vec![b.clone()];
    for _ in 0..count {
        let mut p = Bindings::new();
        for (k, v) in &names {
            p.set(k, v * rng.gen_range(0.8..1.2));
        }
        out.push(p);
    }
    out
}

/// Run every step and gather comparisons; a failed target match is recorded in the
/// result rather than returned.
pub fn run_pipeline_report(s0: &DiffOp, plan: &TransformPlan) -> Result<PipelineResult, XformError> {
    let b = &plan.check_bindings;
    let source_var = plan.source_variable.clone();
    if s0.variables() != std::slice::from_ref(&source_var) {
        return Err(XformError::Plan(format!("operator must be in `{}` alone", source_var.name())));
    }
    let mut op = s0.clone();
    let mut var = source_var.clone();
    let mut mu = Measure::flat(&var);
    let mut arg_map = Expr::sym(&var);
    let mut coord_map = Expr::sym(&var);
    let mut g1 = Expr::one();
    let mut g2 = Expr::one();
    let mut rescale = Expr::one();
    let mut c2_total = Scalar::one();
    let mut last_iv: Option<Interval> = None;
    let mut steps = Vec::new();
    let mut flags = Vec::new();

    for (i, (step, iv)) in plan.steps.iter().enumerate() {
        if iv.is_some() {
            last_iv = iv.clone();
        }
        let need_iv = || {
            iv.clone().ok_or_else(|| XformError::Plan(format!("step {i} ({}) needs an interval", step.name())))
        };
        let mut solved = None;
        let function;
        match step {
            TransformStep::Pct { f, inverse } => {
                let iv = need_iv()?;
                let new = plan.target_variable.clone();
                op = pct_checked(&op, &var, f, &new, &iv, b)?;
                mu = transform_measure(&mu, step, &new)?;
                let inv = inverse
                    .clone()
                    .ok_or_else(|| XformError::Plan(format!("pct step {i} needs `inverse`")))?;
                check_inverse(f, &inv, &var, &new, &iv, b)?;
                arg_map = inv.substitute(&var, &arg_map);
                coord_map = coord_map.substitute(&var, f);
                g1 = g1.substitute(&var, f);
                g2 = g2.substitute(&var, f);
                var = new;
                function = f.to_string();
            }
            TransformStep::Similarity { g } => {
                let iv = need_iv()?;
                op = similarity_checked(&op, g, &var, &iv, b)?;
                mu = transform_measure(&mu, step, &var)?;
                g1 = g1 * g.clone();
                function = g.to_string();
            }
            TransformStep::Conjugation { g, solve_constant } => {
                let iv = need_iv()?;
                let gg = if *solve_constant {
                    let c = solve_kinetic_constant(&op, g, &var, &iv, b)?;
                    solved = Some(c.to_string());
                    Expr::pow(Expr::constant(c), crate::expr::ratio(1, 2)) * g.clone()
                } else {
                    g.clone()
                };
                op = conjugate_checked(&op, &gg, &var, &iv, b)?;
                g2 = g2 * gg.clone();
                function = gg.to_string();
            }
            TransformStep::Rescale { c } => {
                mu = transform_measure(&mu, step, &var)?;
                let c2 = Expr::powi(c.clone(), 2);
                c2_total = &c2_total * c2.as_const().expect("checked by transform_measure");
                rescale = rescale * c.clone();
                function = c.to_string();
            }
        }
        steps.push(StepRecord {
            index: i,
            kind: step.name().into(),
            function,
            solved_constant: solved,
            variable: var.name().into(),
            measure_density: mu.density.to_string(),
            measure_constant: mu.constant.to_string(),
            operator: op.clone(),
        });
        for r in plan.reference_forms.iter().filter(|r| r.after_step == i) {
            let reference = DiffOp::from_terms(
                std::slice::from_ref(&var),
                r.coefficients.iter().map(|(k, c)| (vec![*k], c.clone())),
            );
            let d = domain_for(&var, last_iv.as_ref(), b)?;
            let rep = op_equal(&op, &reference, &d, 17)?;
            let status = if rep.equal { FlagStatus::Match } else { FlagStatus::Mismatch };
            let mut detail = format!("{} after step {i} ({})", r.name, step.name());
            if let Some(w) = &rep.worst_term {
                detail.push_str(&format!("; worst term ∂^{}", w[0]));
            }
            if let Some(n) = &r.note {
                detail.push_str(&format!("; reference: {n}"));
            }
            flags.push(Flag::new(&r.name, status, detail, Some(rep.max_abs_diff)));
        }
    }

    // measure after all steps; the rescale constants are divided out below
    let density_value = if plan.steps.is_empty() {
        1.0
    } else {
        numeric_constant(&mu.weight(), &var, last_iv.as_ref(), b)?
    };
    let pre_rescale = density_value.abs() * c2_total.to_c64().re;
    let overall = reconstruct_rational(1.0 / pre_rescale, 10_000, 1e-12)
        .map(Scalar::real)
        .ok_or_else(|| XformError::Plan(format!("overall constant 1/{pre_rescale} is not a small rational")))?;
    let h = (g2.clone() / g1.clone()).substitute(&var, &arg_map);

    let target_id = plan.target.clone().unwrap_or_else(|| plan.source.clone());
    let relation = PropagatorRelation {
        source: plan.source.clone(),
        target: target_id.clone(),
        source_variable: source_var.clone(),
        target_variable: var.clone(),
        argument_map: arg_map,
        coordinate_map: coord_map,
        endpoint_prefactor: h,
        overall_constant: overall,
        parameter_map: plan.parameter_map.clone(),
        measure_out: mu,
        similarity_factor: g1,
        conjugation_factor: g2,
        state_rescale: rescale,
    };

    if let Some(p) = &plan.reference_prefactor {
        let d = SampleDomain::new().range(source_var.name(), -2.0, 2.0).with_bindings(b);
        let rep = numerically_equal(&relation.endpoint_prefactor, p, &d, 5)?;
        let status = if rep.equal { FlagStatus::Match } else { FlagStatus::Mismatch };
        flags.push(Flag::new(
            "prefactor",
            status,
            format!("h(x) = {} vs reference {p}", relation.endpoint_prefactor),
            Some(rep.max_abs_diff),
        ));
    }
    if let Some(c) = &plan.reference_constant {
        let got = relation.overall_constant.to_c64();
        let want = c.eval_complex(b)?;
        let dev = (got - want).norm();
        let status = if dev < 1e-12 { FlagStatus::Match } else { FlagStatus::Mismatch };
        flags.push(Flag::new(
            "overall-constant",
            status,
            format!("{} vs reference {c}; the factor i belongs to the resolvent definition", relation.overall_constant),
            Some(dev),
        ));
    }

    let mut fit = None;
    let mut match_error = None;
    if let Some(tid) = &plan.target {
        let target = lookup(tid)?;
        match match_parameters(&op, &target, &plan.target_couplings, b) {
            Ok(f0) => {
                compare_parameter_map(&op, plan, &target, &mut flags)?;
                compare_constant_term(plan, &f0, &mut flags)?;
                fit = Some(f0);
            }
            Err(e) => {
                flags.push(Flag::new("match", FlagStatus::Mismatch, e.to_string(), None));
                match_error = Some(e);
            }
        }
    }

    Ok(PipelineResult { operator: op, relation, steps, flags, fit, match_error })
}

/// [`run_pipeline_report`], failing on a target match error.
pub fn run_pipeline(s0: &DiffOp, plan: &TransformPlan) -> Result<PipelineResult, XformError> {
    let r = run_pipeline_report(s0, plan)?;
    match r.match_error {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// `f(inverse(x)) = x` on the image of the interval.
fn check_inverse(
    f: &Expr,
    inv: &Expr,
    old: &Symbol,
    new: &Symbol,
    iv: &Interval,
    b: &Bindings,
) -> Result<(), XformError> {
    for t in iv.interior(b, 33, 0.01)? {
        let mut bt = b.clone();
        bt.set(new.name(), t);
        let x = f.eval(&bt)?;
        let mut bx = b.clone();
        bx.set(old.name(), x);
        let back = inv.eval(&bx)?;
        if (back - t).abs() > 1e-8 * t.abs().max(1.0) {
            return Err(XformError::Plan(format!("inverse is wrong: {t} ↦ {x} ↦ {back}")));
        }
    }
    Ok(())
}

fn compare_parameter_map(
    op: &DiffOp,
    plan: &TransformPlan,
    target: &crate::potentials::PotentialSpec,
    flags: &mut Vec<Flag>,
) -> Result<(), XformError> {
    if plan.parameter_map.is_empty() {
        return Ok(());
    }
    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    for bp in perturbed(&plan.check_bindings, 99, 4) {
        let f = match_parameters(op, target, &plan.target_couplings, &bp)?;
        for (k, e) in &plan.parameter_map {
            let want = e.eval(&bp)?;
            let got = f.values.get(k).copied().unwrap_or(f64::NAN);
            let rel = (got - want).abs() / want.abs().max(1e-300);
            let w = worst.entry(k.clone()).or_insert(0.0);
            *w = w.max(if rel.is_nan() { f64::INFINITY } else { rel });
        }
    }
    for (k, e) in &plan.parameter_map {
        let dev = worst[k];
        let status = if dev < 1e-9 { FlagStatus::Match } else { FlagStatus::Mismatch };
        let what = if k == "E" { "target energy" } else { "coupling" };
        flags.push(Flag::new(
            &format!("parameter:{k}"),
            status,
            format!("{what} {k} = {e} over 5 parameter points"),
            Some(dev),
        ));
    }
    Ok(())
}

fn compare_constant_term(plan: &TransformPlan, fit: &ParameterFit, flags: &mut Vec<Flag>) -> Result<(), XformError> {
    let b = &plan.check_bindings;
    for r in &plan.reference_forms {
        if let Some(c) = &r.constant_term {
            let want = c.eval(b)?;
            let got = -fit.values["E"];
            let dev = (got - want).abs();
            let status = if dev < 1e-9 * want.abs().max(1.0) { FlagStatus::Match } else { FlagStatus::Mismatch };
            flags.push(Flag::new(
                &format!("{}:constant", r.name),
                status,
                format!("constant term {got} from the pipeline vs reference {c} = {want} at the check point"),
                Some(dev),
            ));
        }
    }
    Ok(())
}
