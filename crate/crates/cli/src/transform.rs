use std::collections::BTreeMap;

use serde_json::{json, Value};
use specmorph_core::diffop::DiffOp;
use specmorph_core::potentials::{build_schrodinger_op, lookup};
use specmorph_core::xform::{builtin_plan, run_pipeline_report, FlagStatus, PipelineResult, TransformPlan, XformError};

use crate::args::TransformArgs;
use crate::output::{exit, CliError, Output};

pub fn load_plan(name: &str, from: Option<&str>) -> Result<TransformPlan, CliError> {
    if name == "empty" {
        let id = from.ok_or_else(|| CliError::usage("`--plan empty` needs `--from`"))?;
        let spec = lookup(id)?;
        return Ok(TransformPlan::empty(&spec.id, spec.variable.name()));
    }
    if name.starts_with("builtin:") {
        return builtin_plan(name).map_err(|e| match e {
            XformError::Plan(m) => CliError::new(exit::NOT_FOUND, "not-found", m),
            other => other.into(),
        });
    }
    let text = std::fs::read_to_string(name)
        .map_err(|e| CliError::new(exit::NOT_FOUND, "not-found", format!("plan `{name}`: {e}")))?;
    Ok(TransformPlan::from_json(&text)?)
}

pub fn coefficients(op: &DiffOp) -> BTreeMap<String, String> {
    (0..=op.order() as u8).map(|k| (format!("d{k}"), op.coefficient(&[k]).to_string())).collect()
}

pub fn run_plan(args: &TransformArgs) -> Result<(TransformPlan, PipelineResult), CliError> {
    let plan = load_plan(&args.plan, args.from.as_deref())?;
    let source = lookup(args.from.as_deref().unwrap_or(&plan.source))?;
    if source.variable != plan.source_variable {
        return Err(CliError::new(
            exit::TRANSFORM,
            "transform",
            format!("`{}` is in `{}`, the plan starts in `{}`", source.id, source.variable.name(), plan.source_variable.name()),
        ));
    }
    let s0 = build_schrodinger_op(&source, &BTreeMap::new(), &plan.energy)?;
    let r = run_pipeline_report(&s0, &plan)?;
    Ok((plan, r))
}

/// The target entry's operator with the declared parameter map substituted.
fn matched_operator(plan: &TransformPlan, r: &PipelineResult) -> Result<Option<DiffOp>, CliError> {
    let Some(t) = &plan.target else { return Ok(None) };
    let target = lookup(t)?;
    let energy_name = plan.energy.to_string();
    let Some(e) = plan.parameter_map.get(&energy_name) else { return Ok(None) };
    let params: BTreeMap<String, _> =
        plan.parameter_map.iter().filter(|(k, _)| **k != energy_name).map(|(k, v)| (k.clone(), v.clone())).collect();
    if r.match_error.is_some() {
        return Ok(None);
    }
    Ok(Some(build_schrodinger_op(&target, &params, e)?))
}

pub fn run(args: &TransformArgs) -> Result<Output, CliError> {
    let (plan, r) = run_plan(args)?;
    let source = args.from.clone().unwrap_or_else(|| plan.source.clone());
    let matched = matched_operator(&plan, &r)?;
    let steps: Vec<Value> = r
        .steps
        .iter()
        .map(|s| {
            json!({
                "index": s.index,
                "kind": s.kind,
                "function": s.function,
                "solved_constant": s.solved_constant,
                "variable": s.variable,
                "measure": { "density": s.measure_density, "constant": s.measure_constant },
                "operator": coefficients(&s.operator),
            })
        })
        .collect();
    let json = json!({
        "command": "transform",
        "plan": plan.id,
        "source": source,
        "target": plan.target,
        "operator": coefficients(&r.operator),
        "matched_operator": matched.as_ref().map(coefficients),
        "relation": r.relation.to_json(),
        "steps": steps,
        "flags": r.flags,
        "fit": r.fit,
        "match_error": r.match_error.as_ref().map(|e| e.to_string()),
    });

    let mut h = format!("plan {} on {source}\n", plan.id);
    for s in &r.steps {
        h.push_str(&format!("  step {} {:<11} {}", s.index, s.kind, s.function));
        if let Some(c) = &s.solved_constant {
            h.push_str(&format!("  (C = {c})"));
        }
        h.push_str(&format!("\n      measure d{} · {} · {}\n", s.variable, s.measure_constant, s.measure_density));
    }
    match &matched {
        Some(m) if r.match_error.is_none() => {
            h.push_str(&format!(
                "transformed operator in {} (target form with the matched parameters; raw coefficients in --format json):\n",
                r.relation.target_variable.name()
            ));
            for (k, c) in coefficients(m) {
                h.push_str(&format!("  {k}: {c}\n"));
            }
        }
        _ => {
            h.push_str(&format!("transformed operator in {}:\n", r.relation.target_variable.name()));
            for (k, c) in coefficients(&r.operator) {
                h.push_str(&format!("  {k}: {c}\n"));
            }
        }
    }
    let rel = &r.relation;
    h.push_str(&format!(
        "relation: G[{}](x_f, x_0) = {} · h(x_f) h(x_0) · G[{}]({}(x_f), {}(x_0))\n  h(x) = {}\n  {} = {}\n",
        rel.source,
        rel.overall_constant,
        rel.target,
        rel.target_variable.name(),
        rel.target_variable.name(),
        rel.endpoint_prefactor,
        rel.target_variable.name(),
        rel.argument_map,
    ));
    for (k, v) in &rel.parameter_map {
        h.push_str(&format!("  {k}′ = {v}\n"));
    }
    if !r.flags.is_empty() {
        h.push_str("comparison with reference forms:\n");
    }
    for f in &r.flags {
        let tag = match f.status {
            FlagStatus::Match => "match",
            FlagStatus::Mismatch => "MISMATCH",
            FlagStatus::Info => "info",
        };
        h.push_str(&format!("  [{tag}] {}: {}", f.component, f.detail));
        if let Some(d) = f.max_deviation {
            h.push_str(&format!(" (max dev {d:.3e})"));
        }
        h.push('\n');
    }
    let mut out = Output::ok(json, h);
    if r.match_error.is_some() {
        out = out.with_code(exit::TRANSFORM);
    }
    Ok(out)
}
