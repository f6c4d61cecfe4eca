use std::collections::BTreeMap;

use serde_json::json;
use specmorph_core::liealg::{pt_spectrum_from_rep, rm_spectrum_from_rep};
use specmorph_core::numeric::{fd_spectrum, Grid};
use specmorph_core::potentials::{
    closed_form_spectrum, lookup, pt_coupling_from_exponent, pt_exponent, ClosedForm, Consts, EndpointKind,
    PotentialSpec, SpectrumResult,
};

use crate::args::{ConstArgs, GridArgs, Method, SpectrumArgs};
use crate::output::{CliError, Output};

pub const DEFAULT_FD_POINTS: usize = 4000;
/// Infinite ends are cut at `±DEFAULT_CUT/a`.
pub const DEFAULT_CUT: f64 = 16.0;

pub fn consts(c: &ConstArgs) -> Consts {
    Consts { hbar: c.hbar, mu: c.mu, a: c.a }
}

pub fn grid_for(spec: &PotentialSpec, c: &Consts, g: &GridArgs) -> Result<Grid, CliError> {
    let grid = match g.grid {
        Some((lo, hi, n)) => Grid::new(spec.variable.name(), lo, hi, n)?,
        None => Grid::for_spec(spec, c, DEFAULT_FD_POINTS, DEFAULT_CUT / c.a)?,
    };
    Ok(grid.with_inset(g.inset)?)
}

fn get(p: &BTreeMap<String, f64>, k: &str) -> Result<f64, CliError> {
    p.get(k).copied().ok_or_else(|| CliError::usage(format!("missing parameter `{k}`")))
}

fn params(a: &SpectrumArgs) -> BTreeMap<String, f64> {
    let mut p: BTreeMap<String, f64> = a.params.iter().cloned().collect();
    for (k, v) in [("gamma", a.gamma), ("delta", a.delta), ("omega", a.omega)] {
        if let Some(v) = v {
            p.insert(k.into(), v);
        }
    }
    p
}

/// Pöschl-Teller exponents from either `gamma, delta` or the couplings `A, B`.
fn pt_exponents(p: &BTreeMap<String, f64>, c: &Consts) -> Result<(f64, f64), CliError> {
    match (p.get("gamma"), p.get("delta")) {
        (Some(&g), Some(&d)) => Ok((g, d)),
        _ => Ok((pt_exponent(get(p, "A")?, c)?, pt_exponent(get(p, "B")?, c)?)),
    }
}

fn fd_params(spec: &PotentialSpec, p: &BTreeMap<String, f64>, c: &Consts) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = p.clone();
    if spec.closed_form == Some(ClosedForm::PoschlTeller) {
        let (g, d) = pt_exponents(p, c)?;
        out.remove("gamma");
        out.remove("delta");
        out.insert("A".into(), pt_coupling_from_exponent(g, c));
        out.insert("B".into(), pt_coupling_from_exponent(d, c));
    }
    for q in &spec.parameters {
        if q.name != "a" && !out.contains_key(&q.name) {
            return Err(CliError::usage(format!("missing parameter `{}`", q.name)));
        }
    }
    Ok(out)
}

fn qn_text(l: &specmorph_core::potentials::Level) -> String {
    l.quantum_numbers.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

pub fn run(a: &SpectrumArgs) -> Result<Output, CliError> {
    let spec = lookup(&a.id)?;
    let c = consts(&a.consts);
    let p = params(a);
    let mut grid_json = serde_json::Value::Null;
    let result: SpectrumResult = match a.method {
        Method::ClosedForm => closed_form_spectrum(&spec, &p, &c, a.count)?,
        Method::Rep => match spec.closed_form {
            Some(ClosedForm::PoschlTeller) => {
                let (g, d) = pt_exponents(&p, &c)?;
                pt_spectrum_from_rep(g, d, a.count, &c)?
            }
            Some(ClosedForm::RosenMorse) => rm_spectrum_from_rep(get(&p, "A")?, get(&p, "B")?, &c, a.count)?,
            _ => return Err(CliError::usage(format!("no representation labels for `{}`", spec.id))),
        },
        Method::Fd => {
            let grid = grid_for(&spec, &c, &a.grid)?;
            let fp = fd_params(&spec, &p, &c)?;
            let (s, _) = fd_spectrum(&spec, &fp, &c, &grid, a.count)?;
            grid_json = json!(grid);
            s
        }
    };
    // relative error against the closed form when one exists
    let reference = if a.method != Method::ClosedForm && spec.closed_form.is_some() {
        closed_form_spectrum(&spec, &p, &c, a.count).ok()
    } else {
        None
    };
    let rel_err: Vec<Option<f64>> = result
        .entries
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let r = reference.as_ref()?.entries.get(i)?;
            if l.flag.is_some() {
                return None;
            }
            Some((l.energy - r.energy).abs() / r.energy.abs().max(f64::MIN_POSITIVE))
        })
        .collect();

    let mut human = format!("{} ({:?}), ħ={} μ={} a={}\n", spec.id, a.method, c.hbar, c.mu, c.a);
    let mut csv = String::from("level,quantum_numbers,energy,rel_err\n");
    for (i, (l, e)) in result.entries.iter().zip(&rel_err).enumerate() {
        human.push_str(&format!("  {i:>3}  {:<18} {:>22.15e}", qn_text(l), l.energy));
        if let Some(e) = e {
            human.push_str(&format!("  rel_err {e:.2e}"));
        }
        if let Some(f) = &l.flag {
            human.push_str(&format!("  [{f}]"));
        }
        human.push('\n');
        csv.push_str(&format!("{i},{},{:.15e},{}\n", qn_text(l), l.energy, e.map(|v| format!("{v:.3e}")).unwrap_or_default()));
    }
    if let Some(t) = &result.truncation {
        human.push_str(&format!("  note: {t}\n"));
    }
    let infinite = spec.domain.lo_kind == EndpointKind::Infinite || spec.domain.hi_kind == EndpointKind::Infinite;
    let json = json!({
        "command": "spectrum",
        "id": spec.id,
        "method": format!("{:?}", a.method),
        "params": p,
        "spectrum": result,
        "rel_err": rel_err,
        "grid": grid_json,
        "box_sensitivity_checked": a.method == Method::Fd && infinite,
    });
    Ok(Output::ok(json, human).with_csv(csv))
}
