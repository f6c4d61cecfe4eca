use serde_json::json;
use specmorph_core::potentials::{catalog, lookup, EndpointKind, PotentialSpec};

use crate::output::{CliError, Output};

fn endpoint(e: &specmorph_core::expr::Expr, k: EndpointKind, sign: &str) -> String {
    match k {
        EndpointKind::Infinite => format!("{sign}inf"),
        _ => e.to_string(),
    }
}

fn line(s: &PotentialSpec) -> String {
    let d = &s.domain;
    let params: Vec<String> = s.parameters.iter().map(|p| format!("{} {}", p.name, p.range_text())).collect();
    let mut out = format!(
        "{:<24} {}∈({}, {})  V = {}\n    params: {}",
        s.id,
        s.variable.name(),
        endpoint(&d.lo, d.lo_kind, "-"),
        endpoint(&d.hi, d.hi_kind, "+"),
        s.potential,
        if params.is_empty() { "-".into() } else { params.join(", ") },
    );
    if let Some(c) = s.closed_form {
        out.push_str(&format!("; closed form: {c:?}"));
    }
    if !s.active {
        out.push_str("; inactive");
    }
    if !s.aliases.is_empty() {
        out.push_str(&format!("\n    aliases: {}", s.aliases.join(", ")));
    }
    if !s.note.is_empty() {
        out.push_str(&format!("\n    {}", s.note));
    }
    out.push('\n');
    out
}

fn csv_row(s: &PotentialSpec) -> String {
    let q = |t: String| format!("\"{}\"", t.replace('"', "\"\""));
    format!(
        "{},{},{},{},{},{}\n",
        s.id,
        s.variable.name(),
        q(endpoint(&s.domain.lo, s.domain.lo_kind, "-")),
        q(endpoint(&s.domain.hi, s.domain.hi_kind, "+")),
        q(s.potential.to_string()),
        s.active
    )
}

pub fn run(id: Option<&str>) -> Result<Output, CliError> {
    let entries = match id {
        Some(id) => vec![lookup(id)?],
        None => catalog(),
    };
    let human: String = entries.iter().map(line).collect();
    let mut csv = String::from("id,variable,lo,hi,potential,active\n");
    csv.extend(entries.iter().map(csv_row));
    let json = if id.is_some() { json!(entries[0]) } else { json!(entries) };
    Ok(Output::ok(json, human).with_csv(csv))
}
