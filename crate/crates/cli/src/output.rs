use std::io::Write;

use serde_json::{json, Value};

use crate::args::Format;

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const NOT_FOUND: i32 = 2;
    pub const TRANSFORM: i32 = 3;
    pub const NO_BOUND_STATES: i32 = 4;
    pub const VERIFICATION: i32 = 5;
}

/// A rendered command result. `code` is the process exit status.
pub struct Output {
    pub json: Value,
    pub human: String,
    pub csv: Option<String>,
    pub code: i32,
}

impl Output {
    pub fn ok(json: Value, human: String) -> Self {
        Output { json, human, csv: None, code: exit::OK }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_code(mut self, code: i32) -> Self {
        self.code = code;
        self
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub reason: String,
}

impl CliError {
    pub fn new(code: i32, kind: &'static str, reason: impl Into<String>) -> Self {
        CliError { code, kind, reason: reason.into() }
    }

    pub fn usage(reason: impl Into<String>) -> Self {
        CliError::new(exit::USAGE, "usage", reason)
    }
}

impl From<specmorph_core::potentials::PotentialError> for CliError {
    fn from(e: specmorph_core::potentials::PotentialError) -> Self {
        use specmorph_core::potentials::PotentialError as P;
        match &e {
            P::NotFound(_) => CliError::new(exit::NOT_FOUND, "not-found", e.to_string()),
            P::NoBoundStates(_) => CliError::new(exit::NO_BOUND_STATES, "no-bound-states", e.to_string()),
            _ => CliError::new(exit::USAGE, "parameter", e.to_string()),
        }
    }
}

impl From<specmorph_core::xform::XformError> for CliError {
    fn from(e: specmorph_core::xform::XformError) -> Self {
        use specmorph_core::xform::XformError as X;
        match e {
            X::Potential(p) => p.into(),
            X::SingularTransform(_) => CliError::new(exit::TRANSFORM, "singular-transform", e.to_string()),
            X::NoMatch { .. } => CliError::new(exit::TRANSFORM, "no-match", e.to_string()),
            X::NotProportional(_) => CliError::new(exit::TRANSFORM, "not-proportional", e.to_string()),
            _ => CliError::new(exit::TRANSFORM, "transform", e.to_string()),
        }
    }
}

impl From<specmorph_core::liealg::LieError> for CliError {
    fn from(e: specmorph_core::liealg::LieError) -> Self {
        use specmorph_core::liealg::LieError as L;
        match e {
            L::Potential(p) => p.into(),
            _ => CliError::new(exit::VERIFICATION, "algebra", e.to_string()),
        }
    }
}

impl From<specmorph_core::numeric::NumericError> for CliError {
    fn from(e: specmorph_core::numeric::NumericError) -> Self {
        use specmorph_core::numeric::NumericError as N;
        match e {
            N::Potential(p) => p.into(),
            _ => CliError::new(exit::VERIFICATION, "numeric", e.to_string()),
        }
    }
}

impl From<specmorph_core::expr::ExprError> for CliError {
    fn from(e: specmorph_core::expr::ExprError) -> Self {
        CliError::new(exit::USAGE, "expression", e.to_string())
    }
}

/// Print `out` in `format`; JSON always gains the seed. A closed stdout is not an error.
pub fn emit(out: &Output, format: Format, seed: u64) {
    let text = match format {
        Format::Human => out.human.clone(),
        Format::Json => {
            let mut v = out.json.clone();
            if let Value::Object(m) = &mut v {
                m.insert("seed".into(), json!(seed));
            }
            serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
        }
        Format::Csv => out.csv.clone().unwrap_or_else(|| out.human.clone()),
    };
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

pub fn emit_error(e: &CliError, format: Format, seed: u64) {
    if format == Format::Json {
        let v = json!({ "error": e.kind, "reason": e.reason, "exit_code": e.code, "seed": seed });
        println!("{}", serde_json::to_string_pretty(&v).expect("error serializes"));
    }
    eprintln!("error ({}): {}", e.kind, e.reason);
}
