//! `(op (vars x y) (term <coeff> (i j)) ...)`, coefficients in expr text form.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::DiffOp;
use crate::expr::{parse_expr, ParseError, Symbol, SymbolTable};

pub(super) fn write_op(op: &DiffOp, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "(op (vars")?;
    for v in &op.vars {
        write!(f, " {}", v.name())?;
    }
    write!(f, ")")?;
    for (k, c) in &op.terms {
        write!(f, "\n  (term {c} (")?;
        for (i, a) in k.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "))")?;
    }
    write!(f, ")")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OpParseError {
    #[error("malformed operator text: {0}")]
    Syntax(String),
    #[error("coefficient: {0}")]
    Coefficient(#[from] ParseError),
}

/// Split a parenthesized list into its top-level items (atoms or balanced forms).
fn items(s: &str) -> Result<Vec<&str>, OpParseError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| OpParseError::Syntax(format!("expected a list: `{s}`")))?;
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => {
                if depth == 0 {
                    start = Some(i);
                }
                depth += 1;
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(OpParseError::Syntax("unbalanced `)`".into()));
                }
                if depth == 0 {
                    out.push(&inner[start.take().unwrap()..=i]);
                }
            }
            c if c.is_whitespace() => {
                if depth == 0 {
                    if let Some(st) = start.take() {
                        out.push(&inner[st..i]);
                    }
                }
            }
            _ => {
                if depth == 0 && start.is_none() {
                    start = Some(i);
                }
            }
        }
    }
    if depth != 0 {
        return Err(OpParseError::Syntax("unbalanced `(`".into()));
    }
    if let Some(st) = start {
        out.push(&inner[st..]);
    }
    Ok(out)
}

/// Parse the text form produced by `Display`. Listed variables are always treated
/// as variables regardless of `table`.
pub fn parse_op(text: &str, table: &SymbolTable) -> Result<DiffOp, OpParseError> {
    let top = items(text)?;
    if top.first() != Some(&"op") || top.len() < 2 {
        return Err(OpParseError::Syntax("expected `(op (vars ...) ...)`".into()));
    }
    let vs = items(top[1])?;
    if vs.first() != Some(&"vars") {
        return Err(OpParseError::Syntax("expected `(vars ...)`".into()));
    }
    let names: Vec<&str> = vs[1..].to_vec();
    let vars: Vec<Symbol> = names.iter().map(|n| Symbol::var(n)).collect();
    let table = table.with_extra_variables(&names);
    let mut terms = Vec::new();
    for t in &top[2..] {
        let parts = items(t)?;
        if parts.len() != 3 || parts[0] != "term" {
            return Err(OpParseError::Syntax(format!("bad term `{t}`")));
        }
        let coeff = parse_expr(parts[1], &table)?;
        let idx: Vec<u8> = items(parts[2])?
            .iter()
            .map(|a| a.parse::<u8>().map_err(|_| OpParseError::Syntax(format!("bad order `{a}`"))))
            .collect::<Result<_, _>>()?;
        if idx.len() != vars.len() {
            return Err(OpParseError::Syntax(format!("index `{}` has wrong length", parts[2])));
        }
        terms.push((idx, coeff));
    }
    Ok(DiffOp::from_terms(&vars, terms))
}

/// JSON shape used by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpJson {
    pub variables: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub index: Vec<u8>,
}

impl DiffOp {
    pub fn to_json(&self) -> OpJson {
        OpJson {
            variables: self.vars.iter().map(|v| v.name().to_string()).collect(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TermJson { coeff: c.to_string(), index: k.clone() })
                .collect(),
        }
    }
}
