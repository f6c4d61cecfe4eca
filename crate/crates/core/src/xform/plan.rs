//! Transformation plans as JSON data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Interval, TransformStep, XformError};
use crate::expr::{parse_expr, Bindings, Expr, Symbol, SymbolTable};

/// The shipped Rosen-Morse → Pöschl-Teller plan.
pub const BUILTIN_RM_TO_PT: &str = include_str!("../../../../plans/rm-to-pt.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum BoundJson {
    Num(f64),
    Text(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StepJson {
    step: String,
    #[serde(rename = "fn")]
    func: String,
    #[serde(default)]
    interval: Option<[BoundJson; 2]>,
    #[serde(default)]
    inverse: Option<String>,
    #[serde(default)]
    solve_constant: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ReferenceJson {
    name: String,
    after_step: usize,
    /// Derivative order → coefficient.
    coefficients: BTreeMap<String, String>,
    #[serde(default)]
    constant_term: Option<String>,
    #[serde(default)]
    note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PlanJson {
    id: String,
    #[serde(default)]
    description: String,
    source: String,
    #[serde(default)]
    target: Option<String>,
    source_variable: String,
    target_variable: String,
    #[serde(default = "default_energy")]
    energy: String,
    steps: Vec<StepJson>,
    #[serde(default)]
    target_couplings: Vec<String>,
    #[serde(default)]
    parameter_map: BTreeMap<String, String>,
    #[serde(default)]
    check_bindings: BTreeMap<String, f64>,
    #[serde(default)]
    reference_forms: Vec<ReferenceJson>,
    #[serde(default)]
    reference_prefactor: Option<String>,
    #[serde(default)]
    reference_constant: Option<String>,
}

fn default_energy() -> String {
    "E".into()
}

/// A printed intermediate operator to compare against.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceForm {
    pub name: String,
    /// Index of the step after which the comparison applies.
    pub after_step: usize,
    pub coefficients: BTreeMap<u8, Expr>,
    /// Printed constant part of the zeroth-order coefficient, compared with the
    /// fitted constant of the final operator.
    pub constant_term: Option<Expr>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformPlan {
    pub id: String,
    pub description: String,
    pub source: String,
    pub target: Option<String>,
    pub source_variable: Symbol,
    pub target_variable: Symbol,
    pub energy: Expr,
    pub steps: Vec<(TransformStep, Option<Interval>)>,
    /// Target parameters that enter the potential linearly.
    pub target_couplings: Vec<String>,
    /// Declared target parameter → expression in source parameters and energy.
    pub parameter_map: BTreeMap<String, Expr>,
    /// Parameter values used for sampled checks.
    pub check_bindings: Bindings,
    pub reference_forms: Vec<ReferenceForm>,
    pub reference_prefactor: Option<Expr>,
    pub reference_constant: Option<Expr>,
}

fn parse(text: &str, what: &str, table: &SymbolTable) -> Result<Expr, XformError> {
    parse_expr(text, table).map_err(|e| XformError::Plan(format!("{what}: {e}")))
}

impl TransformPlan {
    pub fn from_json(text: &str) -> Result<Self, XformError> {
        let p: PlanJson =
            serde_json::from_str(text).map_err(|e| XformError::Plan(format!("invalid plan JSON: {e}")))?;
        let table = SymbolTable::default()
            .with_extra_variables(&[p.source_variable.as_str(), p.target_variable.as_str()]);
        let bound = |b: &BoundJson, what: &str| match b {
            BoundJson::Num(v) => Ok(Expr::float(*v)),
            BoundJson::Text(t) => parse(t, what, &table),
        };
        let mut steps = Vec::new();
        for (i, s) in p.steps.iter().enumerate() {
            let what = format!("step {i} ({})", s.step);
            let g = parse(&s.func, &what, &table)?;
            let step = match s.step.as_str() {
                "pct" => TransformStep::Pct {
                    f: g,
                    inverse: s.inverse.as_deref().map(|t| parse(t, &what, &table)).transpose()?,
                },
                "similarity" => TransformStep::Similarity { g },
                "conjugation" => TransformStep::Conjugation { g, solve_constant: s.solve_constant },
                "rescale" => TransformStep::Rescale { c: g },
                other => return Err(XformError::Plan(format!("unknown step kind `{other}`"))),
            };
            let iv = match &s.interval {
                Some([lo, hi]) => Some(Interval::new(bound(lo, &what)?, bound(hi, &what)?)),
                None => None,
            };
            steps.push((step, iv));
        }
        let mut reference_forms = Vec::new();
        for r in &p.reference_forms {
            let mut coefficients = BTreeMap::new();
            for (k, v) in &r.coefficients {
                let order: u8 =
                    k.parse().map_err(|_| XformError::Plan(format!("{}: bad order `{k}`", r.name)))?;
                coefficients.insert(order, parse(v, &r.name, &table)?);
            }
            reference_forms.push(ReferenceForm {
                name: r.name.clone(),
                after_step: r.after_step,
                coefficients,
                constant_term: r.constant_term.as_deref().map(|t| parse(t, &r.name, &table)).transpose()?,
                note: r.note.clone(),
            });
        }
        let parameter_map = p
            .parameter_map
            .iter()
            .map(|(k, v)| Ok((k.clone(), parse(v, "parameter_map", &table)?)))
            .collect::<Result<_, XformError>>()?;
        let opt = |t: &Option<String>, what: &str| t.as_deref().map(|t| parse(t, what, &table)).transpose();
        Ok(TransformPlan {
            id: p.id,
            description: p.description,
            source: p.source,
            target: p.target,
            source_variable: Symbol::var(&p.source_variable),
            target_variable: Symbol::var(&p.target_variable),
            energy: parse(&p.energy, "energy", &table)?,
            steps,
            target_couplings: p.target_couplings,
            parameter_map,
            check_bindings: p.check_bindings.iter().map(|(k, v)| (k.as_str(), *v)).collect(),
            reference_forms,
            reference_prefactor: opt(&p.reference_prefactor, "reference_prefactor")?,
            reference_constant: opt(&p.reference_constant, "reference_constant")?,
        })
    }

    /// No steps: the identity relation on `source`.
    pub fn empty(source: &str, variable: &str) -> Self {
        TransformPlan {
            id: "empty".into(),
            description: "identity".into(),
            source: source.into(),
            target: None,
            source_variable: Symbol::var(variable),
            target_variable: Symbol::var(variable),
            energy: Expr::param("E"),
            steps: Vec::new(),
            target_couplings: Vec::new(),
            parameter_map: BTreeMap::new(),
            check_bindings: Bindings::new(),
            reference_forms: Vec::new(),
            reference_prefactor: None,
            reference_constant: None,
        }
    }
}

/// `rm-to-pt` (also accepted as `builtin:rm-to-pt`).
pub fn builtin_plan(name: &str) -> Result<TransformPlan, XformError> {
    match name.strip_prefix("builtin:").unwrap_or(name) {
        "rm-to-pt" => TransformPlan::from_json(BUILTIN_RM_TO_PT),
        other => Err(XformError::Plan(format!("no builtin plan `{other}`"))),
    }
}
