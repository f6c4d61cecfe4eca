//! Catalog of one-dimensional potentials and their Schrödinger operators.
//!
//! Operators are `(1/2μ)p̂² + V − E = −(ħ²/2μ)∂² + V − E` with `hbar` and `mu` left as
//! parameters unless bound.

mod spectrum;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::diffop::DiffOp;
use crate::expr::build::*;
use crate::expr::{Expr, Symbol};

pub use spectrum::{
    closed_form_spectrum, ho_levels, pt_coupling_from_exponent, pt_exponent, pt_levels, rm_levels, Level,
    SpectrumResult,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PotentialError {
    #[error("no catalog entry `{0}`")]
    NotFound(String),
    #[error("parameter `{name}` = {value} outside {range}")]
    ParameterOutOfRange { name: String, value: f64, range: String },
    #[error("missing parameter `{0}`")]
    MissingParameter(String),
    #[error("no closed-form spectrum for `{0}`")]
    NoClosedForm(String),
    #[error("no bound states: {0}")]
    NoBoundStates(String),
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),
}

/// ħ, μ and the length scale a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Consts {
    pub hbar: f64,
    pub mu: f64,
    pub a: f64,
}

impl Default for Consts {
    fn default() -> Self {
        Consts { hbar: 1.0, mu: 1.0, a: 1.0 }
    }
}

impl Consts {
    /// `ħ²a²/μ`, the natural energy unit.
    pub fn energy_unit(&self) -> f64 {
        self.hbar * self.hbar * self.a * self.a / self.mu
    }

    pub fn bindings(&self) -> crate::expr::Bindings {
        crate::expr::Bindings::new().with("hbar", self.hbar).with("mu", self.mu).with("a", self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointKind {
    Regular,
    Singular,
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domain {
    /// Endpoint expressions in the parameters (`pi`, `a`, ...); infinite ends hold
    /// `±1` as a placeholder and are identified by `kind`.
    #[serde(serialize_with = "ser_expr")]
    pub lo: Expr,
    #[serde(serialize_with = "ser_expr")]
    pub hi: Expr,
    pub lo_kind: EndpointKind,
    pub hi_kind: EndpointKind,
}

fn ser_expr<S: serde::Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

impl Domain {
    pub fn real_line() -> Self {
        Domain { lo: int(-1), hi: int(1), lo_kind: EndpointKind::Infinite, hi_kind: EndpointKind::Infinite }
    }

    /// Numeric endpoints, with `±inf` for infinite ends.
    pub fn bounds(&self, consts: &Consts) -> (f64, f64) {
        let b = consts.bindings();
        let ev = |e: &Expr, k: EndpointKind, sign: f64| match k {
            EndpointKind::Infinite => sign * f64::INFINITY,
            _ => e.eval(&b).unwrap_or(f64::NAN),
        };
        (ev(&self.lo, self.lo_kind, -1.0), ev(&self.hi, self.hi_kind, 1.0))
    }
}

/// Admissible open/closed range for a parameter value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: String,
    pub min: Option<f64>,
    pub min_inclusive: bool,
    pub doc: String,
}

impl ParamSpec {
    fn any(name: &str, doc: &str) -> Self {
        ParamSpec { name: name.into(), min: None, min_inclusive: false, doc: doc.into() }
    }

    fn positive(name: &str, doc: &str) -> Self {
        ParamSpec { name: name.into(), min: Some(0.0), min_inclusive: false, doc: doc.into() }
    }

    fn nonnegative(name: &str, doc: &str) -> Self {
        ParamSpec { name: name.into(), min: Some(0.0), min_inclusive: true, doc: doc.into() }
    }

    pub fn admits(&self, v: f64) -> bool {
        match self.min {
            None => v.is_finite(),
            Some(m) if self.min_inclusive => v >= m,
            Some(m) => v > m,
        }
    }

    pub fn range_text(&self) -> String {
        match self.min {
            None => "(-inf, inf)".into(),
            Some(m) if self.min_inclusive => format!("[{m}, inf)"),
            Some(m) => format!("({m}, inf)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedForm {
    HarmonicOscillator,
    PoschlTeller,
    RosenMorse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialSpec {
    pub id: String,
    pub aliases: Vec<String>,
    #[serde(serialize_with = "ser_symbol")]
    pub variable: Symbol,
    pub domain: Domain,
    #[serde(serialize_with = "ser_expr")]
    pub potential: Expr,
    pub parameters: Vec<ParamSpec>,
    pub closed_form: Option<ClosedForm>,
    /// Inactive entries are listed but refused by the transformation pipeline.
    pub active: bool,
    pub note: String,
}

fn ser_symbol<S: serde::Serializer>(v: &Symbol, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(v.name())
}

fn half_pi_over_a() -> Expr {
    Expr::pi() / (int(2) * param("a"))
}

fn entry(id: &str, var: &str, domain: Domain, v: Expr, params: Vec<ParamSpec>) -> PotentialSpec {
    PotentialSpec {
        id: id.into(),
        aliases: Vec::new(),
        variable: Symbol::var(var),
        domain,
        potential: v,
        parameters: params,
        closed_form: None,
        active: true,
        note: String::new(),
    }
}

/// All catalog entries.
pub fn catalog() -> Vec<PotentialSpec> {
    let x = || var("x");
    let ax = || param("a") * var("x");
    let at = || param("a") * var("theta");
    let a_pos = || ParamSpec::positive("a", "inverse length scale");
    let half_line = Domain {
        lo: int(0),
        hi: int(1),
        lo_kind: EndpointKind::Singular,
        hi_kind: EndpointKind::Infinite,
    };

    let mut free = entry("free", "x", Domain::real_line(), int(0), vec![]);
    free.note = "V = 0; calibration entry (box spectrum on a finite grid)".into();

    let mut ho = entry(
        "harmonic-oscillator",
        "x",
        Domain::real_line(),
        rat(1, 2) * param("mu") * powi(param("omega"), 2) * powi(x(), 2),
        vec![ParamSpec::positive("omega", "angular frequency")],
    );
    ho.closed_form = Some(ClosedForm::HarmonicOscillator);

    let mut hyp = entry(
        "rosen-morse-hyp-source",
        "x",
        half_line.clone(),
        param("A") * powi(csch(ax()), 2) + param("B") * coth(ax()) * csch(ax()),
        vec![ParamSpec::any("A", "csch² coupling"), ParamSpec::any("B", "coth·csch coupling"), a_pos()],
    );
    hyp.aliases = vec!["rosen-morse-i".into(), "generalized-poschl-teller".into()];
    hyp.note = "printed source of the rm-to-pt plan; the plan's PCT does not map it onto \
                Pöschl-Teller form (see rosen-morse-tanh)"
        .into();

    let mut pt = entry(
        "poschl-teller-trig",
        "theta",
        Domain { lo: int(0), hi: half_pi_over_a(), lo_kind: EndpointKind::Singular, hi_kind: EndpointKind::Singular },
        param("A") * powi(csc(at()), 2) + param("B") * powi(sec(at()), 2),
        vec![
            ParamSpec::nonnegative("A", "csc² coupling, (ħ²a²/2μ)γ(γ−1)"),
            ParamSpec::nonnegative("B", "sec² coupling, (ħ²a²/2μ)δ(δ−1)"),
            a_pos(),
        ],
    );
    pt.aliases = vec!["poschl-teller".into(), "poschl-teller-i".into()];
    pt.closed_form = Some(ClosedForm::PoschlTeller);

    let mut rm = entry(
        "rosen-morse-tanh",
        "x",
        Domain::real_line(),
        param("A") * tanh(ax()) - param("B") * powi(sech(ax()), 2),
        vec![ParamSpec::any("A", "tanh coupling"), ParamSpec::any("B", "sech² well depth"), a_pos()],
    );
    rm.aliases = vec!["rosen-morse".into(), "rosen-morse-ii-hyperbolic".into()];
    rm.closed_form = Some(ClosedForm::RosenMorse);

    let stub = |id: &str, var_name: &str, d: Domain, v: Expr, ps: Vec<ParamSpec>| {
        let mut e = entry(id, var_name, d, v, ps);
        e.active = false;
        e.note = "stub: transformation function not verified".into();
        e
    };
    let morse = stub(
        "morse",
        "x",
        Domain::real_line(),
        param("D") * (exp(int(-2) * ax()) - int(2) * exp(ax().neg())),
        vec![ParamSpec::positive("D", "well depth"), a_pos()],
    );
    let eckart = stub(
        "eckart",
        "x",
        half_line.clone(),
        param("A") * powi(csch(ax()), 2) - int(2) * param("B") * coth(ax()),
        vec![ParamSpec::nonnegative("A", "csch² barrier"), ParamSpec::any("B", "coth coupling"), a_pos()],
    );
    let rm2 = stub(
        "rosen-morse-ii-trig",
        "theta",
        Domain { lo: int(0), hi: Expr::pi() / param("a"), lo_kind: EndpointKind::Singular, hi_kind: EndpointKind::Singular },
        param("A") * powi(csc(at()), 2) - int(2) * param("B") * cot(at()),
        vec![ParamSpec::nonnegative("A", "csc² barrier"), ParamSpec::any("B", "cot coupling"), a_pos()],
    );
    let radial = stub(
        "radial-oscillator",
        "x",
        half_line,
        rat(1, 2) * param("mu") * powi(param("omega"), 2) * powi(x(), 2) + param("L") * powi(x(), -2),
        vec![ParamSpec::positive("omega", "angular frequency"), ParamSpec::nonnegative("L", "centrifugal coupling")],
    );

    vec![free, ho, hyp, pt, rm, morse, eckart, rm2, radial]
}

/// Look up by id or alias.
pub fn lookup(id: &str) -> Result<PotentialSpec, PotentialError> {
    catalog()
        .into_iter()
        .find(|s| s.id == id || s.aliases.iter().any(|a| a == id))
        .ok_or_else(|| PotentialError::NotFound(id.to_string()))
}

/// `(1/2μ)p̂² + V − E`. Entries of `params` replace the matching parameter symbols
/// in the kinetic and potential parts; numeric values are range-checked.
pub fn build_schrodinger_op(
    spec: &PotentialSpec,
    params: &BTreeMap<String, Expr>,
    energy: &Expr,
) -> Result<DiffOp, PotentialError> {
    for p in &spec.parameters {
        if let Some(v) = params.get(&p.name).and_then(|e| e.as_const()).filter(|c| c.is_real()) {
            let v = v.to_c64().re;
            if !p.admits(v) {
                return Err(PotentialError::ParameterOutOfRange {
                    name: p.name.clone(),
                    value: v,
                    range: p.range_text(),
                });
            }
        }
    }
    let map: BTreeMap<Symbol, Expr> =
        params.iter().map(|(k, v)| (Symbol::param(k), v.clone())).collect();
    // one simultaneous substitution; `energy` is taken as given
    let v = spec.potential.substitute_all(&map);
    let t = &spec.variable;
    let kinetic = (powi(param("hbar"), 2) / (int(2) * param("mu"))).substitute_all(&map);
    let vars = [t.clone()];
    Ok(DiffOp::partial(&vars, t, 2)
        .left_mul(&kinetic.neg())
        .add(&DiffOp::multiplication(&vars, v - energy.clone())))
}

/// Numeric parameter map to expression map.
pub fn numeric_params(p: &BTreeMap<String, f64>) -> BTreeMap<String, Expr> {
    p.iter().map(|(k, v)| (k.clone(), crate::expr::Expr::float(*v))).collect()
}

#[cfg(test)]
mod tests;
