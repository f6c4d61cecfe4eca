//! Closed-form bound-state spectra.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{ClosedForm, Consts, PotentialError, PotentialSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub quantum_numbers: BTreeMap<String, f64>,
    pub energy: f64,
    /// Set on entries that should not be read as bound states.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

impl Level {
    fn new(qn: &[(&str, f64)], energy: f64) -> Self {
        Level {
            quantum_numbers: qn.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            energy,
            flag: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub entries: Vec<Level>,
    pub consts: Consts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<String>,
    /// Phase convention of the separable states the quantum numbers refer to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_convention: Option<String>,
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<f64> {
        self.entries.iter().map(|l| l.energy).collect()
    }
}

/// `γ` with `A = (ħ²a²/2μ) γ(γ−1)`, taking the root `γ ≥ 1/2`.
pub fn pt_exponent(coupling: f64, c: &Consts) -> Result<f64, PotentialError> {
    let disc = 0.25 + 2.0 * coupling / c.energy_unit();
    if disc < 0.0 {
        return Err(PotentialError::InvalidCoupling(format!(
            "coupling {coupling} below −ħ²a²/8μ"
        )));
    }
    Ok(0.5 + disc.sqrt())
}

/// Inverse of [`pt_exponent`].
pub fn pt_coupling_from_exponent(g: f64, c: &Consts) -> f64 {
    0.5 * c.energy_unit() * g * (g - 1.0)
}

/// Pöschl-Teller levels `E = (ħ²a²/2μ)(γ+δ+2j)²` for `j ≥ max(0, ⌈(1−γ−δ)/2⌉)`.
pub fn pt_levels(gamma: f64, delta: f64, count: usize, c: &Consts) -> Result<SpectrumResult, PotentialError> {
    if !(gamma > 0.0 && delta > 0.0) {
        return Err(PotentialError::InvalidCoupling(format!("γ = {gamma}, δ = {delta} must be positive")));
    }
    let j0 = ((1.0 - gamma - delta) / 2.0).ceil().max(0.0);
    let l = (gamma + delta - 1.0) / 2.0;
    let m = (delta - gamma) / 2.0;
    let entries = (0..count)
        .map(|i| {
            let j = j0 + i as f64;
            let e = 0.5 * c.energy_unit() * (gamma + delta + 2.0 * j).powi(2);
            Level::new(&[("j", j), ("k", l + j), ("l", l), ("m", m)], e)
        })
        .collect();
    Ok(SpectrumResult {
        entries,
        consts: *c,
        truncation: Some(format!("first {count} levels of an infinite ladder")),
        phase_convention: Some("u(θ) e^{i(lφ+mψ)}".into()),
    })
}

/// Rosen-Morse levels for `V = A tanh ax − B sech² ax`.
///
/// With `k = −1/2 + (1/2)√(1 + 8μB/ħ²a²)`, `N = k − j` and `λ = μ|A|/ħ²a²`:
/// `E_j = −(ħ²a²/2μ)N² − μA²/(2ħ²a²N²)`, kept while `N² > λ` (below the
/// threshold `−|A|`) and `j ≤ 2k`.
pub fn rm_levels(a_coup: f64, b_coup: f64, c: &Consts, count: usize) -> Result<SpectrumResult, PotentialError> {
    let unit = c.energy_unit();
    if b_coup <= 0.0 {
        return Err(PotentialError::NoBoundStates(format!("B = {b_coup} ≤ 0")));
    }
    let k = -0.5 + 0.5 * (1.0 + 8.0 * b_coup / unit).sqrt();
    let lm = a_coup.abs() / unit;
    if lm >= k * k {
        return Err(PotentialError::NoBoundStates(format!("μ|A|/ħ²a² = {lm} ≥ k² = {}", k * k)));
    }
    let mut entries = Vec::new();
    let mut j = 0.0;
    while entries.len() < count && j <= 2.0 * k {
        let n = k - j;
        if n <= 0.0 || n * n <= lm {
            break;
        }
        let e = -0.5 * unit * n * n - a_coup * a_coup / (2.0 * unit * n * n);
        // E = −(ħ²a²/2μ)(l² + m²) with m = n, l = λ/n
        entries.push(Level::new(&[("j", j), ("k", k), ("n", n), ("l", lm / n), ("m", n)], e));
        j += 1.0;
    }
    Ok(SpectrumResult {
        entries,
        consts: *c,
        truncation: Some("all bound levels below the threshold −|A|".into()),
        phase_convention: Some("u(θ) e^{i(lφ−mψ)}; J3 eigenvalue −n".into()),
    })
}

/// `ħω(n + 1/2)`.
pub fn ho_levels(omega: f64, c: &Consts, count: usize) -> SpectrumResult {
    SpectrumResult {
        entries: (0..count)
            .map(|n| Level::new(&[("n", n as f64)], c.hbar * omega * (n as f64 + 0.5)))
            .collect(),
        consts: *c,
        truncation: Some(format!("first {count} levels")),
        phase_convention: None,
    }
}

fn get(params: &BTreeMap<String, f64>, k: &str) -> Result<f64, PotentialError> {
    params.get(k).copied().ok_or_else(|| PotentialError::MissingParameter(k.to_string()))
}

/// First `count` levels of a catalog entry. `a` is taken from `consts`; Pöschl-Teller
/// accepts either `A`, `B` or `gamma`, `delta`.
pub fn closed_form_spectrum(
    spec: &PotentialSpec,
    params: &BTreeMap<String, f64>,
    consts: &Consts,
    count: usize,
) -> Result<SpectrumResult, PotentialError> {
    match spec.closed_form {
        Some(ClosedForm::HarmonicOscillator) => Ok(ho_levels(get(params, "omega")?, consts, count)),
        Some(ClosedForm::PoschlTeller) => {
            let (g, d) = match (params.get("gamma"), params.get("delta")) {
                (Some(&g), Some(&d)) => (g, d),
                _ => (pt_exponent(get(params, "A")?, consts)?, pt_exponent(get(params, "B")?, consts)?),
            };
            pt_levels(g, d, count, consts)
        }
        Some(ClosedForm::RosenMorse) => rm_levels(get(params, "A")?, get(params, "B")?, consts, count),
        None => Err(PotentialError::NoClosedForm(spec.id.clone())),
    }
}
