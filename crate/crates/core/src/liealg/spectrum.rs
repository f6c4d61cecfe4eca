//! Spectra from the SU(2) eigenvalue conditions.

use std::collections::BTreeMap;

use crate::potentials::{Consts, Level, PotentialError, SpectrumResult};

fn level(qn: &[(&str, f64)], energy: f64, flag: Option<String>) -> Level {
    Level { quantum_numbers: qn.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(), energy, flag }
}

/// Pöschl-Teller levels from `J² = k(k+1)` with `l = (γ+δ−1)/2`, `m = (δ−γ)/2`,
/// `k = l + j`: `E_k = (2a²ħ²/μ)(k + 1/2)²`, for `k ≥ 0`.
pub fn pt_spectrum_from_rep(gamma: f64, delta: f64, count: usize, c: &Consts) -> Result<SpectrumResult, PotentialError> {
    if !(gamma > 0.0 && delta > 0.0) {
        return Err(PotentialError::InvalidCoupling(format!("γ = {gamma}, δ = {delta} must be positive")));
    }
    let l = (gamma + delta - 1.0) / 2.0;
    let m = (delta - gamma) / 2.0;
    // smallest j with k = l + j ≥ 0
    let j0 = (-l).ceil().max(0.0);
    let unit = c.energy_unit();
    let entries = (0..count)
        .map(|i| {
            let j = j0 + i as f64;
            let k = l + j;
            level(&[("j", j), ("k", k), ("l", l), ("m", m)], 2.0 * unit * (k + 0.5).powi(2), None)
        })
        .collect();
    Ok(SpectrumResult {
        entries,
        consts: *c,
        truncation: Some(format!("first {count} values of k = l + j")),
        phase_convention: Some("u(θ) e^{i(lφ+mψ)}; J3 eigenvalue m".into()),
    })
}

/// Rosen-Morse levels from `k(k+1) = 2μB/ħ²a²`, `lm = μA/ħ²a²` and `m = k − j`:
/// `E = −(ħ²a²/2μ)(l² + m²)`. Requires `lm < k²` for any bound state and keeps
/// `l < m` (decay on both sides); `A < 0` is mapped to `|A|` by `θ → −θ`.
pub fn rm_spectrum_from_rep(a_coup: f64, b_coup: f64, c: &Consts, count: usize) -> Result<SpectrumResult, PotentialError> {
    let unit = c.energy_unit();
    if b_coup <= 0.0 {
        return Err(PotentialError::NoBoundStates(format!("B = {b_coup} ≤ 0")));
    }
    let k = -0.5 + 0.5 * (1.0 + 8.0 * b_coup / unit).sqrt();
    let lm = a_coup.abs() / unit;
    if lm >= k * k {
        return Err(PotentialError::NoBoundStates(format!(
            "lm = μ|A|/ħ²a² = {lm} is not below k² = {}",
            k * k
        )));
    }
    let mut entries = Vec::new();
    let jmax = (2.0 * k).floor() as usize;
    for j in 0..=jmax {
        if entries.len() == count {
            break;
        }
        let m = k - j as f64;
        if m <= 0.0 {
            break;
        }
        let l = lm / m;
        if l >= m {
            break;
        }
        entries.push(level(
            &[("j", j as f64), ("k", k), ("l", l), ("m", m), ("n", m)],
            -0.5 * unit * (l * l + m * m),
            None,
        ));
    }
    let mut convention = "u(θ) e^{i(lφ−mψ)}; J3 eigenvalue −n".to_string();
    if a_coup < 0.0 {
        convention.push_str("; A < 0 handled as |A| under θ → −θ");
    }
    Ok(SpectrumResult {
        entries,
        consts: *c,
        truncation: Some("bound levels with l < m, j ≤ 2k; existence bound lm < k² (exponent on μA/a² taken as 1)".into()),
        phase_convention: Some(convention),
    })
}
