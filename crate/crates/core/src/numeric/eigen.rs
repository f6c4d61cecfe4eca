//! Lowest eigenpairs of a symmetric tridiagonal operator by Sturm bisection and
//! inverse iteration.

use std::collections::BTreeMap;

use super::grid::{fd_hamiltonian, Grid, GridOperator};
use super::NumericError;
use crate::potentials::{Consts, EndpointKind, Level, PotentialSpec, SpectrumResult};

pub const CONTINUUM_FLAG: &str = "continuum-artifact";

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpairs {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// Normalized so that `Σ ψ_i² Δx = 1`, sign fixed by the first large entry.
    pub vectors: Vec<Vec<f64>>,
}

impl Eigenpairs {
    pub fn to_spectrum(&self, consts: &Consts) -> SpectrumResult {
        let entries = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &e)| Level {
                quantum_numbers: BTreeMap::from([("level".to_string(), i as f64)]),
                energy: e,
                flag: None,
            })
            .collect();
        SpectrumResult { entries, consts: *consts, truncation: None, phase_convention: None }
    }
}

/// Number of eigenvalues below `x`.
pub fn sturm_count(op: &GridOperator, x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..op.n() {
        let b2 = if i == 0 { 0.0 } else { op.off[i - 1] * op.off[i - 1] };
        d = op.diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (op.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(op: &GridOperator) -> (f64, f64) {
    let n = op.n();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r = if i > 0 { op.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { op.off[i].abs() } else { 0.0 };
        lo = lo.min(op.diag[i] - r);
        hi = hi.max(op.diag[i] + r);
    }
    (lo, hi)
}

/// `k`-th smallest eigenvalue (0-based).
fn bisect(op: &GridOperator, k: usize, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let tol = 4.0 * f64::EPSILON * lo.abs().max(hi.abs());
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= tol || m == a || m == b {
            break;
        }
        if sturm_count(op, m) > k {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

/// Solve `(T − s) y = r` with partial pivoting (tridiagonal LU, one extra fill band).
fn shifted_solve(op: &GridOperator, s: f64, r: &[f64]) -> Vec<f64> {
    let n = op.n();
    let tiny = f64::EPSILON * gershgorin(op).1.abs().max(1.0);
    // rows hold (u0, u1, u2) = diagonal and two super-diagonals after elimination
    let mut u0: Vec<f64> = op.diag.iter().map(|d| d - s).collect();
    let mut u1: Vec<f64> = op.off.clone();
    u1.push(0.0);
    let mut u2 = vec![0.0; n];
    let mut l = vec![0.0; n];
    let mut swap = vec![false; n];
    let mut y = r.to_vec();
    let mut sub: Vec<f64> = op.off.clone();
    for i in 0..n.saturating_sub(1) {
        let below = sub[i];
        if below.abs() > u0[i].abs() {
            swap[i] = true;
            // swap rows i and i+1
            let (a0, a1, a2) = (u0[i], u1[i], u2[i]);
            u0[i] = below;
            u1[i] = u0[i + 1];
            u2[i] = u1[i + 1];
            let m = a0 / below;
            l[i] = m;
            u0[i + 1] = a1 - m * u1[i];
            u1[i + 1] = a2 - m * u2[i];
            y.swap(i, i + 1);
        } else {
            let piv = if u0[i] == 0.0 { tiny } else { u0[i] };
            u0[i] = piv;
            let m = below / piv;
            l[i] = m;
            u0[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
        }
        y[i + 1] -= l[i] * y[i];
        sub[i] = 0.0;
    }
    if u0[n - 1] == 0.0 {
        u0[n - 1] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = y[i];
        if i + 1 < n {
            v -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            v -= u2[i] * x[i + 2];
        }
        x[i] = v / u0[i];
    }
    x
}

fn normalize(v: &mut [f64], dx: f64) {
    let norm = (v.iter().map(|t| t * t).sum::<f64>() * dx).sqrt();
    let big = v.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let first = v.iter().find(|t| t.abs() > 1e-3 * big).copied().unwrap_or(1.0);
    let s = first.signum() / norm;
    v.iter_mut().for_each(|t| *t *= s);
}

/// Lowest `count` eigenpairs.
pub fn fd_eigs(op: &GridOperator, count: usize) -> Result<Eigenpairs, NumericError> {
    let n = op.n();
    if count == 0 || count > n / 4 {
        return Err(NumericError::DomainError(format!("count {count} outside 1..={}", n / 4)));
    }
    let (lo, hi) = gershgorin(op);
    let dx = op.grid.dx();
    let mut values = Vec::with_capacity(count);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    for k in 0..count {
        let e = bisect(op, k, lo, hi);
        let shift = e + 8.0 * f64::EPSILON * e.abs().max(1.0);
        // start vector with no special symmetry
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919 % 1013) as f64 / 1013.0)).collect();
        let mut ok = false;
        for _ in 0..6 {
            let mut w = shifted_solve(op, shift, &v);
            for u in &vectors {
                let p: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() * dx;
                w.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
            }
            normalize(&mut w, dx);
            let hw = op.matvec(&w);
            let res = (hw.iter().zip(&w).map(|(h, x)| (h - e * x).powi(2)).sum::<f64>() * dx).sqrt();
            v = w;
            if res <= 1e-9 * (hi - lo) {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(NumericError::ConvergenceFailure(format!("inverse iteration for level {k} at E = {e}")));
        }
        values.push(e);
        vectors.push(v);
    }
    Ok(Eigenpairs { grid: op.grid.clone(), values, vectors })
}

/// Same spacing, 25% longer box, with the extra length given to the infinite ends.
fn extended_grid(spec: &PotentialSpec, grid: &Grid) -> Option<Grid> {
    let lo_inf = spec.domain.lo_kind == EndpointKind::Infinite;
    let hi_inf = spec.domain.hi_kind == EndpointKind::Infinite;
    if !lo_inf && !hi_inf {
        return None;
    }
    let dx = grid.dx();
    let extra_cells = ((grid.n + 1) as f64 * 0.25).round() as usize;
    let (lo_cells, hi_cells) = match (lo_inf, hi_inf) {
        (true, true) => (extra_cells / 2, extra_cells - extra_cells / 2),
        (true, false) => (extra_cells, 0),
        _ => (0, extra_cells),
    };
    let mut g = grid.clone();
    g.lo -= lo_cells as f64 * dx;
    g.hi += hi_cells as f64 * dx;
    g.n += extra_cells;
    Some(g)
}

/// Relative shift under box extension above which a level is flagged.
pub const BOX_SHIFT_TOL: f64 = 1e-5;

/// `fd_eigs` on a catalog entry, flagging levels that move when the box grows.
pub fn fd_spectrum(
    spec: &PotentialSpec,
    params: &BTreeMap<String, f64>,
    consts: &Consts,
    grid: &Grid,
    count: usize,
) -> Result<(SpectrumResult, Eigenpairs), NumericError> {
    let h = fd_hamiltonian(spec, params, consts, grid)?;
    let pairs = fd_eigs(&h, count)?;
    let mut spec_out = pairs.to_spectrum(consts);
    if let Some(g2) = extended_grid(spec, grid) {
        let h2 = fd_hamiltonian(spec, params, consts, &g2)?;
        let e2 = fd_eigs(&h2, count)?.values;
        let unit = consts.energy_unit();
        for (lvl, e) in spec_out.entries.iter_mut().zip(&e2) {
            if (lvl.energy - e).abs() > BOX_SHIFT_TOL * lvl.energy.abs().max(unit) {
                lvl.flag = Some(CONTINUUM_FLAG.into());
            }
        }
    }
    spec_out.truncation = Some(format!("finite difference, n = {}, [{}, {}]", grid.n, grid.a(), grid.b()));
    Ok((spec_out, pairs))
}
