//! Grid resolvent `ħ (H − E − iε)⁻¹`.

use num_complex::Complex64;

use super::grid::GridOperator;
use super::NumericError;

/// Solve `(H − E − iε) g = r` by complex Thomas elimination.
pub fn fd_resolvent(op: &GridOperator, e: f64, eps: f64, r: &[Complex64]) -> Result<Vec<Complex64>, NumericError> {
    if !(eps >= 0.0) {
        return Err(NumericError::DomainError(format!("eps = {eps}")));
    }
    let n = op.n();
    let z = Complex64::new(e, eps);
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let scale = op.diag.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for i in 0..n {
        let a = if i > 0 { op.off[i - 1] } else { 0.0 };
        let mut piv = op.diag[i] - z;
        if i > 0 {
            piv -= a * c[i - 1];
        }
        if piv.norm() <= 1e-15 * scale {
            return Err(NumericError::SingularSystem(format!("zero pivot at row {i}, E = {e}, eps = {eps}")));
        }
        c[i] = if i + 1 < n { op.off[i] / piv } else { Complex64::new(0.0, 0.0) };
        d[i] = (r[i] - if i > 0 { a * d[i - 1] } else { Complex64::new(0.0, 0.0) }) / piv;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(d)
}

/// `G(x_f, x_0; E)` between grid nodes: the solution of `(H − E − iε)g = ħ δ_{x0}/Δx` at `xf`.
pub fn resolvent_green(op: &GridOperator, e: f64, eps: f64, x0: usize, xf: usize) -> Result<Complex64, NumericError> {
    let n = op.n();
    if x0 >= n || xf >= n {
        return Err(NumericError::DomainError(format!("index outside 0..{n}")));
    }
    let mut r = vec![Complex64::new(0.0, 0.0); n];
    r[x0] = Complex64::new(op.hbar / op.grid.dx(), 0.0);
    Ok(fd_resolvent(op, e, eps, &r)?[xf])
}

/// Bracketing node and linear weight of `x`.
fn locate(op: &GridOperator, x: f64) -> Result<(usize, f64), NumericError> {
    let g = &op.grid;
    let t = (x - g.a()) / g.dx() - 1.0;
    if !(t >= 0.0 && t <= (g.n - 1) as f64) {
        return Err(NumericError::DomainError(format!("x = {x} outside the grid nodes [{}, {}]", g.point(0), g.point(g.n - 1))));
    }
    let i = (t.floor() as usize).min(g.n - 2);
    Ok((i, t - i as f64))
}

/// `G(x_f, x_0; E)` at arbitrary interior points. The source is a hat-shaped delta
/// split between the two nodes around `x0`; the response is read off by linear
/// interpolation at `xf`. Second-order accurate when `xf ≠ x0`.
pub fn resolvent_matrix_element(op: &GridOperator, e: f64, eps: f64, x0: f64, xf: f64) -> Result<Complex64, NumericError> {
    let n = op.n();
    let (i0, w0) = locate(op, x0)?;
    let (i1, w1) = locate(op, xf)?;
    let amp = op.hbar / op.grid.dx();
    let mut r = vec![Complex64::new(0.0, 0.0); n];
    r[i0] += amp * (1.0 - w0);
    r[i0 + 1] += amp * w0;
    let g = fd_resolvent(op, e, eps, &r)?;
    Ok(g[i1] * (1.0 - w1) + g[i1 + 1] * w1)
}
