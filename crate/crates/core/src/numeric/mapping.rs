//! Carry source eigenvectors through a propagator relation and test them against
//! the transformed operator.

use serde::Serialize;

use super::eigen::Eigenpairs;
use super::grid::{apply_on_grid, Grid};
use super::interp::{Cubic, InterpKind};
use super::quad::gauss_legendre;
use super::NumericError;
use crate::diffop::DiffOp;
use crate::expr::{Bindings, CompiledExpr, Expr};
use crate::xform::PropagatorRelation;

/// Tail size below which a sample outside the source grid counts as zero.
const TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappedState {
    pub index: usize,
    pub energy: f64,
    /// `‖Ŝφ‖ / (‖c₂φ″‖ + ‖c₁φ′‖ + ‖c₀φ‖)` on the target grid, `φ = ψ′/g₂`.
    pub residual: f64,
    /// `ψ′ = c g₁ ψ∘x(θ)` at the target grid points.
    #[serde(skip)]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingReport {
    pub target_grid: Grid,
    pub interpolation: InterpKind,
    pub states: Vec<MappedState>,
    /// Gram matrix of the mapped states in the tracked target measure.
    pub gram: Vec<Vec<f64>>,
    pub max_residual: f64,
    pub max_orthonormality_error: f64,
}

/// Resampled `ψ′` as a function of the target variable.
struct Mapped<'a> {
    spline: Cubic,
    x_of: &'a CompiledExpr,
    weight: &'a CompiledExpr,
    tail_ok: bool,
}

impl Mapped<'_> {
    fn eval(&self, t: f64) -> Result<f64, NumericError> {
        let x = self.x_of.eval(&[t])?;
        if !self.spline.contains(x) {
            if self.tail_ok {
                return Ok(0.0);
            }
            return Err(NumericError::InterpolationOutOfRange(format!(
                "target point {t} maps to {x}, outside [{}, {}]",
                self.spline.lo(),
                self.spline.hi()
            )));
        }
        Ok(self.weight.eval(&[t])? * self.spline.eval(x)?)
    }
}

/// Map eigenvectors `indices` of a source FD problem through `rel` onto `target`.
///
/// `target_op` is the transformed operator in the target variable with the source
/// energy left as the parameter `energy`; each state binds its own eigenvalue.
/// `bindings` supplies the source parameters and `hbar, mu, a`.
pub fn map_wavefunction(
    pairs: &Eigenpairs,
    indices: &[usize],
    rel: &PropagatorRelation,
    target_op: &DiffOp,
    energy: &str,
    bindings: &Bindings,
    target: &Grid,
    kind: InterpKind,
) -> Result<MappingReport, NumericError> {
    if target.variable != rel.target_variable.name() {
        return Err(NumericError::DomainError(format!("target grid must be in `{}`", rel.target_variable.name())));
    }
    let tv = [target.variable.as_str()];
    let x_of = CompiledExpr::new(&rel.coordinate_map, &tv, bindings)?;
    let weight = CompiledExpr::new(&rel.state_weight(), &tv, bindings)?;
    let conj = CompiledExpr::new(&rel.conjugation_factor, &tv, bindings)?;
    let density = CompiledExpr::new(&(Expr::constant(rel.measure_out.constant.clone()) * rel.measure_out.density.clone()), &tv, bindings)?;
    let sg = &pairs.grid;
    let pts = target.points();

    let mut states = Vec::new();
    let mut funcs = Vec::new();
    for &k in indices {
        let psi = pairs
            .vectors
            .get(k)
            .ok_or_else(|| NumericError::DomainError(format!("no eigenvector {k}")))?;
        // Dirichlet zeros at both ends are part of the samples
        let mut y = Vec::with_capacity(psi.len() + 2);
        y.push(0.0);
        y.extend_from_slice(psi);
        y.push(0.0);
        let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let edge = psi[0].abs().max(psi[psi.len() - 1].abs());
        let spline = Cubic::new(sg.a(), sg.dx(), &y, kind)?;
        let m = Mapped { spline, x_of: &x_of, weight: &weight, tail_ok: edge <= TAIL_TOL * peak };
        let values: Vec<f64> = pts.iter().map(|&t| m.eval(t)).collect::<Result<_, _>>()?;
        let phi: Vec<f64> = pts.iter().zip(&values).map(|(&t, v)| Ok(v / conj.eval(&[t])?)).collect::<Result<_, NumericError>>()?;

        let mut b = bindings.clone();
        b.set(energy, pairs.values[k]);
        let residual = relative_residual(target_op, &phi, target, &b)?;
        states.push(MappedState { index: k, energy: pairs.values[k], residual, values });
        funcs.push(m);
    }

    // Gram matrix by composite Gauss-Legendre over target cells
    let (gx, gw) = gauss_legendre(6);
    let (lo, hi) = (target.a(), target.b());
    let cells = target.n + 1;
    let h = (hi - lo) / cells as f64;
    let mut samples: Vec<Vec<f64>> = vec![Vec::new(); funcs.len()];
    let mut weights = Vec::new();
    for c in 0..cells {
        let mid = lo + (c as f64 + 0.5) * h;
        for (u, w) in gx.iter().zip(&gw) {
            let t = mid + 0.5 * h * u;
            weights.push(0.5 * h * w * density.eval(&[t])?.abs());
            for (s, f) in samples.iter_mut().zip(&funcs) {
                s.push(f.eval(t)?);
            }
        }
    }
    let gram: Vec<Vec<f64>> = samples
        .iter()
        .map(|a| samples.iter().map(|b| a.iter().zip(b).zip(&weights).map(|((p, q), w)| p * q * w).sum()).collect())
        .collect();
    let mut max_orth: f64 = 0.0;
    for (i, row) in gram.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            max_orth = max_orth.max((v - want).abs());
        }
    }
    let max_residual = states.iter().map(|s| s.residual).fold(0.0, f64::max);
    Ok(MappingReport {
        target_grid: target.clone(),
        interpolation: kind,
        states,
        gram,
        max_residual,
        max_orthonormality_error: max_orth,
    })
}

/// `‖Ŝφ‖ / (‖c₂φ″‖ + ‖c₁φ′‖ + ‖c₀φ‖)`, all by central differences on `grid`.
pub fn relative_residual(op: &DiffOp, phi: &[f64], grid: &Grid, b: &Bindings) -> Result<f64, NumericError> {
    let v = op.variables().to_vec();
    let r = apply_on_grid(op, phi, grid, b)?;
    let mut scale = 0.0;
    for k in 0..3u8 {
        let part = DiffOp::from_terms(&v, [(vec![k], op.coefficient(&[k]))]);
        let p = apply_on_grid(&part, phi, grid, b)?;
        scale += grid.dot(&p, &p).sqrt();
    }
    Ok(grid.dot(&r, &r).sqrt() / scale.max(f64::MIN_POSITIVE))
}
