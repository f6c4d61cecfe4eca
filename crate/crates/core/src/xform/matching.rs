//! Identify a transformed operator with a catalog potential by sampling.

use std::collections::BTreeMap;

use serde::Serialize;

use super::XformError;
use crate::diffop::DiffOp;
use crate::expr::{Bindings, Expr, Symbol};
use crate::potentials::{EndpointKind, PotentialSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterFit {
    /// Fitted couplings and the target energy `E` (minus the constant term).
    pub values: BTreeMap<String, f64>,
    /// `‖Ac − v‖ / ‖v‖` over the sample points.
    pub residual: f64,
    pub points: usize,
}

/// Least squares by modified Gram-Schmidt on the columns of `a` (row-major rows).
/// Returns the solution and the residual norm.
pub fn least_squares(a: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, f64) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut q: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a[i][j]).collect()).collect();
    let mut r = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in 0..j {
            let d: f64 = (0..m).map(|i| q[k][i] * q[j][i]).sum();
            r[k][j] = d;
            for i in 0..m {
                q[j][i] -= d * q[k][i];
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        r[j][j] = norm;
        if norm > 0.0 {
            for v in &mut q[j] {
                *v /= norm;
            }
        }
    }
    let qtb: Vec<f64> = (0..n).map(|j| (0..m).map(|i| q[j][i] * b[i]).sum()).collect();
    let mut x = vec![0.0; n];
    for j in (0..n).rev() {
        let s: f64 = qtb[j] - (j + 1..n).map(|k| r[j][k] * x[k]).sum::<f64>();
        x[j] = if r[j][j] != 0.0 { s / r[j][j] } else { 0.0 };
    }
    let res = (0..m)
        .map(|i| {
            let ax: f64 = (0..n).map(|j| a[i][j] * x[j]).sum();
            (ax - b[i]).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    (x, res)
}

const TOL: f64 = 1e-8;

fn eval_at(e: &Expr, var: &Symbol, t: f64, b: &Bindings) -> Result<f64, XformError> {
    let mut bt = b.clone();
    bt.set(var.name(), t);
    Ok(e.eval(&bt)?)
}

/// Fit the zeroth-order coefficient of `sf` to `Σ cᵢ basisᵢ + c₀` where `basisᵢ` is
/// the target potential with coupling `i` set to one and the others to zero. The
/// kinetic part must already be `−(ħ²/2μ)∂²` with no first-order term.
pub fn match_parameters(
    sf: &DiffOp,
    target: &PotentialSpec,
    couplings: &[String],
    b: &Bindings,
) -> Result<ParameterFit, XformError> {
    let var = &target.variable;
    if sf.variables() != std::slice::from_ref(var) {
        return Err(XformError::NoMatch {
            residual: f64::INFINITY,
            detail: format!("operator is not in `{}` alone", var.name()),
        });
    }
    if [target.domain.lo_kind, target.domain.hi_kind].contains(&EndpointKind::Infinite) {
        return Err(XformError::Plan("matching needs a bounded target domain".into()));
    }
    let lo = target.domain.lo.eval(b)?;
    let hi = target.domain.hi.eval(b)?;
    let n = couplings.len() + 1 + 4;
    let pts: Vec<f64> =
        (0..n).map(|k| lo + (hi - lo) * (0.05 + 0.9 * (k as f64 + 0.5) / n as f64)).collect();

    let kinetic = (Expr::powi(Expr::param("hbar"), 2) / (Expr::int(2) * Expr::param("mu"))).neg();
    let c2 = sf.coefficient(&[2]);
    let c1 = sf.coefficient(&[1]);
    for &t in &pts {
        let want = eval_at(&kinetic, var, t, b)?;
        let got = eval_at(&c2, var, t, b)?;
        let first = eval_at(&c1, var, t, b)?;
        if (got - want).abs() > TOL * want.abs() || first.abs() > TOL * want.abs() {
            return Err(XformError::NoMatch {
                residual: ((got - want).abs() + first.abs()) / want.abs(),
                detail: format!("kinetic part is not −(ħ²/2μ)∂² at {}={t}", var.name()),
            });
        }
    }

    let basis: Vec<Expr> = couplings
        .iter()
        .map(|c| {
            let map: BTreeMap<Symbol, Expr> = couplings
                .iter()
                .map(|d| (Symbol::param(d), if d == c { Expr::one() } else { Expr::zero() }))
                .collect();
            target.potential.substitute_all(&map)
        })
        .collect();
    let v = sf.coefficient(&[0]);
    let mut rows = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for &t in &pts {
        let mut row = Vec::with_capacity(basis.len() + 1);
        for e in &basis {
            row.push(eval_at(e, var, t, b)?);
        }
        row.push(1.0);
        rows.push(row);
        rhs.push(eval_at(&v, var, t, b)?);
    }
    let (c, res) = least_squares(&rows, &rhs);
    let scale = rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let residual = res / scale;
    if residual > TOL {
        return Err(XformError::NoMatch {
            residual,
            detail: format!("potential is not in the span of {}'s basis plus a constant", target.id),
        });
    }
    let mut values: BTreeMap<String, f64> =
        couplings.iter().cloned().zip(c.iter().copied()).collect();
    values.insert("E".into(), -c[couplings.len()]);
    Ok(ParameterFit { values, residual, points: n })
}
