//! SO(4) = SU(2)⊗SU(2) generators as first-order differential operators, their
//! commutator tables and Casimirs, and transport of the generators by a PCT.

mod casimir;
mod hermitian;
mod spectrum;
mod structure;
mod transform;

use std::collections::BTreeMap;

use crate::diffop::{DiffOp, DiffOpError, HbarConvention, Measure};
use crate::expr::build::*;
use crate::expr::{Bindings, Expr, ExprError, Scalar, Symbol};

pub use casimir::{
    casimir, euler_casimir_printed, euler_flattening, flattened_euler_casimir, pt_couplings_exact, pt_reduction, reduce_on_ansatz, rm_reduction, Block,
    PtReduction, RmReduction,
};
pub use hermitian::{hermiticity_adjoint, hermiticity_quadrature, HermiticityCheck};
pub use spectrum::{pt_spectrum_from_rep, rm_spectrum_from_rep};
pub use structure::{jacobi_check, verify_commutators, CommutatorCheck, CommutatorReport};
pub use transform::{rm_angle_map, rm_generators_printed, transform_generators, TransformMode};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LieError {
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("singular transform: {0}")]
    SingularTransform(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    DiffOp(#[from] DiffOpError),
    #[error(transparent)]
    Potential(#[from] crate::potentials::PotentialError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    CartesianR4,
    EulerScaled,
    /// Image of another set under a change of the `θ` variable.
    Transformed(String),
}

impl Frame {
    pub fn name(&self) -> String {
        match self {
            Frame::CartesianR4 => "cartesian".into(),
            Frame::EulerScaled => "euler".into(),
            Frame::Transformed(s) => s.clone(),
        }
    }
}

pub const NAMES: [&str; 6] = ["J1", "J2", "J3", "K1", "K2", "K3"];

/// Six generators over a common variable list, with the data needed to check them.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub frame: Frame,
    pub variables: Vec<Symbol>,
    /// In the order of [`NAMES`].
    pub generators: Vec<(String, DiffOp)>,
    pub hbar: HbarConvention,
    /// Invariant measure; its density depends on one variable only.
    pub measure: Measure,
    /// Sampling ranges for the checks, as `(variable, lo, hi)`.
    pub ranges: Vec<(String, f64, f64)>,
    pub bindings: Bindings,
}

impl GeneratorSet {
    pub fn get(&self, name: &str) -> Result<&DiffOp, LieError> {
        self.generators
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
            .ok_or_else(|| LieError::UnknownGenerator(name.into()))
    }

    /// The `[T_a, T_b] = i ε_abc T_c` table for both blocks and `[J, K] = 0`, as
    /// `(a, b) → Σ coeff · T_c` (times `ħ` under [`HbarConvention::Present`]).
    pub fn structure_constants(&self) -> Vec<((String, String), Vec<(String, Scalar)>)> {
        let mut out = Vec::new();
        for x in 0..6 {
            for y in x + 1..6 {
                let (bx, by) = (x / 3, y / 3);
                let rhs = if bx != by {
                    vec![]
                } else {
                    let (l, m) = (x % 3, y % 3);
                    let n = 3 - l - m;
                    let eps = if (m + 3 - l) % 3 == 1 { 1 } else { -1 };
                    vec![(NAMES[3 * bx + n].to_string(), &Scalar::i() * &Scalar::int(eps))]
                };
                out.push(((NAMES[x].to_string(), NAMES[y].to_string()), rhs));
            }
        }
        out
    }

    /// The expected commutator for a table entry as an operator.
    pub fn expected(&self, rhs: &[(String, Scalar)]) -> Result<DiffOp, LieError> {
        let mut out = DiffOp::zero(&self.variables);
        for (n, c) in rhs {
            let mut t = self.get(n)?.scale(c);
            if self.hbar == HbarConvention::Present {
                t = t.left_mul(&param("hbar"));
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Multiply each generator by `ħ`.
    pub fn with_hbar(mut self) -> Self {
        if self.hbar == HbarConvention::Absent {
            for (_, g) in &mut self.generators {
                *g = g.left_mul(&param("hbar"));
            }
            self.hbar = HbarConvention::Present;
            self.bindings.set("hbar", 0.8);
        }
        self
    }

    pub fn is_first_order(&self) -> bool {
        self.generators.iter().all(|(_, g)| g.order() <= 1)
    }

    /// `K_i` equals `J_i` with `φ ↔ ψ` exchanged (Euler-type frames).
    pub fn k_from_j_by_swap(&self) -> Result<bool, LieError> {
        let (phi, psi) = (Symbol::var("phi"), Symbol::var("psi"));
        let Some(ip) = self.variables.iter().position(|v| *v == phi) else { return Ok(false) };
        let Some(iq) = self.variables.iter().position(|v| *v == psi) else { return Ok(false) };
        let map: BTreeMap<Symbol, Expr> =
            [(phi.clone(), Expr::sym(&psi)), (psi.clone(), Expr::sym(&phi))].into_iter().collect();
        let dom = self.domain();
        for i in 0..3 {
            let j = self.get(NAMES[i])?;
            let swapped = DiffOp::from_terms(
                &self.variables,
                j.terms().map(|(idx, c)| {
                    let mut idx = idx.clone();
                    idx.swap(ip, iq);
                    (idx, c.substitute_all(&map))
                }),
            );
            if !crate::diffop::op_equal(&swapped, self.get(NAMES[i + 3])?, &dom, 5)?.equal {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn domain(&self) -> crate::expr::SampleDomain {
        let mut d = crate::expr::SampleDomain::new().with_bindings(&self.bindings).margin(0.05);
        for (v, lo, hi) in &self.ranges {
            d = d.range(v, *lo, *hi);
        }
        d
    }
}

fn vars(names: &[&str]) -> Vec<Symbol> {
    names.iter().map(|n| Symbol::var(n)).collect()
}

/// `Σ coeff · ∂_var` over `vars`.
pub(crate) fn first_order(vs: &[Symbol], parts: &[(Expr, &str)]) -> DiffOp {
    let mut out = DiffOp::zero(vs);
    for (c, v) in parts {
        out = out.add(&DiffOp::partial(vs, &Symbol::var(v), 1).left_mul(c));
    }
    out
}

/// Rotations of ℝ⁴ split into the two commuting SU(2) blocks.
pub fn so4_generators_cartesian() -> GeneratorSet {
    let vs = vars(&["x1", "x2", "x3", "x4"]);
    let x = |k: usize| var(&format!("x{k}"));
    // (sign, x_i, ∂_j) triples, all times i/2
    let table: [[(i64, usize, usize); 4]; 6] = [
        [(-1, 1, 4), (1, 2, 3), (-1, 3, 2), (1, 4, 1)],
        [(-1, 1, 3), (-1, 2, 4), (1, 3, 1), (1, 4, 2)],
        [(-1, 1, 2), (1, 2, 1), (1, 3, 4), (-1, 4, 3)],
        [(-1, 1, 2), (1, 2, 1), (-1, 3, 4), (1, 4, 3)],
        [(1, 1, 3), (-1, 2, 4), (-1, 3, 1), (1, 4, 2)],
        [(1, 1, 4), (1, 2, 3), (-1, 3, 2), (-1, 4, 1)],
    ];
    let half_i = Expr::i() * rat(1, 2);
    let generators = table
        .iter()
        .zip(NAMES)
        .map(|(row, name)| {
            let names: Vec<String> = row.iter().map(|t| format!("x{}", t.2)).collect();
            let parts: Vec<(Expr, &str)> = row
                .iter()
                .zip(&names)
                .map(|(&(s, i, _), d)| (half_i.clone() * int(s) * x(i), d.as_str()))
                .collect();
            (name.to_string(), first_order(&vs, &parts))
        })
        .collect();
    GeneratorSet {
        frame: Frame::CartesianR4,
        measure: Measure::flat(&vs[0]),
        variables: vs,
        generators,
        hbar: HbarConvention::Absent,
        ranges: (1..=4).map(|k| (format!("x{k}"), -1.0, 1.0)).collect(),
        bindings: Bindings::new(),
    }
}

/// Euler-angle generators on `(θ, φ, ψ)` after scaling the polar angle to `2aθ`.
pub fn so4_generators_euler() -> GeneratorSet {
    let vs = vars(&["theta", "phi", "psi"]);
    let t = int(2) * param("a") * var("theta");
    let i = Expr::i();
    let inv2a = (int(2) * param("a")).recip();
    let (csc_t, cot_t) = (csc(t.clone()), cot(t.clone()));
    let block = |ang: &str, d_same: &str, d_other: &str| {
        let (s, c) = (sin(var(ang)), cos(var(ang)));
        // ordering: θ, the "other" angle, the angle itself
        let g1 = first_order(
            &vs,
            &[
                (i.clone() * inv2a.clone() * s.clone(), "theta"),
                (-(i.clone() * csc_t.clone() * c.clone()), d_other),
                (i.clone() * cot_t.clone() * c.clone(), d_same),
            ],
        );
        let g2 = first_order(
            &vs,
            &[
                (-(i.clone() * inv2a.clone() * c), "theta"),
                (-(i.clone() * csc_t.clone() * s.clone()), d_other),
                (i.clone() * cot_t.clone() * s, d_same),
            ],
        );
        let g3 = DiffOp::partial(&vs, &Symbol::var(d_same), 1).left_mul(&-i.clone());
        [g1, g2, g3]
    };
    let j = block("psi", "psi", "phi");
    let k = block("phi", "phi", "psi");
    let generators = NAMES.iter().map(|n| n.to_string()).zip(j.into_iter().chain(k)).collect();
    let a = 0.7;
    GeneratorSet {
        frame: Frame::EulerScaled,
        measure: Measure::new(&vs[0], sin(t)),
        variables: vs,
        generators,
        hbar: HbarConvention::Absent,
        ranges: vec![
            ("theta".into(), 0.0, std::f64::consts::PI / (2.0 * a)),
            ("phi".into(), 0.0, 2.0 * std::f64::consts::PI),
            ("psi".into(), 0.0, 2.0 * std::f64::consts::PI),
        ],
        bindings: Bindings::new().with("a", a),
    }
}

#[cfg(test)]
mod tests;
