//! Transport of a generator set by a change of the `θ` variable.

use super::{first_order, Frame, GeneratorSet, LieError, NAMES};
use crate::diffop::DiffOp;
use crate::expr::build::*;
use crate::expr::{Expr, Symbol};
use crate::xform::{pct_checked, similarity, transform_measure, Interval, TransformStep, XformError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMode {
    /// Change of variable alone.
    PctOnly,
    /// Change of variable followed by the `|f′|^{-1/2}` similarity.
    Full,
}

fn singular(e: XformError) -> LieError {
    match e {
        XformError::SingularTransform(s) => LieError::SingularTransform(s),
        XformError::Expr(e) => LieError::Expr(e),
        other => LieError::SingularTransform(other.to_string()),
    }
}

/// Map each generator by `θ_old = f(θ)` (and, in [`TransformMode::Full`], conjugate
/// by `|f′|^{-1/2}`). `range` is the new `θ` sampling interval; `f′` must not vanish on it.
pub fn transform_generators(
    gens: &GeneratorSet,
    f: &Expr,
    mode: TransformMode,
    range: (f64, f64),
    name: &str,
) -> Result<GeneratorSet, LieError> {
    let th = Symbol::var("theta");
    let iv = Interval::new(Expr::float(range.0), Expr::float(range.1));
    let b = &gens.bindings;
    let fp = f.derivative(&th);
    let mut mid = b.clone();
    mid.set("theta", 0.5 * (range.0 + range.1));
    let sign = if fp.eval(&mid)? < 0.0 { int(-1) } else { int(1) };
    let g = powr(sign * fp, -1, 2);

    let mut measure = transform_measure(&gens.measure, &TransformStep::Pct { f: f.clone(), inverse: None }, &th)
        .map_err(singular)?;
    if mode == TransformMode::Full {
        measure = transform_measure(&measure, &TransformStep::Similarity { g: g.clone() }, &th).map_err(singular)?;
    }
    let mut generators = Vec::new();
    for (n, op) in &gens.generators {
        let mut t = pct_checked(op, &th, f, &th, &iv, b).map_err(singular)?;
        if mode == TransformMode::Full {
            t = similarity(&t, &g);
        }
        generators.push((n.clone(), t));
    }
    let mut ranges: Vec<(String, f64, f64)> =
        gens.ranges.iter().filter(|r| r.0 != "theta").cloned().collect();
    ranges.insert(0, ("theta".into(), range.0, range.1));
    Ok(GeneratorSet {
        frame: Frame::Transformed(name.into()),
        variables: gens.variables.clone(),
        generators,
        hbar: gens.hbar,
        measure,
        ranges,
        bindings: gens.bindings.clone(),
    })
}

/// `θ_PT = (1/2a) arccos(tanh aθ)`, taking the Rosen-Morse line onto `(0, π/2a)`.
pub fn rm_angle_map() -> Expr {
    rat(1, 2) / param("a") * arccos(tanh(param("a") * var("theta")))
}

/// The Rosen-Morse generator blocks in the printed form (`J₃ = −i∂_ψ`,
/// `J₁ = i(−(1/a)cosh aθ sin ψ ∂_θ − cosh aθ cos ψ ∂_φ + sinh aθ cos ψ ∂_ψ)`, …).
pub fn rm_generators_printed() -> GeneratorSet {
    let euler = super::so4_generators_euler();
    let vs = euler.variables.clone();
    let at = param("a") * var("theta");
    let (ch, sh) = (cosh(at.clone()), sinh(at.clone()));
    let i = Expr::i();
    let inva = param("a").recip();
    let block = |ang: &str, d_other: &str| {
        let (s, c) = (sin(var(ang)), cos(var(ang)));
        let g1 = first_order(
            &vs,
            &[
                (-(i.clone() * inva.clone() * ch.clone() * s.clone()), "theta"),
                (-(i.clone() * ch.clone() * c.clone()), d_other),
                (i.clone() * sh.clone() * c.clone(), ang),
            ],
        );
        let g2 = first_order(
            &vs,
            &[
                (i.clone() * inva.clone() * ch.clone() * c.clone(), "theta"),
                (-(i.clone() * ch.clone() * s.clone()), d_other),
                (i.clone() * sh.clone() * s, ang),
            ],
        );
        let g3 = DiffOp::partial(&vs, &Symbol::var(ang), 1).left_mul(&-i.clone());
        [g1, g2, g3]
    };
    let j = block("psi", "phi");
    let k = block("phi", "psi");
    let generators = NAMES.iter().map(|n| n.to_string()).zip(j.into_iter().chain(k)).collect();
    let mut ranges = euler.ranges.clone();
    ranges[0] = ("theta".into(), -2.0, 2.0);
    GeneratorSet {
        frame: Frame::Transformed("rm-printed".into()),
        measure: crate::diffop::Measure::new(&vs[0], rat(1, 2) * powi(sech(at), 2)),
        variables: vs,
        generators,
        hbar: euler.hbar,
        ranges,
        bindings: euler.bindings,
    }
}
