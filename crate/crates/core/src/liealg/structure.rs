//! Commutator tables and the Jacobi identity, checked by sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{GeneratorSet, LieError, NAMES};
use crate::diffop::{op_equal, DiffOp};

pub const COEFF_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorCheck {
    pub left: String,
    pub right: String,
    /// The expected right-hand side, e.g. `i*J3` or `0`.
    pub expected: String,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorReport {
    pub frame: String,
    pub seed: u64,
    pub entries: Vec<CommutatorCheck>,
    pub all_pass: bool,
}

/// All 15 independent commutators against [`GeneratorSet::structure_constants`].
pub fn verify_commutators(gens: &GeneratorSet, seed: u64) -> Result<CommutatorReport, LieError> {
    let dom = gens.domain().tolerances(COEFF_TOL, 0.0);
    let mut entries = Vec::new();
    for ((l, r), rhs) in gens.structure_constants() {
        let got = gens.get(&l)?.commutator(gens.get(&r)?);
        let want = gens.expected(&rhs)?;
        let rep = op_equal(&got, &want, &dom, seed)?;
        let expected = if rhs.is_empty() {
            "0".to_string()
        } else {
            rhs.iter().map(|(n, c)| format!("{c} {n}")).collect::<Vec<_>>().join(" + ")
        };
        entries.push(CommutatorCheck {
            left: l,
            right: r,
            expected,
            max_residual: rep.max_abs_diff,
            pass: rep.equal && rep.max_abs_diff < COEFF_TOL,
        });
    }
    let all_pass = entries.iter().all(|e| e.pass);
    Ok(CommutatorReport { frame: gens.frame.name(), seed, entries, all_pass })
}

/// `[[A,B],C] + [[B,C],A] + [[C,A],B] ≐ 0` for `count` random triples; returns the
/// largest coefficient residual.
pub fn jacobi_check(gens: &GeneratorSet, count: usize, seed: u64) -> Result<f64, LieError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dom = gens.domain().samples(12);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let pick: Vec<&DiffOp> =
            (0..3).map(|_| gens.get(NAMES[rng.gen_range(0..6)])).collect::<Result<_, _>>()?;
        let (a, b, c) = (pick[0], pick[1], pick[2]);
        let sum = a.commutator(b).commutator(c).add(&b.commutator(c).commutator(a)).add(&c.commutator(a).commutator(b));
        let rep = op_equal(&sum, &DiffOp::zero(&gens.variables), &dom, seed)?;
        worst = worst.max(rep.max_abs_diff);
    }
    Ok(worst)
}
