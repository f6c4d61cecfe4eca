//! Seeded point-sampling equality for expressions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Bindings, Expr, ExprError};

/// Where and how to sample. Each listed variable is drawn uniformly from its
/// interval shrunk by `margin * length` at both ends; everything else must be bound
/// in `bindings`.
#[derive(Debug, Clone)]
pub struct SampleDomain {
    pub ranges: Vec<(String, f64, f64)>,
    pub bindings: Bindings,
    pub samples: usize,
    pub atol: f64,
    pub rtol: f64,
    pub margin: f64,
}

impl SampleDomain {
    pub fn new() -> Self {
        SampleDomain {
            ranges: Vec::new(),
            bindings: Bindings::new(),
            samples: 32,
            atol: 1e-10,
            rtol: 1e-9,
            margin: 0.02,
        }
    }

    pub fn range(mut self, var: &str, lo: f64, hi: f64) -> Self {
        self.ranges.push((var.to_string(), lo, hi));
        self
    }

    pub fn bind(mut self, name: &str, v: f64) -> Self {
        self.bindings.set(name, v);
        self
    }

    pub fn with_bindings(mut self, b: &Bindings) -> Self {
        self.bindings.extend(b);
        self
    }

    pub fn tolerances(mut self, atol: f64, rtol: f64) -> Self {
        self.atol = atol;
        self.rtol = rtol;
        self
    }

    pub fn samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    pub fn margin(mut self, m: f64) -> Self {
        self.margin = m;
        self
    }

    /// Draw sample points (full bindings) in a deterministic order.
    pub fn points(&self, seed: u64, count: usize) -> Vec<Bindings> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let mut b = self.bindings.clone();
                for (name, lo, hi) in &self.ranges {
                    let pad = self.margin * (hi - lo);
                    b.set(name, rng.gen_range((lo + pad)..(hi - pad)));
                }
                b
            })
            .collect()
    }
}

impl Default for SampleDomain {
    fn default() -> Self {
        SampleDomain::new()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstPoint {
    pub point: Vec<(String, f64)>,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqReport {
    pub equal: bool,
    pub samples_used: usize,
    /// Largest `|e1 - e2|` over the sample.
    pub max_abs_diff: f64,
    /// Largest `|e1 - e2| / max(|e1|, |e2|)` over the sample (0 where both vanish).
    pub max_rel_diff: f64,
    pub worst: Option<WorstPoint>,
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Decide `e1 == e2` by evaluation at `domain.samples` seeded random points.
///
/// Points where either side is undefined are skipped (up to four times the
/// requested count are drawn); if none remain the result is a `DomainError`.
pub fn numerically_equal(
    e1: &Expr,
    e2: &Expr,
    domain: &SampleDomain,
    seed: u64,
) -> Result<EqReport, ExprError> {
    let mut used = 0;
    let mut equal = true;
    let mut max_abs: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    let mut worst: Option<WorstPoint> = None;
    let mut worst_score = -1.0;
    let mut first_err = None;
    for b in domain.points(seed, domain.samples * 4) {
        if used == domain.samples {
            break;
        }
        let (l, r) = match (e1.eval_complex(&b), e2.eval_complex(&b)) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(e @ ExprError::UnboundSymbol(_)), _) | (_, Err(e @ ExprError::UnboundSymbol(_))) => {
                return Err(e)
            }
            (Err(e), _) | (_, Err(e)) => {
                first_err.get_or_insert(e);
                continue;
            }
        };
        used += 1;
        let diff = (l - r).norm();
        let scale = l.norm().max(r.norm());
        let tol = domain.atol + domain.rtol * scale;
        if diff > tol {
            equal = false;
        }
        max_abs = max_abs.max(diff);
        if scale > 0.0 {
            max_rel = max_rel.max(diff / scale);
        }
        let score = diff / tol;
        if score > worst_score {
            worst_score = score;
            let mut point: Vec<(String, f64)> = domain
                .ranges
                .iter()
                .map(|(n, _, _)| (n.clone(), b.get(n).unwrap_or(f64::NAN)))
                .collect();
            point.sort_by(|a, b| a.0.cmp(&b.0));
            worst = Some(WorstPoint { point, lhs: c2(l), rhs: c2(r), abs_diff: diff });
        }
    }
    if used == 0 {
        return Err(first_err
            .unwrap_or_else(|| ExprError::DomainError("no valid sample points".into())));
    }
    Ok(EqReport { equal, samples_used: used, max_abs_diff: max_abs, max_rel_diff: max_rel, worst })
}
