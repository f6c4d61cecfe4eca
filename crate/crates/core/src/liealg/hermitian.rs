//! Symmetry of generators under their tracked measure.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{GeneratorSet, LieError, NAMES};
use crate::diffop::op_equal;
use crate::expr::CompiledExpr;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermiticityCheck {
    pub generator: String,
    pub pair: usize,
    /// `⟨φ, Tψ⟩_μ`
    pub lhs: [f64; 2],
    /// `⟨Tφ, ψ⟩_μ`
    pub rhs: [f64; 2],
    /// `|lhs − rhs| / (‖φ‖ ‖Tψ‖)`
    pub residual: f64,
}

/// `T† ≐ T` under `gens.measure` for each generator; returns `(name, max deviation)`
/// for those that fail, empty when all pass.
pub fn hermiticity_adjoint(gens: &GeneratorSet, seed: u64) -> Result<Vec<(String, f64)>, LieError> {
    let dom = gens.domain();
    let mut bad = Vec::new();
    for (n, g) in &gens.generators {
        let adj = g.adjoint(&gens.measure)?;
        let rep = op_equal(&adj, g, &dom, seed)?;
        if !rep.equal {
            bad.push((n.clone(), rep.max_abs_diff));
        }
    }
    Ok(bad)
}

const BUMP_POWER: i32 = 6;

/// `P(θ) Π (1 − u_k²)^p e^{i(n₁φ + n₂ψ)}` with `u_k = (x_k − c_k)/w_k`, and its gradient.
#[derive(Debug, Clone)]
struct TestFn {
    c: [f64; 3],
    w: [f64; 3],
    tilt: f64,
    waves: [f64; 2],
}

impl TestFn {
    fn support(&self, k: usize) -> (f64, f64) {
        (self.c[k] - self.w[k], self.c[k] + self.w[k])
    }

    /// Value and the three first partials.
    fn eval(&self, x: &[f64; 3]) -> [Complex64; 4] {
        let mut b = [0.0; 3];
        let mut db = [0.0; 3];
        for k in 0..3 {
            let u = (x[k] - self.c[k]) / self.w[k];
            let s = 1.0 - u * u;
            if s <= 0.0 {
                return [Complex64::new(0.0, 0.0); 4];
            }
            b[k] = s.powi(BUMP_POWER);
            db[k] = -2.0 * BUMP_POWER as f64 * u * s.powi(BUMP_POWER - 1) / self.w[k];
        }
        let p = 1.0 + self.tilt * (x[0] - self.c[0]);
        let e = Complex64::from_polar(1.0, self.waves[0] * x[1] + self.waves[1] * x[2]);
        let prod = b[0] * b[1] * b[2];
        let i = Complex64::i();
        [
            e * p * prod,
            e * (self.tilt * prod + p * db[0] * b[1] * b[2]),
            e * p * b[0] * b[2] * (db[1] + i * self.waves[0] * b[1]),
            e * p * b[0] * b[1] * (db[2] + i * self.waves[1] * b[2]),
        ]
    }
}

/// Compare `⟨φ, Tψ⟩` and `⟨Tφ, ψ⟩` for `pairs` random compactly supported pairs,
/// cycling through the generators. Test functions are polynomial bumps; integrals
/// use an `n`-point Gauss-Legendre rule per axis over the common support.
pub fn hermiticity_quadrature(
    gens: &GeneratorSet,
    pairs: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<HermiticityCheck>, LieError> {
    if gens.variables.len() != 3 || !gens.is_first_order() {
        return Err(LieError::UnsupportedShape("quadrature check needs first-order generators in three variables".into()));
    }
    let names: Vec<String> = gens.variables.iter().map(|v| v.name().to_string()).collect();
    let names: [&str; 3] = [&names[0], &names[1], &names[2]];
    let range = |v: &str| {
        gens.ranges.iter().find(|r| r.0 == v).map(|r| (r.1, r.2)).ok_or_else(|| {
            LieError::UnsupportedShape(format!("no sampling range for `{v}`"))
        })
    };
    let ranges = [range(names[0])?, range(names[1])?, range(names[2])?];
    let density = CompiledExpr::new(&gens.measure.weight(), &names, &gens.bindings)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for p in 0..pairs {
        let gname = NAMES[p % NAMES.len()];
        let t = gens.get(gname)?;
        // coefficient of (value, ∂₀, ∂₁, ∂₂)
        let idx: [Vec<u8>; 4] = [vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let coeffs: Vec<CompiledExpr> = idx
            .iter()
            .map(|i| CompiledExpr::new(&t.coefficient(i), &names, &gens.bindings))
            .collect::<Result<_, _>>()?;
        let mut fns = Vec::new();
        let mut centre = [0.0; 3];
        for k in 0..3 {
            let (lo, hi) = ranges[k];
            centre[k] = rng.gen_range(lo + 0.35 * (hi - lo)..hi - 0.35 * (hi - lo));
        }
        for _ in 0..2 {
            let mut f = TestFn { c: [0.0; 3], w: [0.0; 3], tilt: rng.gen_range(-1.0..1.0), waves: [0.0; 2] };
            for k in 0..3 {
                let len = ranges[k].1 - ranges[k].0;
                f.c[k] = centre[k] + rng.gen_range(-0.04..0.04) * len;
                f.w[k] = rng.gen_range(0.18..0.26) * len;
            }
            f.waves = [rng.gen_range(-2..=2) as f64, rng.gen_range(-2..=2) as f64];
            fns.push(f);
        }
        let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..3)
            .map(|k| {
                let (a0, b0) = fns[0].support(k);
                let (a1, b1) = fns[1].support(k);
                crate::numeric::quad::gauss_legendre_on(n, a0.max(a1), b0.min(b1))
            })
            .collect();
        let apply = |v: &[Complex64; 4], x: &[f64; 3]| -> Result<Complex64, LieError> {
            let mut s = Complex64::new(0.0, 0.0);
            for (c, val) in coeffs.iter().zip(v) {
                s += c.eval_complex(x)? * val;
            }
            Ok(s)
        };
        let (mut lhs, mut rhs) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let (mut nphi, mut ntpsi) = (0.0, 0.0);
        for (x0, w0) in rules[0].0.iter().zip(&rules[0].1) {
            for (x1, w1) in rules[1].0.iter().zip(&rules[1].1) {
                for (x2, w2) in rules[2].0.iter().zip(&rules[2].1) {
                    let x = [*x0, *x1, *x2];
                    let wt = w0 * w1 * w2 * density.eval_complex(&x)?.re;
                    let (a, b) = (fns[0].eval(&x), fns[1].eval(&x));
                    let (ta, tb) = (apply(&a, &x)?, apply(&b, &x)?);
                    lhs += wt * a[0].conj() * tb;
                    rhs += wt * ta.conj() * b[0];
                    nphi += wt.abs() * a[0].norm_sqr();
                    ntpsi += wt.abs() * tb.norm_sqr();
                }
            }
        }
        let scale = nphi.sqrt() * ntpsi.sqrt();
        out.push(HermiticityCheck {
            generator: gname.into(),
            pair: p,
            lhs: [lhs.re, lhs.im],
            rhs: [rhs.re, rhs.im],
            residual: (lhs - rhs).norm() / scale.max(f64::MIN_POSITIVE),
        });
    }
    Ok(out)
}
