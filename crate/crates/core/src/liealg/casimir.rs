//! Casimir operators and their reduction on separable states.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::{GeneratorSet, LieError, NAMES};
use crate::diffop::{op_equal, DiffOp};
use crate::expr::build::*;
use crate::expr::{reconstruct_rational, Bindings, Expr, SampleDomain, Scalar, Symbol};
use crate::potentials::{build_schrodinger_op, lookup};
use crate::xform::{least_squares, similarity};


#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Block {
    J,
    K,
}

/// `T₁² + T₂² + T₃²` for one block.
pub fn casimir(gens: &GeneratorSet, block: Block) -> Result<DiffOp, LieError> {
    let base = if block == Block::J { 0 } else { 3 };
    let mut out = DiffOp::zero(&gens.variables);
    for name in &NAMES[base..base + 3] {
        let g = gens.get(name)?;
        out = out.add(&g.compose(g));
    }
    Ok(out)
}

fn theta() -> Expr {
    var("theta")
}

/// `4a²J²` in the flattened form with `csc² aθ`, `sec² aθ` couplings, over `(θ, φ, ψ)`.
pub fn euler_casimir_printed() -> DiffOp {
    let vs: Vec<Symbol> = ["theta", "phi", "psi"].iter().map(|n| Symbol::var(n)).collect();
    let a2 = powi(param("a"), 2);
    let at = param("a") * theta();
    let (cc, ss) = (powi(csc(at.clone()), 2), powi(sec(at), 2));
    DiffOp::from_terms(
        &vs,
        [
            (vec![2, 0, 0], int(-1)),
            (vec![0, 2, 0], -(a2.clone() * (cc.clone() + ss.clone()))),
            (vec![0, 0, 2], -(a2.clone() * (cc.clone() + ss.clone()))),
            (vec![0, 1, 1], int(2) * a2.clone() * (cc.clone() - ss.clone())),
            (vec![0, 0, 0], -(rat(1, 4) * a2.clone() * (cc + ss)) - a2),
        ],
    )
}

/// `sin^{1/2}(2aθ)`: the similarity that removes the first-order `θ` term of the
/// Euler-frame Casimir.
pub fn euler_flattening() -> Expr {
    powr(sin(int(2) * param("a") * theta()), 1, 2)
}

/// Replace `∂_φ → i·l` and `∂_ψ → i·m`. Coefficients must not depend on `φ`, `ψ`
/// afterwards; this is checked by sampling over `dom`.
pub fn reduce_on_ansatz(op: &DiffOp, l: &Expr, m: &Expr, dom: &SampleDomain) -> Result<DiffOp, LieError> {
    let (phi, psi) = (Symbol::var("phi"), Symbol::var("psi"));
    let vs = op.variables();
    let ip = vs.iter().position(|v| *v == phi);
    let iq = vs.iter().position(|v| *v == psi);
    let keep: Vec<usize> = (0..vs.len()).filter(|&k| Some(k) != ip && Some(k) != iq).collect();
    let out_vars: Vec<Symbol> = keep.iter().map(|&k| vs[k].clone()).collect();
    let il = Expr::i() * l.clone();
    let im = Expr::i() * m.clone();
    let mut merged: BTreeMap<Vec<u8>, Expr> = BTreeMap::new();
    for (idx, c) in op.terms() {
        let mut f = c.clone();
        if let Some(p) = ip {
            f = f * Expr::powi(il.clone(), idx[p] as i64);
        }
        if let Some(q) = iq {
            f = f * Expr::powi(im.clone(), idx[q] as i64);
        }
        let rest: Vec<u8> = keep.iter().map(|&k| idx[k]).collect();
        let slot = merged.entry(rest).or_insert_with(Expr::zero);
        *slot = slot.clone() + f;
    }
    let zero: BTreeMap<Symbol, Expr> = [(phi.clone(), Expr::zero()), (psi.clone(), Expr::zero())].into_iter().collect();
    let mut terms = Vec::new();
    for (idx, c) in merged {
        if !c.contains(&phi) && !c.contains(&psi) {
            terms.push((idx, c));
            continue;
        }
        let fixed = c.substitute_all(&zero);
        if !crate::expr::numerically_equal(&c, &fixed, dom, 23)?.equal {
            return Err(LieError::UnsupportedShape(format!(
                "coefficient of ∂^{idx:?} depends on φ or ψ after reduction"
            )));
        }
        terms.push((idx, fixed));
    }
    Ok(DiffOp::from_terms(&out_vars, terms))
}

fn q(x: &BigRational) -> Expr {
    Expr::constant(Scalar::real(x.clone()))
}

fn quarter() -> BigRational {
    BigRational::new(1.into(), 4.into())
}

/// Exact Pöschl-Teller couplings `((l−m)² − 1/4, (l+m)² − 1/4)`.
pub fn pt_couplings_exact(l: &BigRational, m: &BigRational) -> (BigRational, BigRational) {
    let d = l - m;
    let s = l + m;
    (&d * &d - quarter(), &s * &s - quarter())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PtReduction {
    pub l: String,
    pub m: String,
    /// Reconstructed from the reduced operator.
    pub csc_coupling: Option<String>,
    pub sec_coupling: Option<String>,
    pub constant: Option<String>,
    /// Couplings and constant equal the exact values as rationals.
    pub exact_match: bool,
    /// Reduced operator equals the reduced printed form.
    pub printed_match: bool,
    /// `γ(γ−1)` and `δ(δ−1)` with `γ = l−m+1/2`, `δ = l+m+1/2` equal the couplings.
    pub exponent_identity: bool,
    /// `(ħ²/2μ)·reduced − (2a²ħ²/μ)k(k+1)` equals the Pöschl-Teller operator
    /// `H − E_k`, `E_k = (2a²ħ²/μ)(k+1/2)²`, for `k = l + j`.
    pub schrodinger_match: bool,
    pub fit_residual: f64,
}

/// Flattened, scaled Euler Casimir `sin^{1/2} · 4a²J² · sin^{−1/2}`.
pub fn flattened_euler_casimir(gens: &GeneratorSet) -> Result<DiffOp, LieError> {
    let c = casimir(gens, Block::J)?.left_mul(&(int(4) * powi(param("a"), 2)));
    Ok(similarity(&c, &euler_flattening()))
}

fn check_bindings() -> Bindings {
    Bindings::new().with("a", 0.7).with("hbar", 0.9).with("mu", 1.3)
}

/// Reduce the flattened Casimir at rational `(l, m)` and read off the couplings.
/// `flat` is [`flattened_euler_casimir`]; `k` is any admissible `l + j`.
pub fn pt_reduction(
    flat: &DiffOp,
    l: &BigRational,
    m: &BigRational,
    k: &BigRational,
) -> Result<PtReduction, LieError> {
    let b = check_bindings();
    let a = b.get("a").unwrap_or(1.0);
    let hi = std::f64::consts::PI / (2.0 * a);
    let dom = SampleDomain::new()
        .range("theta", 0.0, hi)
        .range("phi", 0.0, 6.0)
        .range("psi", 0.0, 6.0)
        .with_bindings(&b)
        .margin(0.04);
    let red = reduce_on_ansatz(flat, &q(l), &q(m), &dom)?;
    let tdom = SampleDomain::new().range("theta", 0.0, hi).with_bindings(&b).margin(0.04);

    let (cc_exact, ss_exact) = pt_couplings_exact(l, m);
    let a2 = powi(param("a"), 2);
    let at = param("a") * theta();
    let th = [Symbol::var("theta")];
    let printed = DiffOp::from_terms(
        &th,
        [
            (vec![2], int(-1)),
            (
                vec![0],
                a2.clone() * q(&cc_exact) * powi(csc(at.clone()), 2) + a2.clone() * q(&ss_exact) * powi(sec(at.clone()), 2)
                    - a2.clone(),
            ),
        ],
    );
    let printed_match = op_equal(&red, &printed, &tdom, 29)?.equal;

    // fit c₀ = a²(α csc² aθ + β sec² aθ + γ₀) and reconstruct α, β, γ₀
    let c0 = red.coefficient(&[0]);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for t in 0..9 {
        let x = hi * (0.07 + 0.86 * t as f64 / 8.0);
        let mut bt = b.clone();
        bt.set("theta", x);
        let v = c0.eval_complex(&bt)?;
        let (s, c) = ((a * x).sin(), (a * x).cos());
        rows.push(vec![a * a / (s * s), a * a / (c * c), a * a]);
        rhs.push(v.re);
        if v.im.abs() > 1e-9 * v.re.abs().max(1.0) {
            return Err(LieError::UnsupportedShape("reduced potential is not real".into()));
        }
    }
    let (x, res) = least_squares(&rows, &rhs);
    let scale = rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    let rec = |v: f64| reconstruct_rational(v, 1000, 1e-7);
    let (rc, rs, r0) = (rec(x[0]), rec(x[1]), rec(x[2]));
    let kinetic_ok = crate::expr::numerically_equal(&red.coefficient(&[2]), &int(-1), &tdom, 3)?.equal
        && crate::expr::numerically_equal(&red.coefficient(&[1]), &int(0), &tdom, 3)?.equal;
    let minus_one = -BigRational::one();
    let exact_match = kinetic_ok
        && rc.as_ref() == Some(&cc_exact)
        && rs.as_ref() == Some(&ss_exact)
        && r0.as_ref() == Some(&minus_one);

    let half = BigRational::new(1.into(), 2.into());
    let gamma = l - m + &half;
    let delta = l + m + &half;
    let exponent_identity = &gamma * (&gamma - BigRational::one()) == cc_exact
        && &delta * (&delta - BigRational::one()) == ss_exact;

    // physical form with ħ, μ restored
    let hbar2 = powi(param("hbar"), 2);
    let unit = hbar2.clone() * a2.clone() / (int(2) * param("mu"));
    let kk1 = k * (k + BigRational::one());
    let lhs = red
        .left_mul(&(hbar2.clone() / (int(2) * param("mu"))))
        .sub(&DiffOp::multiplication(&th, int(4) * unit.clone() * q(&kk1)));
    let pt = lookup("poschl-teller-trig")?;
    let params: BTreeMap<String, Expr> = [
        ("A".to_string(), unit.clone() * q(&cc_exact)),
        ("B".to_string(), unit.clone() * q(&ss_exact)),
    ]
    .into_iter()
    .collect();
    let kh = k + &half;
    let e_k = int(4) * unit * q(&(&kh * &kh));
    let h = build_schrodinger_op(&pt, &params, &e_k)?;
    let schrodinger_match = op_equal(&lhs, &h, &tdom, 31)?.equal;

    let show = |r: Option<BigRational>| r.map(|v| v.to_string());
    Ok(PtReduction {
        l: l.to_string(),
        m: m.to_string(),
        csc_coupling: show(rc),
        sec_coupling: show(rs),
        constant: show(r0),
        exact_match,
        printed_match,
        exponent_identity,
        schrodinger_match,
        fit_residual: res / scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmReduction {
    /// Reduced Casimir equals `−(cosh² aθ/a)∂² + (l²+m²)cosh² + 2lm sinh cosh`.
    pub printed_casimir_match: bool,
    /// `∂²` coefficient of the reduced Casimir divided by `−cosh² aθ`, at the
    /// check point; `1/a²` where the printed form has `1/a`.
    pub kinetic_factor: f64,
    pub a: f64,
    /// `−(a²ħ²/2μ) sech² aθ · (J² − k(k+1))` equals `−(H − E)`.
    pub equals_minus_h: bool,
    /// Same, compared with `+(H − E)`.
    pub equals_plus_h: bool,
    /// Physical couplings for `V = A tanh aθ − B sech² aθ` and the energy.
    pub coupling_a: f64,
    pub coupling_b: f64,
    pub energy: f64,
}

/// Reduce the `J` Casimir of a Rosen-Morse-frame set on `u(θ) e^{i(lφ − mψ)}`.
pub fn rm_reduction(gens: &GeneratorSet, k: f64, l: f64, m: f64) -> Result<RmReduction, LieError> {
    let b = gens.bindings.clone().with("hbar", 0.9).with("mu", 1.3);
    let a = b.get("a").unwrap_or(1.0);
    let dom = gens.domain().with_bindings(&b);
    let j2 = casimir(gens, Block::J)?;
    let red = reduce_on_ansatz(&j2, &Expr::float(l), &Expr::float(-m), &dom)?;
    let th = [Symbol::var("theta")];
    let at = param("a") * theta();
    let (ch, sh) = (cosh(at.clone()), sinh(at.clone()));
    let tdom = SampleDomain::new().range("theta", -2.0, 2.0).with_bindings(&b);
    let printed = DiffOp::from_terms(
        &th,
        [
            (vec![2], -(powi(ch.clone(), 2) / param("a"))),
            (
                vec![0],
                Expr::float(l * l + m * m) * powi(ch.clone(), 2) + Expr::float(2.0 * l * m) * sh * ch.clone(),
            ),
        ],
    );
    let printed_casimir_match = op_equal(&red, &printed, &tdom, 37)?.equal;
    let mut bt = b.clone();
    bt.set("theta", 0.3);
    let c2 = red.coefficient(&[2]).eval_complex(&bt)?.re;
    let kinetic_factor = -c2 / (a * 0.3).cosh().powi(2);

    let (hbar, mu) = (0.9, 1.3);
    let unit = hbar * hbar * a * a / mu;
    let coupling_a = unit * l * m;
    let coupling_b = 0.5 * unit * k * (k + 1.0);
    let energy = -0.5 * unit * (l * l + m * m);
    let scaled = red
        .sub(&DiffOp::multiplication(&th, Expr::float(k * (k + 1.0))))
        .left_mul(&(-(powi(param("a"), 2) * powi(param("hbar"), 2) / (int(2) * param("mu"))) * powi(sech(at), 2)));
    let rm = lookup("rosen-morse-tanh")?;
    let params: BTreeMap<String, Expr> =
        [("A".to_string(), Expr::float(coupling_a)), ("B".to_string(), Expr::float(coupling_b))]
            .into_iter()
            .collect();
    let h = build_schrodinger_op(&rm, &params, &Expr::float(energy))?;
    let h = crate::xform::pct(&h, &rm.variable, &theta(), &th[0]);
    let loose = tdom.clone().tolerances(1e-9, 1e-8);
    let equals_minus_h = op_equal(&scaled, &h.neg(), &loose, 41)?.equal;
    let equals_plus_h = op_equal(&scaled, &h, &loose, 41)?.equal;
    Ok(RmReduction {
        printed_casimir_match,
        kinetic_factor,
        a,
        equals_minus_h,
        equals_plus_h,
        coupling_a,
        coupling_b,
        energy,
    })
}
