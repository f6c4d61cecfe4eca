use std::collections::BTreeMap;

use num_rational::BigRational;
use serde_json::json;
use specmorph_core::expr::build::{exp, int, param, powi, rat, var};
use specmorph_core::liealg::{
    euler_casimir_printed, flattened_euler_casimir, hermiticity_quadrature, pt_reduction, rm_angle_map,
    rm_generators_printed, rm_reduction, so4_generators_cartesian, so4_generators_euler, transform_generators,
    verify_commutators, GeneratorSet, TransformMode,
};
use specmorph_core::numeric::{
    fd_spectrum, map_wavefunction, measure_chain, verify_propagator_relation, Grid, InterpKind, PropagatorCheck,
};
use specmorph_core::potentials::{lookup, Consts};
use specmorph_core::xform::{builtin_plan, PipelineResult};

use crate::args::{FrameArg, Suite, VerifyArgs};
use crate::output::{exit, CliError, Output};
use crate::transform::run_plan;

pub const COMMUTATOR_TOL: f64 = 1e-10;
pub const HERMITICITY_TOL: f64 = 1e-5;
pub const MAPPING_RESIDUAL_TOL: f64 = 1e-3;
pub const ORTHONORMALITY_TOL: f64 = 1e-6;
pub const PROPAGATOR_TOL: f64 = 0.05;
pub const MEASURE_TOL: f64 = 1e-6;

/// Point pairs `(x0, xf)` for the propagator suite.
pub const POINT_PAIRS: [(f64, f64); 5] = [(-1.0, 0.5), (0.3, 1.2), (-2.0, -0.7), (0.0, 2.0), (1.5, -1.5)];

fn verdict(pass: bool, json: serde_json::Value, human: String) -> Output {
    let out = Output::ok(json, human);
    if pass {
        out
    } else {
        out.with_code(exit::VERIFICATION)
    }
}

pub fn generators(frame: FrameArg) -> Result<GeneratorSet, CliError> {
    Ok(match frame {
        FrameArg::Cartesian => so4_generators_cartesian(),
        FrameArg::Euler => so4_generators_euler(),
        FrameArg::Rm => transform_generators(&so4_generators_euler(), &rm_angle_map(), TransformMode::Full, (-2.0, 2.0), "rosen-morse")?,
        FrameArg::RmPct => rm_generators_printed(),
    })
}

fn pair_plan(pair: &str) -> Result<PipelineResult, CliError> {
    if pair != "rm-to-pt" {
        return Err(CliError::new(exit::NOT_FOUND, "not-found", format!("no transformation pair `{pair}`")));
    }
    let args = crate::args::TransformArgs { from: None, plan: "builtin:rm-to-pt".into() };
    Ok(run_plan(&args)?.1)
}

fn source_params(a: &VerifyArgs, defaults: &[(&str, f64)]) -> BTreeMap<String, f64> {
    let mut p: BTreeMap<String, f64> = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    p.extend(a.params.iter().cloned());
    p
}

fn source_grid(a: &VerifyArgs, var: &str, default: (f64, f64, usize)) -> Result<Grid, CliError> {
    let (lo, hi, n) = a.source_grid.unwrap_or(default);
    Ok(Grid::new(var, lo, hi, n)?)
}

fn commutators(a: &VerifyArgs, seed: u64) -> Result<Output, CliError> {
    let g = generators(a.frame)?;
    let rep = verify_commutators(&g, seed)?;
    let passed = rep.entries.iter().filter(|e| e.pass).count();
    let mut h = format!("commutators [{:?}]: {passed}/{} pass (coefficient tol {COMMUTATOR_TOL:e})\n", a.frame, rep.entries.len());
    for e in &rep.entries {
        h.push_str(&format!(
            "  [{}, {}] = {:<10} residual {:.2e} {}\n",
            e.left,
            e.right,
            e.expected,
            e.max_residual,
            if e.pass { "ok" } else { "FAIL" }
        ));
    }
    let json = json!({ "suite": "commutators", "frame": format!("{:?}", a.frame), "tolerance": COMMUTATOR_TOL, "passed": passed, "pass": rep.all_pass, "report": rep });
    Ok(verdict(rep.all_pass, json, h))
}

/// Half-integer grid `start + k/2`, `k < count`.
fn halves(start2: i64, count: i64) -> Vec<BigRational> {
    (0..count).map(|k| BigRational::new((start2 + k).into(), 2.into())).collect()
}

pub fn casimir_grid() -> (Vec<BigRational>, Vec<BigRational>) {
    (halves(0, 10), halves(-4, 10))
}

fn casimir(_a: &VerifyArgs, seed: u64) -> Result<Output, CliError> {
    let euler = so4_generators_euler();
    let flat = flattened_euler_casimir(&euler)?;
    let flat_ok = specmorph_core::diffop::op_equal(&flat, &euler_casimir_printed(), &euler.domain(), seed)
        .map_err(|e| CliError::new(exit::VERIFICATION, "algebra", e.to_string()))?
        .equal;
    let (ls, ms) = casimir_grid();
    let mut rows = Vec::new();
    let mut all = true;
    for l in &ls {
        for m in ms.iter() {
            let r = pt_reduction(&flat, l, m, l)?;
            all &= r.exact_match && r.printed_match && r.exponent_identity && r.schrodinger_match;
            rows.push(r);
        }
    }
    let rm = rm_reduction(&rm_generators_printed(), 2.0, 0.4, 1.0)?;
    let pass = flat_ok && all;
    let bad = rows.iter().filter(|r| !(r.exact_match && r.exponent_identity)).count();
    let h = format!(
        "casimir: flattened Euler form matches printed 4a²J²: {flat_ok}\n  Pöschl-Teller reduction on {}×{} (l, m) grid: {} exact, {bad} failing\n  Rosen-Morse reduction: kinetic factor {:.6} (1/a² = {:.6}); printed form matches: {}; equals −(H−E): {}\n",
        ls.len(),
        ms.len(),
        rows.len() - bad,
        rm.kinetic_factor,
        1.0 / (rm.a * rm.a),
        rm.printed_casimir_match,
        rm.equals_minus_h,
    );
    let json = json!({
        "suite": "casimir",
        "flattened_matches_printed": flat_ok,
        "pt_reductions": rows,
        "rm_reduction": rm,
        "pass": pass,
    });
    Ok(verdict(pass, json, h))
}

fn hermiticity(a: &VerifyArgs, seed: u64) -> Result<Output, CliError> {
    let g = generators(a.frame)?;
    let tol = a.tol.unwrap_or(HERMITICITY_TOL);
    let checks = hermiticity_quadrature(&g, a.pairs, 24, seed)?;
    let worst = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    let pass = worst < tol;
    let h = format!("hermiticity [{:?}]: {} pairs, worst residual {worst:.2e} (tol {tol:e})\n", a.frame, checks.len());
    let json = json!({ "suite": "hermiticity", "frame": format!("{:?}", a.frame), "tolerance": tol, "quadrature_points": 24, "checks": checks, "max_residual": worst, "pass": pass });
    Ok(verdict(pass, json, h))
}

fn mapping(a: &VerifyArgs, _seed: u64) -> Result<Output, CliError> {
    let r = pair_plan(&a.pair)?;
    let c = Consts::default();
    let params = source_params(a, &[("A", 1.0), ("B", 6.0)]);
    let source = lookup(&r.relation.source)?;
    let target = lookup(&r.relation.target)?;
    let sg = source_grid(a, source.variable.name(), (-12.0, 12.0, 8000))?;
    let tg = Grid::for_spec(&target, &c, a.target_n.unwrap_or(800), 0.0)?;
    let (spec, pairs) = fd_spectrum(&source, &params, &c, &sg, 2)?;
    let bound: Vec<usize> = spec.entries.iter().enumerate().filter(|(_, l)| l.flag.is_none()).map(|(i, _)| i).collect();
    if bound.is_empty() {
        return Err(CliError::new(exit::NO_BOUND_STATES, "no-bound-states", "source has no bound FD state"));
    }
    let b = specmorph_core::numeric::grid::bindings(&params, &c);
    let rep = map_wavefunction(&pairs, &bound, &r.relation, &r.operator, "E", &b, &tg, InterpKind::NaturalSpline)?;
    let tol = a.tol.unwrap_or(MAPPING_RESIDUAL_TOL);
    let pass = rep.max_residual < tol && rep.max_orthonormality_error < ORTHONORMALITY_TOL;
    let mut h = format!("mapping {}: source grid n={} on [{}, {}], target n={}\n", a.pair, sg.n, sg.lo, sg.hi, tg.n);
    for s in &rep.states {
        h.push_str(&format!("  state {} E={:.10} residual {:.2e}\n", s.index, s.energy, s.residual));
    }
    h.push_str(&format!(
        "  max residual {:.2e} (tol {tol:e}); orthonormality error {:.2e} (tol {ORTHONORMALITY_TOL:e})\n",
        rep.max_residual, rep.max_orthonormality_error
    ));
    let json = json!({
        "suite": "mapping",
        "pair": a.pair,
        "params": params,
        "source_grid": sg,
        "report": rep,
        "tolerances": { "residual": tol, "orthonormality": ORTHONORMALITY_TOL },
        "pass": pass,
    });
    Ok(verdict(pass, json, h))
}

fn propagator(a: &VerifyArgs, _seed: u64) -> Result<Output, CliError> {
    let r = pair_plan(&a.pair)?;
    let c = Consts::default();
    let params = source_params(a, &[("A", 0.5), ("B", 3.0)]);
    let source = lookup(&r.relation.source)?;
    let target = lookup(&r.relation.target)?;
    let sg = source_grid(a, source.variable.name(), (-12.0, 12.0, 8000))?;
    let tg = Grid::for_spec(&target, &c, a.target_n.unwrap_or(4000), 0.0)?;
    let energies = if a.energies.is_empty() { vec![-2.5, -3.0, -4.0] } else { a.energies.clone() };
    let tol = a.tol.unwrap_or(PROPAGATOR_TOL);
    let check = PropagatorCheck {
        rel: &r.relation,
        params: &params,
        energy: "E",
        consts: c,
        energies: &energies,
        points: &POINT_PAIRS,
        source_grid: &sg,
        target_grid: &tg,
        eps: 1e-6 * c.energy_unit(),
        tolerance: tol,
        corrupt_prefactor: a.corrupt_prefactor,
    };
    let rep = verify_propagator_relation(&check)?;
    let h = format!(
        "propagator {}{}: {} energies in [{}, {}]{}, {} point pairs, max rel. deviation {:.3e} (tol {tol}) {}\n",
        a.pair,
        if a.corrupt_prefactor { " with h → 1" } else { "" },
        energies.len(),
        rep.energy_range[0],
        rep.energy_range[1],
        if rep.below_source_ground_state { " (below the source ground state)" } else { "" },
        POINT_PAIRS.len(),
        rep.max_deviation,
        if rep.pass { "pass" } else { "FAIL" },
    );
    let json = json!({ "suite": "propagator", "pair": a.pair, "params": params, "report": rep, "pass": rep.pass });
    Ok(verdict(rep.pass, json, h))
}

/// Test state `e^{−(ax)²}(1 + 3x/10)` pushed through the plan.
fn measure(a: &VerifyArgs, _seed: u64) -> Result<Output, CliError> {
    if a.pair != "rm-to-pt" {
        return Err(CliError::new(exit::NOT_FOUND, "not-found", format!("no transformation pair `{}`", a.pair)));
    }
    let plan = builtin_plan("rm-to-pt")?;
    let b = Consts { hbar: 1.0, mu: 1.0, a: 1.3 }.bindings();
    let psi = exp(powi(param("a") * var("x"), 2).neg()) * (int(1) + rat(3, 10) * var("x"));
    let rep = measure_chain(&plan, &psi, (-10.0, 10.0), &b, 400)?;
    let tol = a.tol.unwrap_or(MEASURE_TOL);
    let pass = rep.max_rel_err < tol;
    let mut h = format!("measure chain {} with ψ = {} (source norm {:.12})\n", a.pair, rep.test_function, rep.source_norm);
    for s in &rep.steps {
        h.push_str(&format!("  after step {} {:<11} norm {:.12} rel_err {:.2e}\n", s.index, s.kind, s.norm, s.rel_err));
    }
    let json = json!({ "suite": "measure", "pair": a.pair, "report": rep, "tolerance": tol, "pass": pass });
    Ok(verdict(pass, json, h))
}

pub fn run(a: &VerifyArgs, seed: u64) -> Result<Output, CliError> {
    match a.what {
        Suite::Commutators => commutators(a, seed),
        Suite::Casimir => casimir(a, seed),
        Suite::Hermiticity => hermiticity(a, seed),
        Suite::Mapping => mapping(a, seed),
        Suite::Propagator => propagator(a, seed),
        Suite::Measure => measure(a, seed),
    }
}
