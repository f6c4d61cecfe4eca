//! One line per acceptance criterion; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use specmorph_core::diffop::op_equal;
use specmorph_core::expr::build::{exp, int, param, powi, rat, var};
use specmorph_core::expr::{Bindings, SampleDomain};
use specmorph_core::liealg::{
    euler_casimir_printed, flattened_euler_casimir, hermiticity_quadrature, pt_reduction, rm_angle_map,
    rm_generators_printed, rm_spectrum_from_rep, so4_generators_cartesian, so4_generators_euler,
    transform_generators, verify_commutators, GeneratorSet, TransformMode,
};
use specmorph_core::numeric::grid::bindings;
use specmorph_core::numeric::{
    fd_spectrum, map_wavefunction, measure_chain, verify_propagator_relation, Grid, InterpKind, PropagatorCheck,
};
use specmorph_core::potentials::{
    build_schrodinger_op, lookup, pt_coupling_from_exponent, pt_levels, rm_levels, Consts, PotentialError,
};
use specmorph_core::xform::{builtin_plan, run_pipeline_report, FlagStatus, PipelineResult};

type Outcome = Result<(bool, String), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

const UNIT: Consts = Consts { hbar: 1.0, mu: 1.0, a: 1.0 };

fn c1_commutators() -> Outcome {
    let frames: Vec<(&str, GeneratorSet)> = vec![
        ("cartesian", so4_generators_cartesian()),
        ("euler", so4_generators_euler()),
        (
            "rosen-morse",
            transform_generators(&so4_generators_euler(), &rm_angle_map(), TransformMode::Full, (-2.0, 2.0), "rosen-morse")
                .map_err(err)?,
        ),
        ("rosen-morse printed", rm_generators_printed()),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, g) in &frames {
        let r = verify_commutators(g, 7).map_err(err)?;
        let worst = r.entries.iter().map(|e| e.max_residual).fold(0.0, f64::max);
        let passed = r.entries.iter().filter(|e| e.pass).count();
        ok &= r.all_pass && r.entries.len() == 15 && worst < 1e-10;
        parts.push(format!("{name} {passed}/{} (max {worst:.1e})", r.entries.len()));
    }
    Ok((ok, parts.join(", ")))
}

fn halves(start2: i64) -> Vec<BigRational> {
    (0..10).map(|k| BigRational::new((start2 + k).into(), 2.into())).collect()
}

fn c2_casimir() -> Outcome {
    let euler = so4_generators_euler();
    let flat = flattened_euler_casimir(&euler).map_err(err)?;
    let printed = op_equal(&flat, &euler_casimir_printed(), &euler.domain(), 7).map_err(err)?.equal;
    let mut exact = 0;
    let mut total = 0;
    for l in &halves(0) {
        for m in &halves(-4) {
            let r = pt_reduction(&flat, l, m, l).map_err(err)?;
            total += 1;
            if r.exact_match && r.printed_match && r.exponent_identity && r.schrodinger_match {
                exact += 1;
            }
        }
    }
    Ok((printed && exact == total, format!("4a²J² flattening matches: {printed}; (l, m) grid {exact}/{total} exact")))
}

fn c3_poschl_teller() -> Outcome {
    let spec = lookup("poschl-teller-trig").map_err(err)?;
    let grid = Grid::for_spec(&spec, &UNIT, 4000, 0.0).map_err(err)?;
    let mut worst: f64 = 0.0;
    for (g, d) in [(2.0, 3.0), (1.5, 2.5), (3.0, 3.0)] {
        let exact = pt_levels(g, d, 5, &UNIT).map_err(err)?.energies();
        let p = BTreeMap::from([
            ("A".to_string(), pt_coupling_from_exponent(g, &UNIT)),
            ("B".to_string(), pt_coupling_from_exponent(d, &UNIT)),
        ]);
        let (fd, _) = fd_spectrum(&spec, &p, &UNIT, &grid, 5).map_err(err)?;
        for (a, b) in fd.energies().iter().zip(&exact) {
            worst = worst.max(rel(*a, *b));
        }
    }
    Ok((worst <= 1e-3, format!("3 exponent pairs × 5 levels, n = {}, max rel. err {worst:.2e}", grid.n)))
}

fn c4_rosen_morse() -> Outcome {
    let spec = lookup("rosen-morse-tanh").map_err(err)?;
    let grid = Grid::for_spec(&spec, &UNIT, 4000, 16.0).map_err(err)?;
    let mut worst: f64 = 0.0;
    let mut levels = 0;
    for (a, b) in [(0.0, 3.0), (0.5, 3.0), (1.0, 6.0)] {
        let exact = rm_levels(a, b, &UNIT, 50).map_err(err)?.energies();
        let p = BTreeMap::from([("A".to_string(), a), ("B".to_string(), b)]);
        let (fd, _) = fd_spectrum(&spec, &p, &UNIT, &grid, exact.len()).map_err(err)?;
        if fd.entries.iter().any(|l| l.flag.is_some()) {
            return Ok((false, format!("(A, B) = ({a}, {b}): an FD level is flagged as continuum")));
        }
        for (x, y) in fd.energies().iter().zip(&exact) {
            worst = worst.max(rel(*x, *y));
        }
        levels += exact.len();
    }
    // A = 2, B = 1 lies outside the existence bound
    let rejected = matches!(rm_spectrum_from_rep(2.0, 1.0, &UNIT, 5), Err(PotentialError::NoBoundStates(_)))
        && matches!(rm_levels(2.0, 1.0, &UNIT, 5), Err(PotentialError::NoBoundStates(_)));
    let p = BTreeMap::from([("A".to_string(), 2.0), ("B".to_string(), 1.0)]);
    let (fd, _) = fd_spectrum(&spec, &p, &UNIT, &grid, 3).map_err(err)?;
    let lowest = fd.entries[0].energy;
    let none_below = fd.entries.iter().all(|l| l.flag.is_some() || l.energy >= -2.0 - 1e-3);
    Ok((
        worst <= 1e-3 && rejected && none_below,
        format!(
            "{levels} bound levels, max rel. err {worst:.2e}; (A, B) = (2, 1) rejected: {rejected}, FD lowest {lowest:.4} vs threshold -2 ({})",
            if none_below { "no bound state" } else { "BOUND STATE FOUND" }
        ),
    ))
}

fn rm_pipeline() -> Result<PipelineResult, String> {
    let plan = builtin_plan("builtin:rm-to-pt").map_err(err)?;
    let s0 = build_schrodinger_op(&lookup(&plan.source).map_err(err)?, &BTreeMap::new(), &plan.energy).map_err(err)?;
    run_pipeline_report(&s0, &plan).map_err(err)
}

fn c5_pipeline() -> Outcome {
    let r = rm_pipeline()?;
    let status = |c: &str| r.flags.iter().find(|f| f.component == c).map(|f| f.status);
    // Ŝ₃ against the target operator with A′, B′, E′ substituted, at several parameter points
    let plan = builtin_plan("rm-to-pt").map_err(err)?;
    let target = lookup(plan.target.as_deref().unwrap_or_default()).map_err(err)?;
    let mut map = plan.parameter_map.clone();
    let e_t = map.remove(&plan.energy.to_string()).ok_or("plan maps no energy")?;
    let want = build_schrodinger_op(&target, &map, &e_t).map_err(err)?;
    let mut same = true;
    for (k, (a, b, e, h, mu, s)) in
        [(0.5, 3.0, -2.5, 1.0, 1.0, 1.0), (1.7, 4.2, -6.1, 0.9, 0.7, 1.3), (-0.4, 2.5, -1.2, 1.1, 1.6, 0.8)].into_iter().enumerate()
    {
        let mut bnd = Bindings::new();
        for (n, v) in [("A", a), ("B", b), ("E", e), ("hbar", h), ("mu", mu), ("a", s)] {
            bnd.set(n, v);
        }
        let hi = std::f64::consts::PI / (2.0 * s);
        let d = SampleDomain::new().range("theta", 0.0, hi).with_bindings(&bnd).margin(0.05);
        same &= op_equal(&r.operator, &want, &d, k as u64).map_err(err)?.equal;
    }
    let matched = ["parameter:A", "parameter:B", "parameter:E", "prefactor", "overall-constant"]
        .iter()
        .all(|c| status(c) == Some(FlagStatus::Match));
    let flagged: Vec<&str> = r.mismatches().map(|f| f.component.as_str()).collect();
    let half = r.relation.overall_constant.to_string() == "(rat 1 2)";
    let discrepancies = ["S2", "S3", "S3:constant"].iter().all(|c| flagged.contains(c));
    Ok((
        same && matched && half && discrepancies && r.match_error.is_none(),
        format!(
            "Ŝ₃ equals the Pöschl-Teller form with A′, B′, E′: {same}; prefactor 2cosh^½ per end, constant ½: {}; flagged: {}",
            matched && half,
            flagged.join(", ")
        ),
    ))
}

fn c6_mapping() -> Outcome {
    let r = rm_pipeline()?;
    let p = BTreeMap::from([("A".to_string(), 1.0), ("B".to_string(), 6.0)]);
    let source = lookup(&r.relation.source).map_err(err)?;
    let target = lookup(&r.relation.target).map_err(err)?;
    let sg = Grid::new("x", -12.0, 12.0, 8000).map_err(err)?;
    let tg = Grid::for_spec(&target, &UNIT, 800, 0.0).map_err(err)?;
    let (spec, pairs) = fd_spectrum(&source, &p, &UNIT, &sg, 2).map_err(err)?;
    let bound: Vec<usize> = (0..spec.entries.len()).filter(|&i| spec.entries[i].flag.is_none()).collect();
    let rep = map_wavefunction(&pairs, &bound, &r.relation, &r.operator, "E", &bindings(&p, &UNIT), &tg, InterpKind::NaturalSpline)
        .map_err(err)?;
    Ok((
        !bound.is_empty() && bound[0] == 0 && rep.max_residual < 1e-3 && rep.max_orthonormality_error < 1e-6,
        format!(
            "{} states incl. ground state, max residual {:.2e}, orthonormality error {:.2e}",
            rep.states.len(),
            rep.max_residual,
            rep.max_orthonormality_error
        ),
    ))
}

fn c7_propagator() -> Outcome {
    let r = rm_pipeline()?;
    let p = BTreeMap::from([("A".to_string(), 0.5), ("B".to_string(), 3.0)]);
    let target = lookup(&r.relation.target).map_err(err)?;
    let sg = Grid::new("x", -12.0, 12.0, 8000).map_err(err)?;
    let tg = Grid::for_spec(&target, &UNIT, 4000, 0.0).map_err(err)?;
    let points = [(-1.0, 0.5), (0.3, 1.2), (-2.0, -0.7), (0.0, 2.0), (1.5, -1.5)];
    let energies = [-2.5, -3.0, -4.0];
    let run = |corrupt| {
        verify_propagator_relation(&PropagatorCheck {
            rel: &r.relation,
            params: &p,
            energy: "E",
            consts: UNIT,
            energies: &energies,
            points: &points,
            source_grid: &sg,
            target_grid: &tg,
            eps: 1e-6,
            tolerance: 0.05,
            corrupt_prefactor: corrupt,
        })
        .map_err(err)
    };
    let good = run(false)?;
    let bad = run(true)?;
    Ok((
        good.pass && !bad.pass,
        format!(
            "{} energies × {} pairs, max rel. dev {:.2e}; with h → 1 {:.2e} ({})",
            energies.len(),
            points.len(),
            good.max_deviation,
            bad.max_deviation,
            if bad.pass { "control passed" } else { "control fails" }
        ),
    ))
}

fn c8_measure() -> Outcome {
    let plan = builtin_plan("rm-to-pt").map_err(err)?;
    let b = Consts { hbar: 1.0, mu: 1.0, a: 1.3 }.bindings();
    let psi = exp(powi(param("a") * var("x"), 2).neg()) * (int(1) + rat(3, 10) * var("x"));
    let rep = measure_chain(&plan, &psi, (-10.0, 10.0), &b, 400).map_err(err)?;
    let similarity = rep.steps.iter().filter(|s| s.kind == "similarity").count();
    Ok((
        similarity > 0 && rep.max_rel_err < 1e-6,
        format!("{} steps ({similarity} similarity), max rel. err {:.2e}", rep.steps.len(), rep.max_rel_err),
    ))
}

fn c9_hermiticity() -> Outcome {
    let g = transform_generators(&so4_generators_euler(), &rm_angle_map(), TransformMode::Full, (-2.0, 2.0), "rosen-morse")
        .map_err(err)?;
    let checks = hermiticity_quadrature(&g, 12, 24, 7).map_err(err)?;
    let worst = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    Ok((checks.len() >= 10 && worst < 1e-5, format!("{} pairs, worst residual {worst:.2e}", checks.len())))
}

fn main() {
    let criteria: [(u32, &str, f64, fn() -> Outcome); 9] = [
        (1, "structure constants", 10.0, c1_commutators),
        (2, "casimir reduction", f64::INFINITY, c2_casimir),
        (3, "poschl-teller spectrum", 30.0, c3_poschl_teller),
        (4, "rosen-morse spectrum", f64::INFINITY, c4_rosen_morse),
        (5, "pipeline reproduction", f64::INFINITY, c5_pipeline),
        (6, "eigenfunction mapping", f64::INFINITY, c6_mapping),
        (7, "propagator relation", 60.0, c7_propagator),
        (8, "measure bookkeeping", f64::INFINITY, c8_measure),
        (9, "hermiticity", f64::INFINITY, c9_hermiticity),
    ];
    let mut failed = 0;
    for (n, name, budget, f) in criteria {
        let t = Instant::now();
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        let secs = t.elapsed().as_secs_f64();
        let ok = ok && secs < budget;
        let limit = if budget.is_finite() { format!(", limit {budget} s") } else { String::new() };
        println!("criterion {n} {}: {name}: {detail} [{secs:.2} s{limit}]", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
