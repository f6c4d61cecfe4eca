use std::collections::BTreeMap;

use super::*;
use crate::diffop::{op_equal, DiffOp, Measure};
use crate::expr::build::*;
use crate::expr::{numerically_equal, SampleDomain};
use crate::potentials::{build_schrodinger_op, lookup};

fn x() -> Symbol {
    Symbol::var("x")
}
fn th() -> Symbol {
    Symbol::var("theta")
}

fn b() -> Bindings {
    Bindings::new().with("a", 1.3).with("hbar", 0.9).with("mu", 0.7).with("A", 0.5).with("B", 3.0).with("E", -2.5)
}

fn pt_interval() -> Interval {
    Interval::new(int(0), Expr::pi() / (int(2) * param("a")))
}

fn th_dom() -> SampleDomain {
    let hi = std::f64::consts::PI / (2.0 * 1.3);
    SampleDomain::new().range("theta", 0.0, hi).with_bindings(&b()).margin(0.03)
}

fn f_rm() -> Expr {
    param("a").recip() * arctanh(cos(int(2) * param("a") * var("theta")))
}

fn s2a() -> Expr {
    sin(int(2) * param("a") * var("theta"))
}

fn kinetic(v: &Symbol) -> DiffOp {
    DiffOp::partial(std::slice::from_ref(v), v, 2).left_mul(&(powi(param("hbar"), 2) / (int(2) * param("mu"))).neg())
}

#[test]
fn pct_identity_map() {
    let op = kinetic(&x()).add(&DiffOp::multiplication(&[x()], tanh(var("x"))));
    assert_eq!(pct(&op, &x(), &var("x"), &x()), op);
}

#[test]
fn pct_linear_chain_rule() {
    let got = pct(&DiffOp::d(&x()), &x(), &(int(2) * var("theta")), &th());
    assert_eq!(got, DiffOp::d(&th()).scale(&Scalar::rational(1, 2)));
}

#[test]
fn pct_reproduces_the_transformed_kinetic_term() {
    let got = pct(&kinetic(&x()), &x(), &f_rm(), &th());
    let c = cos(int(2) * param("a") * var("theta"));
    let want = DiffOp::partial(&[th()], &th(), 2)
        .left_mul(&(powi(param("hbar"), 2) * powi(s2a(), 2) / (int(8) * param("mu"))).neg())
        .add(&DiffOp::d(&th()).left_mul(
            &(powi(param("hbar"), 2) * param("a") * s2a() * c / (int(4) * param("mu"))).neg(),
        ));
    assert!(op_equal(&got, &want, &th_dom(), 1).unwrap().equal);
}

#[test]
fn pct_round_trip_with_inverse() {
    let op = kinetic(&x()).add(&DiffOp::multiplication(&[x()], param("A") * tanh(param("a") * var("x"))));
    let inv = rat(1, 2) * param("a").recip() * arccos(tanh(param("a") * var("x")));
    let there = pct(&op, &x(), &f_rm(), &th());
    let back = pct(&there, &th(), &inv, &x());
    let d = SampleDomain::new().range("x", -2.0, 2.0).with_bindings(&b());
    assert!(op_equal(&back, &op, &d, 3).unwrap().equal);
}

#[test]
fn pct_rejects_non_monotone_interval() {
    let iv = Interval::new(int(0), Expr::pi() / param("a"));
    let r = pct_checked(&kinetic(&x()), &x(), &f_rm(), &th(), &iv, &b());
    assert!(matches!(r, Err(XformError::SingularTransform(_))));
    assert!(pct_checked(&kinetic(&x()), &x(), &f_rm(), &th(), &pt_interval(), &b()).is_ok());
}

#[test]
fn similarity_by_exponential() {
    let got = similarity(&DiffOp::d(&x()), &exp(var("x")));
    assert_eq!(got, DiffOp::d(&x()).sub(&DiffOp::identity(&[x()])));
    let d = SampleDomain::new().range("x", -1.0, 1.0);
    for f in [sin(var("x")), powi(var("x"), 3), cosh(var("x"))] {
        let want = f.derivative(&x()) - f.clone();
        assert!(numerically_equal(&got.apply(&f), &want, &d, 0).unwrap().equal);
    }
}

#[test]
fn identity_factors_change_nothing() {
    let op = kinetic(&x()).add(&DiffOp::multiplication(&[x()], sech(var("x"))));
    assert_eq!(similarity(&op, &int(1)), op);
    assert_eq!(conjugate(&op, &int(1)), op);
}

#[test]
fn conjugating_a_multiplication() {
    let v = DiffOp::multiplication(&[x()], tanh(var("x")));
    let g = cosh(var("x"));
    let want = DiffOp::multiplication(&[x()], powi(g.clone(), 2) * tanh(var("x")));
    assert_eq!(conjugate(&v, &g), want);
}

#[test]
fn similarity_rejects_a_zero() {
    let iv = Interval::new(int(-1), int(1));
    assert!(matches!(
        similarity_checked(&DiffOp::d(&x()), &var("x"), &x(), &iv, &Bindings::new()),
        Err(XformError::SingularTransform(_))
    ));
}

#[test]
fn measure_rules() {
    let flat = Measure::flat(&x());
    let pct_step = TransformStep::Pct { f: f_rm(), inverse: None };
    let m1 = transform_measure(&flat, &pct_step, &th()).unwrap();
    let want = int(-2) / s2a();
    assert!(numerically_equal(&m1.weight(), &want, &th_dom(), 0).unwrap().equal);

    let sim = TransformStep::Similarity { g: powr(s2a(), -1, 2) };
    let m2 = transform_measure(&m1, &sim, &th()).unwrap();
    assert!(numerically_equal(&m2.weight(), &int(-2), &th_dom(), 0).unwrap().equal);

    let conj = TransformStep::Conjugation { g: s2a().recip(), solve_constant: false };
    assert_eq!(transform_measure(&m2, &conj, &th()).unwrap(), m2);

    let r = TransformStep::Rescale { c: powr(int(2), 1, 2) };
    let m3 = transform_measure(&m2, &r, &th()).unwrap();
    assert_eq!(m3.constant, Scalar::rational(1, 2));
    assert!(numerically_equal(&m3.weight(), &int(-1), &th_dom(), 0).unwrap().equal);
}

#[test]
fn kinetic_constant() {
    let iv = Interval::new(int(0), int(1));
    let bb = Bindings::new().with("hbar", 1.0).with("mu", 2.0);
    assert_eq!(solve_kinetic_constant(&kinetic(&x()), &int(1), &x(), &iv, &bb).unwrap(), Scalar::one());
    let scaled = kinetic(&x()).scale(&Scalar::rational(1, 9));
    assert_eq!(solve_kinetic_constant(&scaled, &int(1), &x(), &iv, &bb).unwrap(), Scalar::int(9));
    assert!(matches!(
        solve_kinetic_constant(&DiffOp::d(&x()), &int(1), &x(), &iv, &bb),
        Err(XformError::NotProportional(_))
    ));
    let varying = kinetic(&x()).left_mul(&exp(var("x")));
    assert!(matches!(
        solve_kinetic_constant(&varying, &int(1), &x(), &iv, &bb),
        Err(XformError::NotProportional(_))
    ));
}

#[test]
fn matching_recovers_known_parameters() {
    let pt = lookup("poschl-teller-trig").unwrap();
    let params: BTreeMap<String, Expr> =
        [("A".into(), rat(7, 4)), ("B".into(), rat(3, 2))].into_iter().collect();
    let op = build_schrodinger_op(&pt, &params, &rat(11, 2)).unwrap();
    let couplings = vec!["A".to_string(), "B".to_string()];
    let fit = match_parameters(&op, &pt, &couplings, &b()).unwrap();
    assert!((fit.values["A"] - 1.75).abs() < 1e-12);
    assert!((fit.values["B"] - 1.5).abs() < 1e-12);
    assert!((fit.values["E"] - 5.5).abs() < 1e-12);
    assert!(fit.residual < 1e-14);
    assert_eq!(fit.points, 7);
}

#[test]
fn matching_rejects_a_foreign_basis() {
    let pt = lookup("poschl-teller-trig").unwrap();
    let op = kinetic(&th()).add(&DiffOp::multiplication(&[th()], tanh(var("theta"))));
    let couplings = vec!["A".to_string(), "B".to_string()];
    assert!(matches!(match_parameters(&op, &pt, &couplings, &b()), Err(XformError::NoMatch { .. })));
}

#[test]
fn empty_plan_is_the_identity() {
    let plan = TransformPlan::empty("rosen-morse-tanh", "x");
    let s0 = build_schrodinger_op(&lookup("rosen-morse-tanh").unwrap(), &BTreeMap::new(), &param("E")).unwrap();
    let r = run_pipeline(&s0, &plan).unwrap();
    assert_eq!(r.operator, s0);
    assert_eq!(r.relation, PropagatorRelation::identity("rosen-morse-tanh", &x()));
}

fn flag<'a>(r: &'a PipelineResult, component: &str) -> &'a Flag {
    r.flags.iter().find(|f| f.component == component).unwrap_or_else(|| panic!("no flag {component}"))
}

#[test]
fn rm_to_pt_plan() {
    let plan = builtin_plan("builtin:rm-to-pt").unwrap();
    let s0 = build_schrodinger_op(&lookup(&plan.source).unwrap(), &BTreeMap::new(), &param("E")).unwrap();
    let r = run_pipeline(&s0, &plan).unwrap();
    assert_eq!(r.relation.overall_constant, Scalar::rational(1, 2));
    assert_eq!(r.steps[2].solved_constant.as_deref(), Some("4"));
    for c in ["S1", "prefactor", "overall-constant", "parameter:A", "parameter:B", "parameter:E"] {
        assert_eq!(flag(&r, c).status, FlagStatus::Match, "{c}: {:?}", flag(&r, c));
    }
    for c in ["S2", "S3", "S3:constant"] {
        assert_eq!(flag(&r, c).status, FlagStatus::Mismatch, "{c}");
    }
    let fit = r.fit.unwrap();
    assert!(fit.residual < 1e-10);
    // argument map θ(x) = (1/2a) arccos tanh ax
    let d = SampleDomain::new().range("x", -2.0, 2.0).with_bindings(&b());
    let want = rat(1, 2) / param("a") * arccos(tanh(param("a") * var("x")));
    assert!(numerically_equal(&r.relation.argument_map, &want, &d, 0).unwrap().equal);
}

#[test]
fn hyperbolic_source_does_not_reach_poschl_teller() {
    let plan = builtin_plan("rm-to-pt").unwrap();
    let s0 = build_schrodinger_op(&lookup("rosen-morse-hyp-source").unwrap(), &BTreeMap::new(), &param("E"))
        .unwrap();
    let report = run_pipeline_report(&s0, &plan).unwrap();
    assert_eq!(flag(&report, "S1").status, FlagStatus::Mismatch);
    assert!(matches!(report.match_error, Some(XformError::NoMatch { .. })));
    assert!(matches!(run_pipeline(&s0, &plan), Err(XformError::NoMatch { .. })));
}
