use num_rational::BigRational;

use super::casimir::flattened_euler_casimir;
use super::transform::rm_angle_map;
use super::*;
use crate::diffop::op_equal;
use crate::expr::SampleDomain;
use crate::potentials::{pt_levels, rm_levels, Consts};

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn cartesian_set_is_first_order_with_printed_coefficient() {
    let g = so4_generators_cartesian();
    assert!(g.is_first_order());
    let j1 = g.get("J1").unwrap();
    let want = Expr::i() * rat(-1, 2) * var("x1");
    let d = SampleDomain::new().range("x1", -1.0, 1.0);
    assert!(crate::expr::numerically_equal(&j1.coefficient(&[0, 0, 0, 1]), &want, &d, 0).unwrap().equal);
}

#[test]
fn cartesian_commutators() {
    let rep = verify_commutators(&so4_generators_cartesian(), 1).unwrap();
    assert_eq!(rep.entries.len(), 15);
    assert!(rep.all_pass, "{:#?}", rep.entries.iter().filter(|e| !e.pass).collect::<Vec<_>>());
}

#[test]
fn euler_commutators() {
    let g = so4_generators_euler();
    let rep = verify_commutators(&g, 2).unwrap();
    assert!(rep.all_pass, "{:#?}", rep.entries.iter().filter(|e| !e.pass).collect::<Vec<_>>());
    assert!(g.k_from_j_by_swap().unwrap());
    assert!(g.is_first_order());
}

#[test]
fn euler_printed_coefficients() {
    let g = so4_generators_euler();
    assert_eq!(g.get("J3").unwrap(), &DiffOp::partial(&g.variables, &Symbol::var("psi"), 1).left_mul(&-Expr::i()));
    let want = Expr::i() / (int(2) * param("a")) * sin(var("psi"));
    let c = g.get("J1").unwrap().coefficient(&[1, 0, 0]);
    assert!(crate::expr::numerically_equal(&c, &want, &g.domain(), 0).unwrap().equal);
}

#[test]
fn hbar_convention_scales_the_table() {
    let g = so4_generators_euler().with_hbar();
    assert!(verify_commutators(&g, 3).unwrap().all_pass);
}

#[test]
fn jacobi_identity() {
    assert!(jacobi_check(&so4_generators_euler(), 20, 4).unwrap() < 1e-9);
    assert!(jacobi_check(&so4_generators_cartesian(), 20, 4).unwrap() < 1e-9);
}

#[test]
fn wrong_table_fails() {
    let mut g = so4_generators_euler();
    let j1 = g.generators[0].1.clone();
    g.generators[3].1 = j1;
    assert!(!verify_commutators(&g, 1).unwrap().all_pass);
}

#[test]
fn euler_casimir_matches_printed_after_flattening() {
    let g = so4_generators_euler();
    let flat = flattened_euler_casimir(&g).unwrap();
    let d = g.domain();
    assert!(op_equal(&flat, &euler_casimir_printed(), &d, 5).unwrap().equal);
    let jj = casimir(&g, Block::J).unwrap();
    let kk = casimir(&g, Block::K).unwrap();
    assert!(op_equal(&jj, &kk, &d, 6).unwrap().equal);
}

#[test]
fn cartesian_casimirs_agree_and_act_on_linear_functions() {
    let g = so4_generators_cartesian();
    let jj = casimir(&g, Block::J).unwrap();
    let kk = casimir(&g, Block::K).unwrap();
    let d = g.domain();
    assert!(op_equal(&jj, &kk, &d, 7).unwrap().equal);
    // x1 spans a spin-1/2 ⊗ spin-1/2 state: J² x1 = (3/4) x1
    let got = jj.apply(&var("x1"));
    assert!(crate::expr::numerically_equal(&got, &(rat(3, 4) * var("x1")), &d, 0).unwrap().equal);
}

#[test]
fn reduction_examples() {
    let g = so4_generators_euler();
    let d = g.domain();
    let j3 = g.get("J3").unwrap();
    let red = reduce_on_ansatz(j3, &param("l"), &param("m"), &d.clone().bind("l", 1.0).bind("m", 0.5)).unwrap();
    assert_eq!(red, DiffOp::multiplication(&[Symbol::var("theta")], param("m")));
    let dt = DiffOp::d(&Symbol::var("theta")).lift(&g.variables);
    assert_eq!(reduce_on_ansatz(&dt, &int(1), &int(2), &d).unwrap(), DiffOp::d(&Symbol::var("theta")));
    let jm = g.get("J1").unwrap();
    assert!(matches!(reduce_on_ansatz(jm, &int(1), &int(1), &d), Err(LieError::UnsupportedShape(_))));
}

#[test]
fn pt_reduction_exact() {
    let flat = flattened_euler_casimir(&so4_generators_euler()).unwrap();
    for (l, m) in [(r(1, 1), r(1, 2)), (r(3, 2), r(-1, 2)), (r(2, 1), r(0, 1))] {
        let k = &l + r(1, 1);
        let red = pt_reduction(&flat, &l, &m, &k).unwrap();
        assert!(red.exact_match, "{red:?}");
        assert!(red.printed_match && red.exponent_identity && red.schrodinger_match, "{red:?}");
    }
    assert_eq!(pt_couplings_exact(&r(1, 1), &r(1, 2)), (r(0, 1), r(2, 1)));
}

#[test]
fn transformed_generators_match_printed_pct_form() {
    let euler = so4_generators_euler();
    let pct = transform_generators(&euler, &rm_angle_map(), TransformMode::PctOnly, (-2.0, 2.0), "rm-pct").unwrap();
    let printed = rm_generators_printed();
    let d = printed.domain();
    for n in NAMES {
        assert!(op_equal(pct.get(n).unwrap(), printed.get(n).unwrap(), &d, 8).unwrap().equal, "{n}");
    }
    let full = transform_generators(&euler, &rm_angle_map(), TransformMode::Full, (-2.0, 2.0), "rm").unwrap();
    assert_eq!(full.get("J3").unwrap(), printed.get("J3").unwrap());
    // the similarity adds (i/2) sinh aθ sin ψ to J1
    let extra = full.get("J1").unwrap().sub(pct.get("J1").unwrap());
    let want = DiffOp::multiplication(
        &printed.variables,
        Expr::i() * rat(1, 2) * sinh(param("a") * var("theta")) * sin(var("psi")),
    );
    assert!(op_equal(&extra, &want, &d, 9).unwrap().equal);
    for set in [&pct, &full, &printed] {
        assert!(verify_commutators(set, 10).unwrap().all_pass, "{:?}", set.frame);
        assert!(set.k_from_j_by_swap().unwrap());
    }
}

#[test]
fn transform_rejects_a_fold() {
    let euler = so4_generators_euler();
    let f = powi(var("theta"), 2);
    let r = transform_generators(&euler, &f, TransformMode::Full, (-1.0, 1.0), "bad");
    assert!(matches!(r, Err(LieError::SingularTransform(_))));
}

#[test]
fn rm_casimir_reduction() {
    let printed = rm_generators_printed();
    let (k, l, m) = (2.0, 0.4, 1.0);
    let red = rm_reduction(&printed, k, l, m).unwrap();
    // kinetic factor comes out 1/a², the printed form has 1/a
    assert!(!red.printed_casimir_match);
    assert!((red.kinetic_factor - 1.0 / (red.a * red.a)).abs() < 1e-9);
    assert!(red.equals_minus_h && !red.equals_plus_h);
}

#[test]
fn adjoint_symmetry() {
    let euler = so4_generators_euler();
    assert!(hermiticity_adjoint(&euler, 1).unwrap().is_empty());
    let full = transform_generators(&euler, &rm_angle_map(), TransformMode::Full, (-2.0, 2.0), "rm").unwrap();
    assert!(hermiticity_adjoint(&full, 1).unwrap().is_empty());
    let pct = transform_generators(&euler, &rm_angle_map(), TransformMode::PctOnly, (-2.0, 2.0), "rm-pct").unwrap();
    assert!(hermiticity_adjoint(&pct, 1).unwrap().is_empty());
    // a non-real coefficient breaks it
    let mut bad = euler.clone();
    bad.generators[2].1 = bad.generators[2].1.left_mul(&Expr::i());
    assert_eq!(hermiticity_adjoint(&bad, 1).unwrap().len(), 1);
}

#[test]
fn quadrature_symmetry() {
    let euler = so4_generators_euler();
    let full = transform_generators(&euler, &rm_angle_map(), TransformMode::Full, (-2.0, 2.0), "rm").unwrap();
    let pct = transform_generators(&euler, &rm_angle_map(), TransformMode::PctOnly, (-2.0, 2.0), "rm-pct").unwrap();
    for set in [&euler, &full, &pct] {
        for c in hermiticity_quadrature(set, 12, 24, 3).unwrap() {
            assert!(c.residual < 1e-10, "{c:?}");
        }
    }
    // PCT-only generators are not symmetric under the measure of the full transform
    let mut wrong = pct.clone();
    wrong.measure = full.measure.clone();
    let worst = hermiticity_quadrature(&wrong, 6, 24, 3).unwrap().iter().map(|c| c.residual).fold(0.0, f64::max);
    assert!(worst > 1e-3, "{worst}");
}

#[test]
fn pt_spectrum_from_rep_examples() {
    let c = Consts::default();
    assert_eq!(pt_spectrum_from_rep(2.0, 3.0, 3, &c).unwrap().energies(), vec![12.5, 24.5, 40.5]);
    let edge = pt_spectrum_from_rep(0.4, 0.6, 1, &c).unwrap();
    assert_eq!(edge.entries[0].quantum_numbers["j"], 0.0);
    assert!((edge.energies()[0] - 0.5).abs() < 1e-12);
    let c2 = Consts { hbar: 0.9, mu: 1.3, a: 0.7 };
    for (g, d) in [(2.0, 3.0), (1.5, 2.5), (0.3, 0.2), (3.0, 3.0)] {
        let a = pt_spectrum_from_rep(g, d, 6, &c2).unwrap().energies();
        let b = pt_levels(g, d, 6, &c2).unwrap().energies();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12 * y.abs());
        }
    }
    assert!(pt_spectrum_from_rep(-1.0, 2.0, 1, &c).is_err());
}

#[test]
fn rm_spectrum_from_rep_examples() {
    let c = Consts::default();
    assert_eq!(rm_spectrum_from_rep(0.0, 3.0, &c, 10).unwrap().energies(), vec![-2.0, -0.5]);
    let e = rm_spectrum_from_rep(0.5, 3.0, &c, 10).unwrap().energies();
    assert!((e[0] + 2.03125).abs() < 1e-12 && (e[1] + 0.625).abs() < 1e-12);
    assert!(rm_spectrum_from_rep(2.0, 1.0, &c, 10).is_err());
    let c2 = Consts { hbar: 0.9, mu: 1.3, a: 0.7 };
    for (a, b) in [(0.0, 3.0), (0.5, 3.0), (1.0, 6.0), (-0.7, 4.0)] {
        let x = rm_spectrum_from_rep(a, b, &c2, 10).unwrap().energies();
        let y = rm_levels(a, b, &c2, 10).unwrap().energies();
        assert_eq!(x.len(), y.len());
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-12 * q.abs());
        }
    }
}
