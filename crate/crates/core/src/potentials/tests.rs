use super::*;
use crate::diffop::op_equal;
use crate::expr::SampleDomain;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12 * b.abs().max(1.0)
}

#[test]
fn catalog_has_the_three_written_out_entries() {
    let ids: Vec<String> = catalog().into_iter().map(|s| s.id).collect();
    for id in ["rosen-morse-hyp-source", "poschl-teller-trig", "rosen-morse-tanh", "free", "harmonic-oscillator"] {
        assert!(ids.contains(&id.to_string()), "{id}");
    }
    assert!(lookup("rosen-morse").is_ok());
    assert_eq!(lookup("nope"), Err(PotentialError::NotFound("nope".into())));
}

#[test]
fn hyperbolic_source_operator_is_symbolic() {
    let spec = lookup("rosen-morse-hyp-source").unwrap();
    let op = build_schrodinger_op(&spec, &BTreeMap::new(), &param("E")).unwrap();
    let x = Symbol::var("x");
    assert_eq!(op.coefficient_of(&x, 2), (powi(param("hbar"), 2) / (int(2) * param("mu"))).neg());
    let v = param("A") * powi(csch(param("a") * var("x")), 2)
        + param("B") * coth(param("a") * var("x")) * csch(param("a") * var("x"))
        - param("E");
    assert_eq!(op.coefficient_of(&x, 0), v);
}

#[test]
fn free_particle_at_zero_energy_is_pure_kinetic() {
    let op = build_schrodinger_op(&lookup("free").unwrap(), &BTreeMap::new(), &int(0)).unwrap();
    assert_eq!(op.len(), 1);
    assert_eq!(op.order(), 2);
}

#[test]
fn poschl_teller_operator_with_renamed_couplings() {
    let spec = lookup("poschl-teller-trig").unwrap();
    let params: BTreeMap<String, Expr> =
        [("A".to_string(), param("Ap")), ("B".to_string(), param("Bp"))].into_iter().collect();
    let op = build_schrodinger_op(&spec, &params, &param("Ep")).unwrap();
    let t = Symbol::var("theta");
    let want = param("Ap") * powi(csc(param("a") * var("theta")), 2)
        + param("Bp") * powi(sec(param("a") * var("theta")), 2)
        - param("Ep");
    let d = SampleDomain::new()
        .range("theta", 0.05, 1.5)
        .bind("a", 1.0)
        .bind("Ap", 2.0)
        .bind("Bp", 0.5)
        .bind("Ep", 3.0)
        .bind("hbar", 1.0)
        .bind("mu", 1.0);
    let want_op = crate::diffop::DiffOp::partial(std::slice::from_ref(&t), &t, 2)
        .left_mul(&rat(-1, 2))
        .add(&crate::diffop::DiffOp::multiplication(&[t], want));
    let got = op.substitute_all(
        &[(Symbol::param("hbar"), int(1)), (Symbol::param("mu"), int(1))].into_iter().collect(),
    );
    assert!(op_equal(&got, &want_op, &d, 2).unwrap().equal);
}

#[test]
fn out_of_range_parameter_is_rejected() {
    let spec = lookup("poschl-teller-trig").unwrap();
    let params: BTreeMap<String, Expr> = [("A".to_string(), int(-1))].into_iter().collect();
    assert!(matches!(
        build_schrodinger_op(&spec, &params, &int(0)),
        Err(PotentialError::ParameterOutOfRange { .. })
    ));
}

#[test]
fn poschl_teller_closed_forms() {
    let c = Consts::default();
    let e = pt_levels(2.0, 3.0, 3, &c).unwrap().energies();
    assert_eq!(e, vec![12.5, 24.5, 40.5]);
    let e = pt_levels(1.5, 2.5, 5, &c).unwrap().energies();
    assert_eq!(e, vec![8.0, 18.0, 32.0, 50.0, 72.0]);
    // γ+δ = 1: bottom of the ladder is ħ²a²/2μ
    assert_eq!(pt_levels(0.25, 0.75, 1, &c).unwrap().energies(), vec![0.5]);
    assert!(matches!(pt_levels(0.0, 2.0, 1, &c), Err(PotentialError::InvalidCoupling(_))));
}

#[test]
fn poschl_teller_k_form_agrees() {
    let c = Consts { hbar: 1.3, mu: 0.7, a: 0.9 };
    for g in [0.5, 1.0, 2.0, 3.5] {
        for d in [0.5, 1.5, 3.0] {
            for lv in pt_levels(g, d, 6, &c).unwrap().entries {
                let k = lv.quantum_numbers["k"];
                let kform = 2.0 * c.a * c.a * c.hbar * c.hbar / c.mu * (k + 0.5).powi(2);
                assert!(close(kform, lv.energy));
            }
        }
    }
}

#[test]
fn poschl_teller_from_couplings_round_trips() {
    let c = Consts { hbar: 1.0, mu: 2.0, a: 1.5 };
    for g in [0.6, 1.0, 2.0, 4.25] {
        assert!(close(pt_exponent(pt_coupling_from_exponent(g, &c), &c).unwrap(), g));
    }
}

#[test]
fn rosen_morse_closed_forms() {
    let c = Consts::default();
    assert_eq!(rm_levels(0.0, 3.0, &c, 10).unwrap().energies(), vec![-2.0, -0.5]);
    assert_eq!(rm_levels(0.5, 3.0, &c, 10).unwrap().energies(), vec![-2.03125, -0.625]);
    let e = rm_levels(1.0, 6.0, &c, 10).unwrap().energies();
    assert_eq!(e.len(), 2);
    assert!(close(e[0], -4.5 - 1.0 / 18.0));
    assert!(close(e[1], -2.125));
    // sign of A does not matter
    assert_eq!(rm_levels(-0.5, 3.0, &c, 10).unwrap().energies(), vec![-2.03125, -0.625]);
}

#[test]
fn rosen_morse_bound_rejections() {
    let c = Consts::default();
    assert!(matches!(rm_levels(2.0, 1.0, &c, 5), Err(PotentialError::NoBoundStates(_))));
    assert!(matches!(rm_levels(1.0, 0.0, &c, 5), Err(PotentialError::NoBoundStates(_))));
}

#[test]
fn closed_form_dispatch() {
    let c = Consts::default();
    let pt = lookup("poschl-teller-trig").unwrap();
    let p: BTreeMap<String, f64> = [("gamma".into(), 2.0), ("delta".into(), 3.0)].into_iter().collect();
    assert_eq!(closed_form_spectrum(&pt, &p, &c, 1).unwrap().energies(), vec![12.5]);
    // A = γ(γ−1)/2 = 1, B = 3 in these units
    let p: BTreeMap<String, f64> = [("A".into(), 1.0), ("B".into(), 3.0)].into_iter().collect();
    assert!(close(closed_form_spectrum(&pt, &p, &c, 1).unwrap().energies()[0], 12.5));
    let hyp = lookup("rosen-morse-hyp-source").unwrap();
    assert!(matches!(closed_form_spectrum(&hyp, &p, &c, 1), Err(PotentialError::NoClosedForm(_))));
}
