use proptest::prelude::*;
use specmorph_core::diffop::{op_equal, DiffOp, Measure};
use specmorph_core::expr::build::*;
use specmorph_core::expr::{numerically_equal, Bindings, Expr, SampleDomain, Symbol};

fn x() -> Symbol {
    Symbol::var("x")
}

fn dom() -> SampleDomain {
    SampleDomain::new().range("x", 0.3, 1.2).samples(12)
}

/// Smooth, nonvanishing-free building blocks on [0.3, 1.2].
fn atom() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-3i64..=3).prop_map(int),
        Just(var("x")),
        Just(sin(var("x"))),
        Just(exp(var("x") * rat(1, 2))),
        Just(cosh(var("x"))),
        Just(powi(var("x"), 2)),
        Just(log(var("x") + int(1))),
    ]
}

fn coeff() -> impl Strategy<Value = Expr> {
    (atom(), atom(), -2i64..=2).prop_map(|(a, b, k)| a * b + int(k))
}

fn first_order() -> impl Strategy<Value = DiffOp> {
    (coeff(), coeff()).prop_map(|(c1, c0)| {
        DiffOp::d(&x()).left_mul(&c1).add(&DiffOp::multiplication(&[x()], c0))
    })
}

fn second_order() -> impl Strategy<Value = DiffOp> {
    (coeff(), first_order())
        .prop_map(|(c2, rest)| DiffOp::partial(&[x()], &x(), 2).left_mul(&c2).add(&rest))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn compose_agrees_with_sequential_apply(a in second_order(), b in first_order(), f in coeff()) {
        let lhs = a.compose(&b).apply(&f);
        let rhs = a.apply(&b.apply(&f));
        prop_assert!(numerically_equal(&lhs, &rhs, &dom(), 7).unwrap().equal);
    }

    #[test]
    fn commutator_is_antisymmetric(a in first_order(), b in first_order()) {
        let s = a.commutator(&b).add(&b.commutator(&a));
        prop_assert!(op_equal(&s, &DiffOp::zero(&[x()]), &dom(), 3).unwrap().equal);
    }

    #[test]
    fn jacobi_identity(a in first_order(), b in first_order(), c in first_order()) {
        let j = a.commutator(&b.commutator(&c))
            .add(&b.commutator(&c.commutator(&a)))
            .add(&c.commutator(&a.commutator(&b)));
        prop_assert!(op_equal(&j, &DiffOp::zero(&[x()]), &dom(), 11).unwrap().equal);
    }

    #[test]
    fn adjoint_is_an_involution(a in second_order(), w in atom()) {
        let mu = Measure::new(&x(), powi(w, 2) + int(1));
        let back = a.adjoint(&mu).unwrap().adjoint(&mu).unwrap();
        prop_assert!(op_equal(&back, &a, &dom(), 5).unwrap().equal);
    }
}

fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut s = 0.5 * (f(lo) + f(hi));
    for k in 1..n {
        s += f(lo + k as f64 * h);
    }
    s * h
}

#[test]
fn momentum_is_symmetric_on_bump_functions() {
    // real bumps supported in (-1, 1); i∂ pairs them to purely imaginary integrands
    let bump = |c: f64, w: f64| {
        let u = (var("x") - Expr::constant(specmorph_core::expr::Scalar::real(
            num_rational::BigRational::from_float(c).unwrap(),
        ))) * Expr::constant(specmorph_core::expr::Scalar::real(
            num_rational::BigRational::from_float(1.0 / w).unwrap(),
        ));
        exp((int(1) - powi(u, 2)).recip().neg())
    };
    let p = DiffOp::d(&x()).left_mul(&Expr::i());
    let pairs = [(0.0, 0.8, 0.1, 0.7), (-0.2, 0.5, 0.1, 0.6), (0.3, 0.6, -0.1, 0.9)];
    for (c1, w1, c2, w2) in pairs {
        let phi = bump(c1, w1);
        let psi = bump(c2, w2);
        let ev = |e: &Expr, t: f64, lo: f64, hi: f64| {
            if t <= lo || t >= hi {
                return num_complex::Complex64::new(0.0, 0.0);
            }
            e.eval_complex(&Bindings::new().with("x", t)).unwrap()
        };
        let (l1, h1) = (c1 - w1, c1 + w1);
        let (l2, h2) = (c2 - w2, c2 + w2);
        let dpsi = p.apply(&psi);
        let dphi = p.apply(&phi);
        let n = 20000;
        let lhs = trapezoid(|t| (ev(&phi, t, l1, h1).conj() * ev(&dpsi, t, l2, h2)).im, -1.0, 1.0, n);
        let rhs = trapezoid(|t| (ev(&dphi, t, l1, h1).conj() * ev(&psi, t, l2, h2)).im, -1.0, 1.0, n);
        let rel = (lhs - rhs).abs() / lhs.abs().max(1e-12);
        assert!(rel < 1e-6, "{lhs} vs {rhs}");
    }
}
