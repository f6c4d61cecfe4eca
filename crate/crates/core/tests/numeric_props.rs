use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;
use specmorph_core::numeric::{fd_eigs, fd_hamiltonian, fd_resolvent, sturm_count, Grid, GridOperator};
use specmorph_core::potentials::{lookup, Consts};

fn rm(a: f64, b: f64) -> GridOperator {
    let spec = lookup("rosen-morse-tanh").unwrap();
    let p = BTreeMap::from([("A".to_string(), a), ("B".to_string(), b)]);
    fd_hamiltonian(&spec, &p, &Consts::default(), &Grid::new("x", -10.0, 10.0, 400).unwrap()).unwrap()
}

fn unit(n: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[i] = Complex64::new(1.0, 0.0);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sturm_count_is_monotone(a in -2.0..2.0f64, b in 0.5..8.0f64, x in -10.0..10.0f64, dx in 0.0..5.0f64) {
        let op = rm(a, b);
        prop_assert!(sturm_count(&op, x) <= sturm_count(&op, x + dx));
    }

    #[test]
    fn eigenvalues_sit_where_the_count_jumps(a in -1.0..1.0f64, b in 1.0..8.0f64) {
        let op = rm(a, b);
        let e = fd_eigs(&op, 4).unwrap();
        for (k, v) in e.values.iter().enumerate() {
            let tol = 1e-8 * v.abs().max(1.0);
            prop_assert_eq!(sturm_count(&op, v - tol), k);
            prop_assert_eq!(sturm_count(&op, v + tol), k + 1);
        }
    }

    #[test]
    fn resolvent_is_symmetric(a in -1.0..1.0f64, b in 1.0..6.0f64, i in 0usize..400, j in 0usize..400, e in -8.0..2.0f64) {
        let op = rm(a, b);
        let gi = fd_resolvent(&op, e, 1e-3, &unit(400, i)).unwrap();
        let gj = fd_resolvent(&op, e, 1e-3, &unit(400, j)).unwrap();
        let scale = gi[i].norm().max(gj[j].norm()).max(1e-12);
        prop_assert!((gi[j] - gj[i]).norm() <= 1e-8 * scale);
    }
}
