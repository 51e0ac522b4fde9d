mod common;

use common::oracle;
use proptest::prelude::*;
use triform::operator::default_adjoint_tolerance;
use triform::tolerance::NULL_CUBE_EPSILON;
use triform::uncertainty::{centered_rhs, delta3, expanded_rhs};
use triform::{check_3_self_adjoint, verify_chain, LinearOperator, Tolerance, TriProductSpace};

fn space_and_vectors(k: usize) -> impl Strategy<Value = (TriProductSpace, Vec<Vec<f64>>)> {
    (1usize..10).prop_flat_map(move |n| {
        (
            prop::collection::vec(0.1f64..5.0, n),
            prop::collection::vec(prop::collection::vec(-10.0f64..10.0, n), k),
        )
            .prop_map(|(w, vs)| (TriProductSpace::pointwise(w).unwrap(), vs))
    })
}

fn diag_instance() -> impl Strategy<Value = (TriProductSpace, [Vec<f64>; 3], Vec<f64>)> {
    (2usize..9).prop_flat_map(|n| {
        (
            prop::collection::vec(0.5f64..2.0, n),
            prop::collection::vec(-2.0f64..2.0, n),
            prop::collection::vec(-2.0f64..2.0, n),
            prop::collection::vec(-2.0f64..2.0, n),
            prop::collection::vec(-1.0f64..1.0, n),
        )
            .prop_filter("cube sum away from zero", |(w, _, _, _, x)| {
                oracle::e3(w, x, x, x).abs() > 1e-3
            })
            .prop_map(|(w, a, b, c, x)| (TriProductSpace::pointwise(w).unwrap(), [a, b, c], x))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn eval3_is_bitwise_symmetric((s, v) in space_and_vectors(3)) {
        let (x, y, z) = (&v[0], &v[1], &v[2]);
        let base = s.eval3(x, y, z).unwrap().to_bits();
        for (p, q, r) in [(x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)] {
            prop_assert_eq!(s.eval3(p, q, r).unwrap().to_bits(), base);
        }
    }

    #[test]
    fn eval3_is_trilinear((s, v) in space_and_vectors(4), alpha in -10.0f64..10.0) {
        let (x, y, z, w) = (&v[0], &v[1], &v[2], &v[3]);
        let mixed: Vec<f64> = x.iter().zip(w).map(|(a, b)| alpha * a + b).collect();
        let lhs = s.eval3(&mixed, y, z).unwrap();
        let rhs = alpha * s.eval3(x, y, z).unwrap() + s.eval3(w, y, z).unwrap();
        let mag = alpha.abs() * s.eval3_abs(x, y, z).unwrap() + s.eval3_abs(w, y, z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + mag));
    }

    #[test]
    fn holder_bound((s, v) in space_and_vectors(3)) {
        let (x, y, z) = (&v[0], &v[1], &v[2]);
        let bound = s.norm(x).unwrap() * s.norm(y).unwrap() * s.norm(z).unwrap();
        prop_assert!(s.eval3(x, y, z).unwrap().abs() <= bound + 1e-12 * (1.0 + bound));
    }

    #[test]
    fn norm_is_homogeneous((s, v) in space_and_vectors(1), lambda in -50.0f64..50.0) {
        let x = &v[0];
        let scaled: Vec<f64> = x.iter().map(|a| lambda * a).collect();
        let want = lambda.abs() * s.norm(x).unwrap();
        prop_assert!((s.norm(&scaled).unwrap() - want).abs() <= 1e-12 * (1e-300 + want));
    }

    #[test]
    fn normalization_is_signed_and_idempotent(w in prop::collection::vec(0.5f64..2.0, 2..9), seed in any::<u64>()) {
        let s = TriProductSpace::pointwise(w.clone()).unwrap();
        let mut r = triform::generate::rng(seed);
        let x: Vec<f64> = (0..w.len()).map(|_| triform::generate::uniform(&mut r, -1.0, 1.0)).collect();
        prop_assume!(oracle::e3(&w, &x, &x, &x).abs() >= 0.1);
        let once = s.cube_normalize(&x, NULL_CUBE_EPSILON).unwrap();
        prop_assert!((once.cube_sum() - 1.0).abs() <= 1e-12);
        let twice = s.cube_normalize(&once, NULL_CUBE_EPSILON).unwrap();
        for (a, b) in once.iter().zip(twice.iter()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn apply_is_linear(n in 1usize..7, seed in any::<u64>(), alpha in -5.0f64..5.0) {
        let mut r = triform::generate::rng(seed);
        let m = triform::generate::random_dense_off_diagonal(&mut r, n.max(2), 0.1);
        let n = m.dimension();
        let x: Vec<f64> = (0..n).map(|_| triform::generate::uniform(&mut r, -1.0, 1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| triform::generate::uniform(&mut r, -1.0, 1.0)).collect();
        let combo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + b).collect();
        let lhs = m.apply(&combo).unwrap();
        let (mx, my) = (m.apply(&x).unwrap(), m.apply(&y).unwrap());
        for i in 0..n {
            prop_assert!((lhs[i] - (alpha * mx[i] + my[i])).abs() <= 1e-12 * (1.0 + alpha.abs()) * n as f64);
        }
    }

    #[test]
    fn compose_is_associative(n in 2usize..7, seed in any::<u64>()) {
        let mut r = triform::generate::rng(seed);
        let a = triform::generate::random_dense_off_diagonal(&mut r, n, 0.1);
        let b = triform::generate::random_symmetric(&mut r, n);
        let c = triform::generate::random_diagonal(&mut r, n, -2.0, 2.0);
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..n).map(|_| triform::generate::uniform(&mut r, -1.0, 1.0)).collect();
            let (p, q) = (left.apply(&x).unwrap(), right.apply(&x).unwrap());
            let scale = q.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            for i in 0..n {
                prop_assert!((p[i] - q[i]).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn self_adjointness_survives_linear_combinations(
        (s, ops, _) in diag_instance(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0
    ) {
        let a = LinearOperator::diagonal(ops[0].clone()).to_dense();
        let b = LinearOperator::diagonal(ops[1].clone()).to_dense();
        let m = LinearOperator::linear_combination(&[(alpha, &a), (beta, &b)]).unwrap();
        prop_assert!(check_3_self_adjoint(&s, &m, default_adjoint_tolerance(&s, &m)).unwrap().passed);
    }

    #[test]
    fn off_diagonal_entry_forces_its_witness(
        (s, ops, _) in diag_instance(), value in 0.1f64..3.0, pick in any::<prop::sample::Index>()
    ) {
        let n = s.dimension();
        let r = pick.index(n);
        let col = (r + 1) % n;
        let mut m = LinearOperator::diagonal(ops[0].clone()).to_dense();
        if let LinearOperator::Dense { entries, .. } = &mut m {
            entries[r * n + col] = value;
        }
        let check = check_3_self_adjoint(&s, &m, default_adjoint_tolerance(&s, &m)).unwrap();
        let w = check.witness.unwrap();
        prop_assert_eq!(w.triple, [col + 1, r + 1, r + 1]);
        prop_assert!((w.discrepancy - s.weights()[r] * value).abs() <= 1e-15 * w.discrepancy);
    }

    #[test]
    fn chain_holds_and_forms_agree((s, ops, x) in diag_instance()) {
        let [a, b, c] = ops.clone().map(LinearOperator::diagonal);
        let xs = s.cube_normalize(&x, NULL_CUBE_EPSILON).unwrap();
        let r = verify_chain(&s, &a, &b, &c, &xs, &Tolerance::default()).unwrap();
        prop_assert!(r.chain_ok);
        prop_assert!(r.amgm_bound + 1e-12 * (1.0 + r.amgm_bound) >= r.lhs_product);
        prop_assert!(r.identity_deviation <= 1e-10 * r.scale);
        let o = oracle::chain(s.weights(), [&ops[0], &ops[1], &ops[2]], &xs);
        prop_assert!((o.lhs - r.lhs_product).abs() <= 1e-9 * r.scale);
        prop_assert!((o.rhs_centered - r.rhs_centered).abs() <= 1e-9 * r.scale);
    }

    #[test]
    fn scale_covariance((s, ops, x) in diag_instance(), lambda in -3.0f64..3.0) {
        let [a, b, c] = ops.map(LinearOperator::diagonal);
        let xs = s.cube_normalize(&x, NULL_CUBE_EPSILON).unwrap();
        let la = a.scaled(lambda);
        let d = delta3(&s, &a, &xs).unwrap();
        let mag = 1.0 + s.norm(&xs).unwrap() * 2.0 * 3.0;
        prop_assert!((delta3(&s, &la, &xs).unwrap() - lambda.abs() * d).abs() <= 1e-9 * mag);
        let rc = centered_rhs(&s, &a, &b, &c, &xs).unwrap();
        let scale = verify_chain(&s, &a, &b, &c, &xs, &Tolerance::default()).unwrap().scale;
        prop_assert!((centered_rhs(&s, &la, &b, &c, &xs).unwrap() - lambda.abs() * rc).abs() <= 1e-9 * 3.0 * scale);
    }

    #[test]
    fn eigenstates_collapse(w in prop::collection::vec(0.5f64..2.0, 2..8), ops in prop::collection::vec(-2.0f64..2.0, 21), pick in any::<prop::sample::Index>()) {
        let n = w.len();
        let s = TriProductSpace::pointwise(w.clone()).unwrap();
        let i = pick.index(n);
        let mut e = vec![0.0; n];
        e[i] = w[i].powf(-1.0 / 3.0);
        let x = s.cube_normalize(&e, NULL_CUBE_EPSILON).unwrap();
        let [a, b, c] = [0, 1, 2].map(|k| LinearOperator::diagonal(ops[k * 7..k * 7 + n].to_vec()));
        // ulp-level residue from forming the mean is all that may remain
        let scale = 1.0 + s.norm(&x).unwrap().powi(3) * 8.0;
        prop_assert!(delta3(&s, &a, &x).unwrap() <= 1e-14 * scale);
        prop_assert!(centered_rhs(&s, &a, &b, &c, &x).unwrap().abs() <= 1e-14 * scale);
        prop_assert!(expanded_rhs(&s, &a, &b, &c, &x).unwrap().abs() <= 1e-12 * scale);
    }
}
