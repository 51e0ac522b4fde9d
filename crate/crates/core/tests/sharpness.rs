use triform::sharpness::FALSIFY_TOLERANCE;
use triform::tolerance::NULL_CUBE_EPSILON;
use triform::{
    optimize_joint, optimize_state, sharpness_ratio, verify_chain, Error, LinearOperator,
    OptimizerConfig, Tolerance, TriProductSpace,
};

fn projections() -> [LinearOperator; 3] {
    [
        LinearOperator::diagonal(vec![1.0, 0.0, 0.0]),
        LinearOperator::diagonal(vec![0.0, 1.0, 0.0]),
        LinearOperator::diagonal(vec![0.0, 0.0, 1.0]),
    ]
}

fn config(seed: u64, restarts: usize) -> OptimizerConfig {
    OptimizerConfig {
        seed,
        restarts,
        ..OptimizerConfig::default()
    }
}

fn reproduce(space: &TriProductSpace, r: &triform::SharpnessResult) -> f64 {
    let [a, b, c] = r.best_operators.clone().map(LinearOperator::diagonal);
    let x = space.state(r.best_state.clone()).unwrap();
    let chain = verify_chain(space, &a, &b, &c, &x, &Tolerance::default()).unwrap();
    assert!(chain.chain_ok);
    chain.rhs_expanded / chain.lhs_product
}

#[test]
fn ratio_examples() {
    let s = TriProductSpace::unit(3).unwrap();
    let [a, b, c] = projections();
    let x = s
        .cube_normalize(&[1.0, 1.0, 1.0], NULL_CUBE_EPSILON)
        .unwrap();
    let r = sharpness_ratio(&s, &a, &b, &c, &x, 1e-9).unwrap().unwrap();
    assert!((r - 0.6).abs() < 1e-12);

    let e1 = s.state(vec![1.0, 0.0, 0.0]).unwrap();
    assert_eq!(sharpness_ratio(&s, &a, &b, &c, &e1, 1e-9).unwrap(), None);

    let id = LinearOperator::identity(3);
    let d = LinearOperator::diagonal(vec![0.3, -1.0, 2.0]);
    assert_eq!(sharpness_ratio(&s, &a, &d, &id, &x, 1e-9).unwrap(), None);
}

#[test]
fn state_search_beats_known_witness() {
    let s = TriProductSpace::unit(3).unwrap();
    let [a, b, c] = projections();
    let r = optimize_state(&s, &a, &b, &c, &config(5, 16)).unwrap();
    println!("state best {} iters {}", r.best_ratio, r.iterations_total);
    assert!(r.best_ratio >= 0.6);
    assert!(r.best_ratio <= 1.0 + FALSIFY_TOLERANCE);
    assert!(!r.falsification_flag);
    assert_eq!(r.cross_check_failures, 0);
    assert!((reproduce(&s, &r) - r.best_ratio).abs() <= 1e-9);
}

#[test]
fn identity_operators_are_undefined() {
    let s = TriProductSpace::unit(3).unwrap();
    let id = LinearOperator::identity(3);
    assert_eq!(
        optimize_state(&s, &id, &id, &id, &config(1, 4)),
        Err(Error::UndefinedResult)
    );
}

#[test]
fn one_dimension_is_undefined() {
    let s = TriProductSpace::unit(1).unwrap();
    assert_eq!(
        optimize_joint(&s, -2.0, 2.0, &config(1, 4)),
        Err(Error::UndefinedResult)
    );
}

#[test]
fn joint_search_reaches_projection_ratio() {
    let s = TriProductSpace::unit(3).unwrap();
    let r = optimize_joint(&s, -2.0, 2.0, &config(11, 16)).unwrap();
    println!(
        "joint best {} seen {} iters {}",
        r.best_ratio, r.max_ratio_seen, r.iterations_total
    );
    assert!(r.best_ratio >= 0.6);
    assert!(!r.falsification_flag);
    assert!((reproduce(&s, &r) - r.best_ratio).abs() <= 1e-9);
    for d in r.best_operators.iter().flatten() {
        assert!((-2.0..=2.0).contains(d));
    }
}

#[test]
fn more_restarts_never_lower_the_best() {
    let s = TriProductSpace::unit(3).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for k in [1, 2, 4, 8] {
        let r = optimize_joint(
            &s,
            -1.0,
            1.0,
            &OptimizerConfig {
                max_iterations: 50,
                ..config(3, k)
            },
        )
        .unwrap();
        assert!(r.best_ratio >= prev);
        prev = r.best_ratio;
    }
}

#[test]
fn searches_are_deterministic() {
    let s = TriProductSpace::pointwise(vec![0.7, 1.3, 1.0, 2.0]).unwrap();
    let cfg = OptimizerConfig {
        max_iterations: 60,
        ..config(9, 6)
    };
    let a = optimize_joint(&s, -2.0, 2.0, &cfg).unwrap();
    let b = optimize_joint(&s, -2.0, 2.0, &cfg).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn shifting_an_operator_keeps_the_ratio() {
    let s = TriProductSpace::pointwise(vec![1.0, 0.5, 2.0]).unwrap();
    let a = LinearOperator::diagonal(vec![0.4, -1.2, 1.7]);
    let b = LinearOperator::diagonal(vec![1.1, 0.3, -0.8]);
    let c = LinearOperator::diagonal(vec![-0.5, 0.9, 0.2]);
    let x = s
        .cube_normalize(&[0.8, -0.3, 0.6], NULL_CUBE_EPSILON)
        .unwrap();
    let r0 = sharpness_ratio(&s, &a, &b, &c, &x, 1e-9).unwrap().unwrap();
    for mu in [-2.5, 0.7, 3.0] {
        let r1 = sharpness_ratio(&s, &a.shifted(mu), &b, &c, &x, 1e-9)
            .unwrap()
            .unwrap();
        assert!((r1 - r0).abs() <= 1e-9 * (1.0 + r0), "{r0} {r1}");
    }
}

#[test]
fn rejects_bad_configs() {
    let s = TriProductSpace::unit(3).unwrap();
    assert!(matches!(
        optimize_joint(&s, 1.0, 1.0, &config(0, 2)),
        Err(Error::Precondition(_))
    ));
    let bad = OptimizerConfig {
        restarts: 0,
        ..OptimizerConfig::default()
    };
    assert!(optimize_joint(&s, -1.0, 1.0, &bad).is_err());
    let dense = LinearOperator::identity(3).to_dense();
    let id = LinearOperator::identity(3);
    assert!(optimize_state(&s, &dense, &id, &id, &config(0, 2)).is_err());
}
