//! Seeded generators for random instances, states and test matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::space::{StateVector, TriProductSpace};
use crate::tolerance::NULL_CUBE_EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Unit,
    /// Weights drawn uniformly from `[0.5, 2)`.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub dimension: usize,
    pub weights: WeightMode,
    pub low: f64,
    pub high: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub space: TriProductSpace,
    pub a: LinearOperator,
    pub b: LinearOperator,
    pub c: LinearOperator,
    pub state: StateVector,
    /// Draws rejected for a near-null cube sum before `state` was accepted.
    pub resamples: usize,
}

/// SplitMix64 mix of `(base, index)`; gives independent per-item seeds.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut impl Rng, low: f64, high: f64) -> f64 {
    low + (high - low) * rng.gen::<f64>()
}

pub fn random_diagonal(rng: &mut impl Rng, n: usize, low: f64, high: f64) -> LinearOperator {
    LinearOperator::diagonal((0..n).map(|_| uniform(rng, low, high)).collect())
}

/// Coordinates uniform in `(-1, 1)`, redrawn until the cube sum clears the
/// null-cube threshold, then cube-normalized.
pub fn random_state(space: &TriProductSpace, rng: &mut impl Rng) -> (StateVector, usize) {
    let n = space.dimension();
    let mut resamples = 0;
    loop {
        let raw: Vec<f64> = (0..n).map(|_| uniform(rng, -1.0, 1.0)).collect();
        match space.cube_normalize(&raw, NULL_CUBE_EPSILON) {
            Ok(x) => return (x, resamples),
            Err(_) => resamples += 1,
        }
    }
}

pub fn random_instance(config: &GenConfig) -> Result<Instance> {
    let n = config.dimension;
    if n < 2 {
        return Err(Error::Precondition(format!(
            "instance dimension must be >= 2, got {n}"
        )));
    }
    if !(config.low.is_finite() && config.high.is_finite() && config.low <= config.high) {
        return Err(Error::Precondition(format!(
            "invalid diagonal bounds [{}, {}]",
            config.low, config.high
        )));
    }
    let mut rng = rng(config.seed);
    let space = match config.weights {
        WeightMode::Unit => TriProductSpace::unit(n)?,
        WeightMode::Random => {
            let w = (0..n).map(|_| uniform(&mut rng, 0.5, 2.0)).collect();
            TriProductSpace::pointwise_labeled(w, format!("weighted-R{n}"))?
        }
    };
    let a = random_diagonal(&mut rng, n, config.low, config.high);
    let b = random_diagonal(&mut rng, n, config.low, config.high);
    let c = random_diagonal(&mut rng, n, config.low, config.high);
    let (state, resamples) = random_state(&space, &mut rng);
    Ok(Instance {
        space,
        a,
        b,
        c,
        state,
        resamples,
    })
}

/// Random symmetric matrix with entries uniform in `[-1, 1)`.
pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> LinearOperator {
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = uniform(rng, -1.0, 1.0);
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    LinearOperator::Dense { n, entries }
}

/// Euclidean unit vector.
pub fn random_unit_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Dense matrix with entries uniform in `[-1, 1)` and at least one
/// off-diagonal entry of magnitude `>= min_off` (needs `n >= 2`).
pub fn random_dense_off_diagonal(rng: &mut impl Rng, n: usize, min_off: f64) -> LinearOperator {
    let mut entries: Vec<f64> = (0..n * n).map(|_| uniform(rng, -1.0, 1.0)).collect();
    let has_big = (0..n).any(|i| (0..n).any(|j| i != j && entries[i * n + j].abs() >= min_off));
    if !has_big {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        entries[i * n + j] = sign * uniform(rng, min_off, 1.0);
    }
    LinearOperator::Dense { n, entries }
}
