//! Seeded batch runs over many random instances. Instances are evaluated in
//! parallel; results are always returned in instance order, so the output
//! matches a sequential run exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{classical_verify, ClassicalReport};
use crate::error::Result;
use crate::generate::{
    derive_seed, random_instance, random_symmetric, random_unit_vector, rng, GenConfig, WeightMode,
};
use crate::tolerance::Tolerance;
use crate::uncertainty::{operator_order_invariance, verify_chain, ChainReport, OrderInvariance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepWeights {
    Unit,
    Random,
    /// Each instance picks unit or random weights from its own seed.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Inclusive dimension range.
    pub dims: (usize, usize),
    pub count: usize,
    pub seed: u64,
    pub weights: SweepWeights,
    pub low: f64,
    pub high: f64,
    pub tolerance: Tolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: usize,
    pub dimension: usize,
    pub seed: u64,
    pub chain: ChainReport,
    pub order: OrderInvariance,
}

impl InstanceRecord {
    pub fn passed(&self) -> bool {
        self.chain.passed() && self.order.passed
    }
}

pub fn instance_config(config: &SweepConfig, id: usize) -> GenConfig {
    let seed = derive_seed(config.seed, id as u64);
    let (lo, hi) = config.dims;
    let span = (hi - lo + 1) as u64;
    let weights = match config.weights {
        SweepWeights::Unit => WeightMode::Unit,
        SweepWeights::Random => WeightMode::Random,
        SweepWeights::Mixed if (seed >> 32) & 1 == 0 => WeightMode::Unit,
        SweepWeights::Mixed => WeightMode::Random,
    };
    GenConfig {
        dimension: lo + (seed % span) as usize,
        weights,
        low: config.low,
        high: config.high,
        seed,
    }
}

pub fn run_sweep(config: &SweepConfig) -> Result<Vec<InstanceRecord>> {
    let (lo, hi) = config.dims;
    if lo < 2 || hi < lo {
        return Err(crate::Error::Precondition(format!(
            "sweep dimensions need 2 <= lo <= hi, got {lo}..{hi}"
        )));
    }
    (0..config.count)
        .into_par_iter()
        .map(|id| {
            let gen = instance_config(config, id);
            let inst = random_instance(&gen)?;
            let tol = &config.tolerance;
            let chain = verify_chain(&inst.space, &inst.a, &inst.b, &inst.c, &inst.state, tol)?;
            let order = operator_order_invariance(
                &inst.space,
                &inst.a,
                &inst.b,
                &inst.c,
                &inst.state,
                tol,
            )?;
            Ok(InstanceRecord {
                id,
                dimension: gen.dimension,
                seed: gen.seed,
                chain,
                order,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalRecord {
    pub id: usize,
    pub dimension: usize,
    pub report: ClassicalReport,
}

/// Random real-symmetric pairs and Euclidean unit vectors.
pub fn run_classical(
    dims: (usize, usize),
    count: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<Vec<ClassicalRecord>> {
    let (lo, hi) = dims;
    if lo < 1 || hi < lo {
        return Err(crate::Error::Precondition(format!(
            "classical dimensions need 1 <= lo <= hi, got {lo}..{hi}"
        )));
    }
    (0..count)
        .into_par_iter()
        .map(|id| {
            let s = derive_seed(seed, id as u64);
            let n = lo + (s % (hi - lo + 1) as u64) as usize;
            let mut r = rng(s);
            let a = random_symmetric(&mut r, n);
            let b = random_symmetric(&mut r, n);
            let h = random_unit_vector(&mut r, n);
            Ok(ClassicalRecord {
                id,
                dimension: n,
                report: classical_verify(&a, &b, &h, tol)?,
            })
        })
        .collect()
}
