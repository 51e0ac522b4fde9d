use std::fmt;

use serde::{Deserialize, Serialize};

/// A basis triple `(i, j, k)` (1-based) at which an operator fails to move
/// freely between the slots of the 3-product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfAdjointnessWitness {
    pub triple: [usize; 3],
    /// `<Ae_i, e_j, e_k>`, `<e_i, Ae_j, e_k>`, `<e_i, e_j, Ae_k>`.
    pub values: [f64; 3],
    pub discrepancy: f64,
}

impl fmt::Display for SelfAdjointnessWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [i, j, k] = self.triple;
        write!(
            f,
            "({i},{j},{k}): {} / {} / {} (discrepancy {})",
            self.values[0], self.values[1], self.values[2], self.discrepancy
        )
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cube sum {cube_sum} is within {epsilon} of zero; resample the state")]
    NearNullCube { cube_sum: f64, epsilon: f64 },

    #[error("state is not cube-normalized: <x,x,x> = {cube_sum}")]
    NotNormalized { cube_sum: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operator {operator} is not 3-self-adjoint, witness {witness}")]
    RejectedInstance {
        operator: char,
        witness: SelfAdjointnessWitness,
    },

    #[error("every probed state is degenerate (zero uncertainty); try different operators")]
    UndefinedResult,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dimension(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
