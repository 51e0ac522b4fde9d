//! Numerical toolkit for 3-product spaces and the three-operator
//! uncertainty inequality
//!
//! ```text
//! (1/27)(dA + dB + dC)^3 >= dA dB dC >= |<(ABC - aBC - bAC - cAB)x, x, x> + 2abc|
//! ```
//!
//! where `<x,x,x> = 1`, `a = <Ax,x,x>` (likewise `b`, `c`) and
//! `dA = ||Ax - ax||` is the 3-uncertainty of `A` at `x`.
//!
//! - [`space`]: weighted pointwise 3-products (R^n, truncated l^3, quadrature L^3).
//! - [`axioms`]: sampled checks of the four 3-product axioms.
//! - [`operator`]: diagonal and dense operators, the 3-self-adjointness test.
//! - [`uncertainty`]: 3-means, 3-uncertainties and the full inequality chain.
//! - [`classical`]: the two-operator Robertson and Schrödinger bounds on R^n.
//! - [`batch`]: seeded sweeps over random instances.
//! - [`sharpness`]: multi-start search for the sharpest instances.
//! - [`cli`]: the `triform` command-line front end.

pub mod axioms;
pub mod batch;
pub mod classical;
pub mod cli;
pub mod error;
pub mod generate;
pub mod operator;
pub mod quadrature;
pub mod sharpness;
pub mod space;
pub mod tolerance;
pub mod uncertainty;

pub use axioms::{check_axioms, AxiomReport};
pub use error::{Error, Result, SelfAdjointnessWitness};
pub use operator::{check_3_self_adjoint, LinearOperator, SelfAdjointness};
pub use sharpness::{
    optimize_joint, optimize_state, sharpness_ratio, OptimizerConfig, SharpnessResult,
};
pub use space::{StateVector, TriProductSpace};
pub use tolerance::Tolerance;
pub use uncertainty::{verify_chain, ChainReport};
