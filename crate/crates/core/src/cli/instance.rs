//! Instance file format (UTF-8 JSON).
//!
//! ```json
//! {
//!   "space": {"dimension": 3, "weights": "unit", "label": "projections"},
//!   "operators": [{"diagonal": [1, 0, 0]}, {"dense": [[0, 1], [1, 0]]},
//!                 {"random_diagonal": {"low": -2, "high": 2}}],
//!   "state": {"coords": [1, 1, 1]},
//!   "tolerances": {"absolute": 1e-12, "relative": 1e-9},
//!   "seed": 11,
//!   "optimize": {"mode": "joint", "low": -2, "high": 2, "restarts": 64}
//! }
//! ```
//!
//! `weights` may also be an explicit array or
//! `{"quadrature": {"rule": "midpoint", "interval": [0, 1]}}` with
//! `dimension` nodes. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::generate::{derive_seed, random_diagonal, random_state, rng};
use crate::operator::LinearOperator;
use crate::quadrature::Rule;
use crate::sharpness::OptimizerConfig;
use crate::space::{StateVector, TriProductSpace};
use crate::tolerance::{Tolerance, NULL_CUBE_EPSILON};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub space: SpaceSpec,
    #[serde(default)]
    pub operators: Vec<OperatorSpec>,
    #[serde(default)]
    pub state: Option<StateSpec>,
    #[serde(default)]
    pub tolerances: Option<Tolerance>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub optimize: Option<OptimizeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub dimension: usize,
    pub weights: WeightsSpec,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    Named(String),
    Values(Vec<f64>),
    Quadrature { quadrature: QuadratureSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub interval: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Diagonal(Vec<f64>),
    Dense(Vec<Vec<f64>>),
    RandomDiagonal(Bounds),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub coords: CoordsSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoordsSpec {
    Named(String),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizeMode {
    State,
    Joint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSpec {
    #[serde(default = "default_mode")]
    pub mode: OptimizeMode,
    #[serde(default)]
    pub low: Option<f64>,
    #[serde(default)]
    pub high: Option<f64>,
    #[serde(default)]
    pub restarts: Option<usize>,
    #[serde(default)]
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub initial_step: Option<f64>,
    #[serde(default)]
    pub shrink: Option<f64>,
    #[serde(default)]
    pub convergence: Option<f64>,
    #[serde(default)]
    pub delta_floor: Option<f64>,
}

fn default_mode() -> OptimizeMode {
    OptimizeMode::State
}

impl OptimizeSpec {
    pub fn config(&self, seed: u64) -> OptimizerConfig {
        let d = OptimizerConfig::default();
        OptimizerConfig {
            restarts: self.restarts.unwrap_or(d.restarts),
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
            initial_step: self.initial_step.unwrap_or(d.initial_step),
            shrink: self.shrink.unwrap_or(d.shrink),
            convergence: self.convergence.unwrap_or(d.convergence),
            delta_floor: self.delta_floor.unwrap_or(d.delta_floor),
            seed,
        }
    }
}

/// Parse with errors anchored to the offending field and line/column.
pub fn parse(text: &str) -> Result<InstanceFile, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        format!("at `{path}`: {}", e.inner())
    })
}

/// A file resolved into concrete objects.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub space: TriProductSpace,
    pub operators: Vec<LinearOperator>,
    /// Raw coordinates as given (or drawn and cube-normalized when "random").
    pub coords: Option<Vec<f64>>,
    pub tolerance: Tolerance,
    pub seed: Option<u64>,
}

impl InstanceFile {
    pub fn resolve(&self) -> Result<Resolved, String> {
        let n = self.space.dimension;
        if n == 0 {
            return Err("at `space.dimension`: must be positive".into());
        }
        let label = self.space.label.clone();
        let space = match &self.space.weights {
            WeightsSpec::Named(name) if name == "unit" => {
                TriProductSpace::unit(n).map(|s| match &label {
                    Some(l) => TriProductSpace::pointwise_labeled(s.weights().to_vec(), l.clone())
                        .expect("unit weights"),
                    None => s,
                })
            }
            WeightsSpec::Named(other) => {
                return Err(format!(
                    "at `space.weights`: unknown weight mode \"{other}\" (expected \"unit\")"
                ))
            }
            WeightsSpec::Values(w) => {
                if w.len() != n {
                    return Err(format!(
                        "at `space.weights`: {} weights for dimension {n}",
                        w.len()
                    ));
                }
                TriProductSpace::pointwise_labeled(
                    w.clone(),
                    label.unwrap_or_else(|| "pointwise".into()),
                )
            }
            WeightsSpec::Quadrature { quadrature } => TriProductSpace::quadrature(
                quadrature.rule,
                n,
                quadrature.interval[0],
                quadrature.interval[1],
            )
            .map(|(s, _)| match &label {
                Some(l) => TriProductSpace::pointwise_labeled(s.weights().to_vec(), l.clone())
                    .expect("positive"),
                None => s,
            }),
        }
        .map_err(|e| format!("at `space.weights`: {e}"))?;

        let tolerance = self.tolerances.unwrap_or_default();
        if !tolerance.is_valid() {
            return Err("at `tolerances`: values must be finite and nonnegative".into());
        }

        let mut operators = Vec::with_capacity(self.operators.len());
        for (k, spec) in self.operators.iter().enumerate() {
            let op = match spec {
                OperatorSpec::Diagonal(d) => {
                    if d.len() != n {
                        return Err(format!(
                            "at `operators[{k}].diagonal`: {} entries for dimension {n}",
                            d.len()
                        ));
                    }
                    LinearOperator::diagonal(d.clone())
                }
                OperatorSpec::Dense(rows) => {
                    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                        return Err(format!(
                            "at `operators[{k}].dense`: expected a {n}x{n} matrix"
                        ));
                    }
                    LinearOperator::dense(rows.clone())
                        .map_err(|e| format!("at `operators[{k}].dense`: {e}"))?
                }
                OperatorSpec::RandomDiagonal(b) => {
                    let Some(seed) = self.seed else {
                        return Err(format!(
                            "at `operators[{k}].random_diagonal`: a top-level `seed` is required"
                        ));
                    };
                    if !(b.low.is_finite() && b.high.is_finite() && b.low <= b.high) {
                        return Err(format!(
                            "at `operators[{k}].random_diagonal`: need low <= high"
                        ));
                    }
                    let mut r = rng(derive_seed(seed, k as u64));
                    random_diagonal(&mut r, n, b.low, b.high)
                }
            };
            if op.max_abs_entry().is_nan() {
                return Err(format!("at `operators[{k}]`: entries must be finite"));
            }
            operators.push(op);
        }

        let coords = match &self.state {
            None => None,
            Some(StateSpec {
                coords: CoordsSpec::Values(v),
            }) => {
                if v.len() != n {
                    return Err(format!(
                        "at `state.coords`: {} coordinates for dimension {n}",
                        v.len()
                    ));
                }
                Some(v.clone())
            }
            Some(StateSpec {
                coords: CoordsSpec::Named(name),
            }) if name == "random" => {
                let Some(seed) = self.seed else {
                    return Err(
                        "at `state.coords`: a top-level `seed` is required for \"random\"".into(),
                    );
                };
                let mut r = rng(derive_seed(seed, u64::MAX));
                Some(random_state(&space, &mut r).0.into_coords())
            }
            Some(StateSpec {
                coords: CoordsSpec::Named(other),
            }) => {
                return Err(format!(
                    "at `state.coords`: unknown state \"{other}\" (expected \"random\")"
                ))
            }
        };

        Ok(Resolved {
            space,
            operators,
            coords,
            tolerance,
            seed: self.seed,
        })
    }
}

impl Resolved {
    pub fn normalized_state(&self) -> Result<StateVector, String> {
        let coords = self
            .coords
            .as_ref()
            .ok_or("at `state`: a state is required")?;
        self.space
            .cube_normalize(coords, NULL_CUBE_EPSILON)
            .map_err(|e| format!("at `state.coords`: {e}"))
    }

    pub fn three_operators(&self) -> Result<[&LinearOperator; 3], String> {
        match self.operators.as_slice() {
            [a, b, c] => Ok([a, b, c]),
            other => Err(format!(
                "at `operators`: expected exactly 3 operators, found {}",
                other.len()
            )),
        }
    }
}
