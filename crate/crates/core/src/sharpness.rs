//! Multi-start search for states (and diagonal operator triples) that make
//! the lower bound as sharp as possible, i.e. maximize
//! `rhs_expanded / (dA dB dC)`.
//!
//! The ratio is at most 1 for every admissible instance, so a value above
//! `1 + FALSIFY_TOLERANCE` is reported as a falsification signal. The best
//! ratio found is an empirical lower estimate of the supremum, nothing more.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{derive_seed, random_diagonal, random_state, rng};
use crate::operator::LinearOperator;
use crate::space::{StateVector, TriProductSpace};
use crate::tolerance::{Tolerance, NULL_CUBE_EPSILON};
use crate::uncertainty::chain_values;

/// A ratio above `1 + FALSIFY_TOLERANCE` contradicts the inequality.
pub const FALSIFY_TOLERANCE: f64 = 1e-6;

/// The uncertainty product must exceed this fraction of the expanded form's
/// term magnitudes; below it the expanded form is dominated by cancellation.
pub const RATIO_NOISE_FLOOR: f64 = 1e-8;

const MIN_STEP: f64 = 1e-14;
/// Fresh draws tried per restart before the restart is declared degenerate.
const START_DRAWS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub initial_step: f64,
    pub shrink: f64,
    pub convergence: f64,
    pub delta_floor: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iterations: 500,
            initial_step: 0.1,
            shrink: 0.5,
            convergence: 1e-12,
            delta_floor: 1e-9,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.restarts == 0
            || self.max_iterations == 0
            || !positive(self.initial_step)
            || !positive(self.convergence)
            || !positive(self.delta_floor)
            || !(positive(self.shrink) && self.shrink < 1.0)
        {
            return Err(Error::Precondition(format!(
                "optimizer settings must be positive (shrink in (0,1), restarts >= 1): {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    pub best_ratio: f64,
    pub best_state: Vec<f64>,
    pub best_operators: [Vec<f64>; 3],
    pub restarts_used: usize,
    pub iterations_total: usize,
    pub degenerate_restarts: usize,
    /// Best ratio per restart; `None` when the restart never left the degenerate set.
    pub ratio_trace: Option<Vec<Option<f64>>>,
    /// Largest ratio evaluated anywhere during the search.
    pub max_ratio_seen: f64,
    pub falsification_flag: bool,
    /// Evaluations where the expanded and centered forms disagreed beyond tolerance.
    pub cross_check_failures: usize,
    pub estimate: String,
}

/// `rhs_expanded / lhs_product`, or `None` when some uncertainty is below
/// `delta_floor` or the product is too small to resolve the expanded form.
pub fn sharpness_ratio(
    space: &TriProductSpace,
    a: &LinearOperator,
    b: &LinearOperator,
    c: &LinearOperator,
    x: &StateVector,
    delta_floor: f64,
) -> Result<Option<f64>> {
    Ok(evaluate(space, a, b, c, x, delta_floor)?.ratio)
}

struct Evaluation {
    ratio: Option<f64>,
    identity_ok: bool,
}

fn evaluate(
    space: &TriProductSpace,
    a: &LinearOperator,
    b: &LinearOperator,
    c: &LinearOperator,
    x: &[f64],
    delta_floor: f64,
) -> Result<Evaluation> {
    let r = chain_values(space, a, b, c, x, &Tolerance::default())?;
    let min_delta = r.delta_a.min(r.delta_b).min(r.delta_c);
    let floor = delta_floor.powi(3).max(RATIO_NOISE_FLOOR * r.scale);
    let defined = min_delta >= delta_floor && r.lhs_product >= floor && r.rhs_expanded.is_finite();
    Ok(Evaluation {
        ratio: defined.then(|| r.rhs_expanded / r.lhs_product),
        identity_ok: r.identity_ok,
    })
}

/// Search variables: the raw state followed by zero or three diagonals.
struct Problem<'a> {
    space: &'a TriProductSpace,
    fixed: Option<[&'a LinearOperator; 3]>,
    bounds: (f64, f64),
    delta_floor: f64,
}

#[derive(Default)]
struct Tally {
    max_seen: f64,
    cross_check_failures: usize,
}

impl Problem<'_> {
    fn n(&self) -> usize {
        self.space.dimension()
    }

    fn operators(&self, v: &[f64]) -> [LinearOperator; 3] {
        match self.fixed {
            Some([a, b, c]) => [a.clone(), b.clone(), c.clone()],
            None => {
                let n = self.n();
                [1, 2, 3].map(|k| LinearOperator::diagonal(v[k * n..(k + 1) * n].to_vec()))
            }
        }
    }

    /// Objective at `v`; `-inf` where the ratio is undefined.
    fn objective(&self, v: &[f64], tally: &mut Tally) -> f64 {
        let n = self.n();
        let Ok(x) = self.space.cube_normalize(&v[..n], NULL_CUBE_EPSILON) else {
            return f64::NEG_INFINITY;
        };
        let [a, b, c] = self.operators(v);
        match evaluate(self.space, &a, &b, &c, &x, self.delta_floor) {
            Ok(e) => {
                if !e.identity_ok {
                    tally.cross_check_failures += 1;
                }
                match e.ratio {
                    Some(r) => {
                        tally.max_seen = tally.max_seen.max(r);
                        r
                    }
                    None => f64::NEG_INFINITY,
                }
            }
            Err(_) => f64::NEG_INFINITY,
        }
    }

    /// Cube-renormalize the state block and clamp the diagonal blocks.
    fn project(&self, v: &mut [f64]) {
        let n = self.n();
        if let Ok(x) = self.space.cube_normalize(&v[..n], NULL_CUBE_EPSILON) {
            v[..n].copy_from_slice(&x);
        }
        if self.fixed.is_none() {
            let (lo, hi) = self.bounds;
            for d in &mut v[n..] {
                *d = d.clamp(lo, hi);
            }
        }
    }

    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
        let n = self.n();
        let (x, _) = random_state(self.space, rng);
        let mut v = x.into_coords();
        if self.fixed.is_none() {
            let (lo, hi) = self.bounds;
            for _ in 0..3 {
                if let LinearOperator::Diagonal(d) = random_diagonal(rng, n, lo, hi) {
                    v.extend(d);
                }
            }
        }
        v
    }

    fn gradient(&self, v: &[f64], f0: f64, tally: &mut Tally) -> Vec<f64> {
        let mut g = vec![0.0; v.len()];
        let mut probe = v.to_vec();
        for i in 0..v.len() {
            let h = 1e-6 * (1.0 + v[i].abs());
            probe[i] = v[i] + h;
            let fp = self.objective(&probe, tally);
            probe[i] = v[i] - h;
            let fm = self.objective(&probe, tally);
            probe[i] = v[i];
            g[i] = match (fp.is_finite(), fm.is_finite()) {
                (true, true) => (fp - fm) / (2.0 * h),
                (true, false) => (fp - f0) / h,
                (false, true) => (f0 - fm) / h,
                (false, false) => 0.0,
            };
        }
        g
    }
}

struct RestartOutcome {
    best: Option<(f64, Vec<f64>)>,
    iterations: usize,
    tally: Tally,
}

fn run_restart(problem: &Problem<'_>, config: &OptimizerConfig, index: usize) -> RestartOutcome {
    let mut rng = rng(derive_seed(config.seed, index as u64));
    let mut tally = Tally {
        max_seen: f64::NEG_INFINITY,
        ..Tally::default()
    };

    let mut start = None;
    for _ in 0..START_DRAWS {
        let v = problem.draw(&mut rng);
        let f = problem.objective(&v, &mut tally);
        if f.is_finite() {
            start = Some((v, f));
            break;
        }
    }
    let Some((mut v, mut f)) = start else {
        return RestartOutcome {
            best: None,
            iterations: 0,
            tally,
        };
    };

    let mut step = config.initial_step;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        let g = problem.gradient(&v, f, &mut tally);
        let gnorm = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(gnorm.is_finite() && gnorm > 0.0) {
            break;
        }
        let mut accepted = None;
        while step >= MIN_STEP {
            let mut trial: Vec<f64> = v
                .iter()
                .zip(&g)
                .map(|(a, d)| a + step * d / gnorm)
                .collect();
            problem.project(&mut trial);
            let ft = problem.objective(&trial, &mut tally);
            if ft > f {
                accepted = Some((trial, ft));
                break;
            }
            step *= config.shrink;
        }
        let Some((trial, ft)) = accepted else { break };
        let improvement = ft - f;
        v = trial;
        f = ft;
        step = (step / config.shrink).min(config.initial_step);
        if improvement < config.convergence {
            break;
        }
    }
    RestartOutcome {
        best: Some((f, v)),
        iterations,
        tally,
    }
}

fn search(problem: &Problem<'_>, config: &OptimizerConfig) -> Result<SharpnessResult> {
    config.validate()?;
    let outcomes: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(problem, config, r))
        .collect();

    let mut best: Option<(f64, &Vec<f64>)> = None;
    for o in &outcomes {
        if let Some((f, v)) = &o.best {
            if best.is_none_or(|(bf, _)| *f > bf) {
                best = Some((*f, v));
            }
        }
    }
    let Some((best_ratio, v)) = best else {
        return Err(Error::UndefinedResult);
    };

    let n = problem.n();
    let x = problem
        .space
        .cube_normalize(&v[..n], NULL_CUBE_EPSILON)
        .expect("best point has a defined ratio");
    let ops = problem.operators(v);
    let best_operators = ops.map(|op| match op {
        LinearOperator::Diagonal(d) => d,
        dense => (0..n).map(|i| dense.entry(i, i)).collect(),
    });
    let max_ratio_seen = outcomes
        .iter()
        .map(|o| o.tally.max_seen)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SharpnessResult {
        best_ratio,
        best_state: x.into_coords(),
        best_operators,
        restarts_used: config.restarts,
        iterations_total: outcomes.iter().map(|o| o.iterations).sum(),
        degenerate_restarts: outcomes.iter().filter(|o| o.best.is_none()).count(),
        ratio_trace: Some(
            outcomes
                .iter()
                .map(|o| o.best.as_ref().map(|b| b.0))
                .collect(),
        ),
        max_ratio_seen,
        falsification_flag: max_ratio_seen > 1.0 + FALSIFY_TOLERANCE,
        cross_check_failures: outcomes.iter().map(|o| o.tally.cross_check_failures).sum(),
        estimate: "empirical".to_string(),
    })
}

/// Maximize the ratio over cube-normalized states for fixed diagonal operators.
pub fn optimize_state(
    space: &TriProductSpace,
    a: &LinearOperator,
    b: &LinearOperator,
    c: &LinearOperator,
    config: &OptimizerConfig,
) -> Result<SharpnessResult> {
    for op in [a, b, c] {
        crate::error::check_dimension(space.dimension(), op.dimension())?;
        if !op.is_diagonal() {
            return Err(Error::Precondition(
                "sharpness search needs diagonal operators".into(),
            ));
        }
    }
    let problem = Problem {
        space,
        fixed: Some([a, b, c]),
        bounds: (0.0, 0.0),
        delta_floor: config.delta_floor,
    };
    search(&problem, config)
}

/// Maximize over the state and three diagonals with entries in `[low, high]`.
pub fn optimize_joint(
    space: &TriProductSpace,
    low: f64,
    high: f64,
    config: &OptimizerConfig,
) -> Result<SharpnessResult> {
    if !(low.is_finite() && high.is_finite() && low < high) {
        return Err(Error::Precondition(format!(
            "diagonal bounds need low < high, got [{low}, {high}]"
        )));
    }
    let problem = Problem {
        space,
        fixed: None,
        bounds: (low, high),
        delta_floor: config.delta_floor,
    };
    search(&problem, config)
}
