//! Sampled verification of the four 3-product axioms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::space::TriProductSpace;
use crate::tolerance::Tolerance;

/// The triple (and scalar, for homogeneity) at which an axiom was worst violated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomWitness {
    pub sample: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub w: Option<Vec<f64>>,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomOutcome {
    pub passed: bool,
    /// Largest raw deviation seen. For the Hölder axiom this is
    /// `max(|<x,y,z>| - |x||y||z|)`, which is negative when every sample has slack.
    pub worst_deviation: f64,
    pub failures: usize,
    pub witness: Option<AxiomWitness>,
}

impl AxiomOutcome {
    fn new() -> Self {
        Self {
            passed: true,
            worst_deviation: f64::NEG_INFINITY,
            failures: 0,
            witness: None,
        }
    }

    fn record(&mut self, deviation: f64, ok: bool, witness: impl FnOnce() -> AxiomWitness) {
        let worse = deviation.is_nan() || deviation > self.worst_deviation;
        if worse {
            self.worst_deviation = deviation;
        }
        if !ok {
            self.failures += 1;
            if self.passed || worse {
                self.witness = Some(witness());
            }
            self.passed = false;
        }
    }

    fn finish(mut self) -> Self {
        if self.worst_deviation == f64::NEG_INFINITY {
            self.worst_deviation = 0.0;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub label: String,
    pub samples: usize,
    pub seed: u64,
    /// Set when the budget was zero and every axiom passed vacuously.
    pub vacuous: bool,
    pub symmetry: AxiomOutcome,
    pub homogeneity: AxiomOutcome,
    pub additivity: AxiomOutcome,
    pub holder: AxiomOutcome,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.symmetry.passed
            && self.homogeneity.passed
            && self.additivity.passed
            && self.holder.passed
    }
}

fn sample_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let magnitude = 10f64.powf(rng.gen_range(-2.0..2.0));
    (0..n)
        .map(|_| magnitude * rng.gen_range(-1.0..1.0))
        .collect()
}

/// Check the axioms on `sample_budget` seeded random triples.
///
/// Symmetry is required bit-exactly; homogeneity and additivity within
/// `tol` scaled by the magnitudes involved; Hölder as
/// `|<x,y,z>| <= |x||y||z| + tol`.
pub fn check_axioms(
    space: &TriProductSpace,
    sample_budget: usize,
    seed: u64,
    tol: &Tolerance,
) -> AxiomReport {
    let n = space.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut symmetry = AxiomOutcome::new();
    let mut homogeneity = AxiomOutcome::new();
    let mut additivity = AxiomOutcome::new();
    let mut holder = AxiomOutcome::new();

    // Dimensions always match here, so eval3/norm cannot fail.
    let e3 = |x: &[f64], y: &[f64], z: &[f64]| space.eval3(x, y, z).expect("matching dimensions");
    let abs3 =
        |x: &[f64], y: &[f64], z: &[f64]| space.eval3_abs(x, y, z).expect("matching dimensions");

    for s in 0..sample_budget {
        let x = sample_vector(&mut rng, n);
        let y = sample_vector(&mut rng, n);
        let z = sample_vector(&mut rng, n);
        let w = sample_vector(&mut rng, n);
        let alpha: f64 = rng.gen_range(-10.0..10.0);
        let witness = |w: Option<&Vec<f64>>, alpha: Option<f64>| AxiomWitness {
            sample: s,
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            w: w.cloned(),
            alpha,
        };

        let base = e3(&x, &y, &z);
        let perms = [
            e3(&x, &z, &y),
            e3(&y, &x, &z),
            e3(&y, &z, &x),
            e3(&z, &x, &y),
            e3(&z, &y, &x),
        ];
        let sym_dev = perms.iter().map(|v| (v - base).abs()).fold(0.0, f64::max);
        let sym_exact = perms.iter().all(|v| v.to_bits() == base.to_bits());
        symmetry.record(sym_dev, sym_exact, || witness(None, None));

        let ax: Vec<f64> = x.iter().map(|v| alpha * v).collect();
        let hom_dev = (e3(&ax, &y, &z) - alpha * base).abs();
        let hom_scale = alpha.abs() * abs3(&x, &y, &z);
        homogeneity.record(hom_dev, hom_dev <= tol.allowance(hom_scale), || {
            witness(None, Some(alpha))
        });

        let xw: Vec<f64> = x.iter().zip(&w).map(|(a, b)| a + b).collect();
        let add_dev = (e3(&xw, &y, &z) - (base + e3(&w, &y, &z))).abs();
        let add_scale = abs3(&x, &y, &z) + abs3(&w, &y, &z) + abs3(&xw, &y, &z);
        additivity.record(add_dev, add_dev <= tol.allowance(add_scale), || {
            witness(Some(&w), None)
        });

        let bound = space.norm(&x).unwrap() * space.norm(&y).unwrap() * space.norm(&z).unwrap();
        let excess = base.abs() - bound;
        let ok = base.abs() <= bound + tol.absolute * (1.0 + bound.abs());
        holder.record(excess, ok, || witness(None, None));
    }

    AxiomReport {
        label: space.label().to_string(),
        samples: sample_budget,
        seed,
        vacuous: sample_budget == 0,
        symmetry: symmetry.finish(),
        homogeneity: homogeneity.finish(),
        additivity: additivity.finish(),
        holder: holder.finish(),
    }
}
