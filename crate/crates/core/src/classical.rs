//! Two-operator reference bounds on Euclidean `R^n` with real symmetric
//! matrices: the Robertson chain and the Schrödinger covariance bound.

use serde::{Deserialize, Serialize};

use crate::error::{check_dimension, Error, Result};
use crate::operator::LinearOperator;
use crate::tolerance::Tolerance;

/// The expectation `<[A,B]h,h>` vanishes identically for real symmetric A, B.
pub const COMMUTATOR_NOTE: &str =
    "real symmetric operators: <[A,B]h,h> = <ABh,h> - <BAh,h> = 0 identically, so the commutator term carries no information";

/// Threshold for the vanishing-commutator check, relative to `1 + |<ABh,h>|`.
pub const COMMUTATOR_TOLERANCE: f64 = 1e-10;

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn euclid(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalDelta {
    pub mean: f64,
    /// `||Ah - <Ah,h>h||`.
    pub norm_form: f64,
    /// `sqrt(||Ah||^2 - <Ah,h>^2)`, argument clamped at 0 within tolerance.
    pub sqrt_form: f64,
    pub agree: bool,
}

fn check_inputs(op: &LinearOperator, h: &[f64], tol: &Tolerance) -> Result<()> {
    check_dimension(op.dimension(), h.len())?;
    let norm = euclid(h);
    if norm.is_nan() || (norm - 1.0).abs() > tol.allowance(1.0) {
        return Err(Error::Precondition(format!(
            "h is not a unit vector (|h| = {norm})"
        )));
    }
    if !op.is_symmetric(tol.allowance(op.max_abs_entry())) {
        return Err(Error::Precondition("operator is not symmetric".into()));
    }
    Ok(())
}

pub fn classical_delta(op: &LinearOperator, h: &[f64], tol: &Tolerance) -> Result<ClassicalDelta> {
    check_inputs(op, h, tol)?;
    Ok(delta_unchecked(op, h, tol))
}

fn delta_unchecked(op: &LinearOperator, h: &[f64], tol: &Tolerance) -> ClassicalDelta {
    let ah = op.apply(h).expect("checked dimension");
    let mean = dot(&ah, h);
    let centered: Vec<f64> = ah.iter().zip(h).map(|(u, v)| u - mean * v).collect();
    let norm_form = euclid(&centered);
    let sq = dot(&ah, &ah);
    let arg = sq - mean * mean;
    let slack = tol.allowance(sq);
    let sqrt_form = if arg < 0.0 && arg >= -slack {
        0.0
    } else {
        arg.sqrt()
    };
    // Compare squares: the square root amplifies rounding near zero.
    let agree = (norm_form * norm_form - sqrt_form * sqrt_form).abs() <= slack;
    ClassicalDelta {
        mean,
        norm_form,
        sqrt_form,
        agree,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalReport {
    pub delta_a: ClassicalDelta,
    pub delta_b: ClassicalDelta,
    /// `(1/2)(dA^2 + dB^2)`.
    pub half_sum_squares: f64,
    /// `(1/4)(dA + dB)^2`.
    pub quarter_square_sum: f64,
    pub product: f64,
    /// `(1/2)|<[A,B]h,h>|`.
    pub robertson_rhs: f64,
    /// One flag per `>=` in the Robertson chain, left to right.
    pub robertson_links: [bool; 3],
    /// `|<Ah,Bh> - <Ah,h><Bh,h>|`.
    pub schrodinger_rhs: f64,
    /// `(1/2) sqrt(|<[A,B]h,h>|^2 + |<{A,B}h,h> - 2<Ah,h><Bh,h>|^2)`.
    pub schrodinger_identity_form: f64,
    pub schrodinger_identity_deviation: f64,
    pub schrodinger_identity_ok: bool,
    pub schrodinger_ok: bool,
    pub schrodinger_dominates_robertson: bool,
    pub commutator_expectation: f64,
    pub commutator_vanishes: bool,
    pub note: String,
}

impl ClassicalReport {
    pub fn passed(&self) -> bool {
        self.delta_a.agree
            && self.delta_b.agree
            && self.robertson_links.iter().all(|l| *l)
            && self.schrodinger_ok
            && self.schrodinger_dominates_robertson
            && self.commutator_vanishes
            && self.schrodinger_identity_ok
    }
}

pub fn classical_verify(
    a: &LinearOperator,
    b: &LinearOperator,
    h: &[f64],
    tol: &Tolerance,
) -> Result<ClassicalReport> {
    check_inputs(a, h, tol)?;
    check_inputs(b, h, tol)?;
    let da = delta_unchecked(a, h, tol);
    let db = delta_unchecked(b, h, tol);
    let (x, y) = (da.norm_form, db.norm_form);

    let ah = a.apply(h)?;
    let bh = b.apply(h)?;
    let abh = a.compose(b)?.apply(h)?;
    let bah = b.compose(a)?.apply(h)?;
    let ab_exp = dot(&abh, h);
    let ba_exp = dot(&bah, h);
    let commutator = ab_exp - ba_exp;
    let anticommutator = ab_exp + ba_exp;

    let half_sum_squares = 0.5 * (x * x + y * y);
    let quarter_square_sum = 0.25 * (x + y).powi(2);
    let product = x * y;
    let robertson_rhs = 0.5 * commutator.abs();

    let covariance = dot(&ah, &bh) - da.mean * db.mean;
    let schrodinger_rhs = covariance.abs();
    let centered_anti = anticommutator - 2.0 * da.mean * db.mean;
    let schrodinger_identity_form =
        0.5 * (commutator * commutator + centered_anti * centered_anti).sqrt();

    let scale = half_sum_squares + ab_exp.abs() + ba_exp.abs() + (da.mean * db.mean).abs();
    let slack = tol.allowance(scale);
    let identity_deviation = (schrodinger_rhs - schrodinger_identity_form).abs();
    let robertson_links = [
        half_sum_squares >= quarter_square_sum - slack,
        quarter_square_sum >= product - slack,
        product >= robertson_rhs - slack,
    ];
    Ok(ClassicalReport {
        delta_a: da,
        delta_b: db,
        half_sum_squares,
        quarter_square_sum,
        product,
        robertson_rhs,
        robertson_links,
        schrodinger_rhs,
        schrodinger_identity_form,
        schrodinger_identity_deviation: identity_deviation,
        schrodinger_identity_ok: identity_deviation <= slack,
        schrodinger_ok: product >= schrodinger_rhs - slack,
        schrodinger_dominates_robertson: schrodinger_rhs >= robertson_rhs - slack,
        commutator_expectation: commutator,
        commutator_vanishes: commutator.abs() <= COMMUTATOR_TOLERANCE * (1.0 + ab_exp.abs()),
        note: COMMUTATOR_NOTE.to_string(),
    })
}
