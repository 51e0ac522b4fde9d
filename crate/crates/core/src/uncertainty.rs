//! 3-means, 3-uncertainties and the three-operator inequality chain
//!
//! ```text
//! (1/27)(dA + dB + dC)^3 >= dA dB dC >= |<(ABC - aBC - bAC - cAB)x, x, x> + 2abc|
//! ```
//!
//! The right-hand side is computed twice: once from explicit operator
//! compositions ("expanded") and once from the centered vectors
//! `Ax - ax`, `Bx - bx`, `Cx - cx` ("centered"). The two agree exactly in
//! exact arithmetic when all operators are 3-self-adjoint and `<x,x,x> = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{check_3_self_adjoint, default_adjoint_tolerance, LinearOperator};
use crate::space::{StateVector, TriProductSpace};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    pub delta_c: f64,
    pub lhs_product: f64,
    pub amgm_bound: f64,
    pub rhs_expanded: f64,
    pub rhs_centered: f64,
    pub identity_deviation: f64,
    /// Sum of the absolute values of the terms of the expanded form (at least 1).
    pub scale: f64,
    pub chain_ok: bool,
    pub identity_ok: bool,
    /// Both sides of the lower bound are below the absolute floor.
    pub degenerate_tight: bool,
    pub margin: f64,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.chain_ok && self.identity_ok
    }
}

fn require_normalized(space: &TriProductSpace, x: &StateVector, tol: &Tolerance) -> Result<()> {
    if space.is_normalized(x, tol)? {
        Ok(())
    } else {
        Err(Error::NotNormalized {
            cube_sum: x.cube_sum(),
        })
    }
}

fn mean3_unchecked(space: &TriProductSpace, op: &LinearOperator, x: &[f64]) -> Result<f64> {
    space.eval3(&op.apply(x)?, x, x)
}

fn centered(space: &TriProductSpace, op: &LinearOperator, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let mean = mean3_unchecked(space, op, x)?;
    let ax = op.apply(x)?;
    Ok((mean, ax.iter().zip(x).map(|(u, v)| u - mean * v).collect()))
}

/// `<Ax, x, x>` at a cube-normalized state.
pub fn mean3(space: &TriProductSpace, op: &LinearOperator, x: &StateVector) -> Result<f64> {
    require_normalized(space, x, &Tolerance::default())?;
    mean3_unchecked(space, op, x)
}

/// `|| Ax - <Ax,x,x> x ||`.
pub fn delta3(space: &TriProductSpace, op: &LinearOperator, x: &StateVector) -> Result<f64> {
    require_normalized(space, x, &Tolerance::default())?;
    let (_, u) = centered(space, op, x)?;
    space.norm(&u)
}

/// `|<Ax - ax, Bx - bx, Cx - cx>|`.
pub fn centered_rhs(
    space: &TriProductSpace,
    a: &LinearOperator,
    b: &LinearOperator,
    c: &LinearOperator,
    x: &StateVector,
) -> Result<f64> {
    require_normalized(space, x, &Tolerance::default())?;
    let (_, u) = centered(space, a, x)?;
    let (_, v) = centered(space, b, x)?;
    let (_, w) = centered(space, c, x)?;
    Ok(space.eval3(&u, &v, &w)?.abs())
}

struct Expanded {
    value: f64,
    scale: f64,
}

fn expanded_parts(
    space: &TriProductSpace,
    a: &LinearOperator,
    b: &LinearOperator,
    c: &LinearOperator,
    x: &[f64],
) -> Result<Expanded> {
    let ma = mean3_unchecked(space, a, x)?;
    let mb = mean3_unchecked(space, b, x)?;
    let mc = mean3_unchecked(space, c, x)?;
    let bc = b.compose(c)?;
    let ac = a.compose(c)?;
    let ab = a.compose(b)?;
    let abc = a.compose(&bc)?;
    let m = LinearOperator::linear_combination(&[(1.0, &abc), (-ma, &bc), (-mb, &ac), (-mc, &ab)])?;
    let value = space.eval3(&m.apply(x)?, x, x)? + 2.0 * ma * mb * mc;

    let mag = |op: &LinearOperator| -> Result<f64> { space.eval3_abs(&op.apply(x)?, x, x) };
    let scale = mag(&abc)?
        + ma.abs() * mag(&bc)?
        + mb.abs() * mag(&ac)?
        + mc.abs() * mag(&ab)?
        + 2.0 * (ma * mb * mc).abs();
    Ok(Expanded {
        value: value.abs(),
        scale: 1.0 + scale,
    })
}

/// `|<(ABC - aBC - bAC - cAB)x, x, x> + 2abc|` through operator compositions.
pub fn expanded_rhs(
    space: &TriProductSpace,
    a: &LinearOperator,
    b: &LinearOperator,
    c: &LinearOperator,
    x: &StateVector,
) -> Result<f64> {
    require_normalized(space, x, &Tolerance::default())?;
    Ok(expanded_parts(space, a, b, c, x)?.value)
}

/// `(1/27)(dA + dB + dC)^3`.
pub fn amgm_bound(delta_a: f64, delta_b: f64, delta_c: f64) -> Result<f64> {
    if !(delta_a >= 0.0 && delta_b >= 0.0 && delta_c >= 0.0) {
        return Err(Error::Precondition(format!(
            "uncertainties must be nonnegative, got ({delta_a}, {delta_b}, {delta_c})"
        )));
    }
    Ok((delta_a + delta_b + delta_c).powi(3) / 27.0)
}

/// Every quantity of the chain, without checking the operators. Callers
/// that already know the operators are diagonal use this directly.
pub(crate) fn chain_values(
    space: &TriProductSpace,
    a: &LinearOperator,
    b: &LinearOperator,
    c: &LinearOperator,
    x: &[f64],
    tol: &Tolerance,
) -> Result<ChainReport> {
    let (ma, u) = centered(space, a, x)?;
    let (mb, v) = centered(space, b, x)?;
    let (mc, w) = centered(space, c, x)?;
    let delta_a = space.norm(&u)?;
    let delta_b = space.norm(&v)?;
    let delta_c = space.norm(&w)?;
    let lhs_product = delta_a * delta_b * delta_c;
    let amgm = amgm_bound(delta_a, delta_b, delta_c)?;
    let rhs_centered = space.eval3(&u, &v, &w)?.abs();
    let expanded = expanded_parts(space, a, b, c, x)?;
    let rhs_expanded = expanded.value;
    let identity_deviation = (rhs_expanded - rhs_centered).abs();

    let amgm_ok = amgm >= lhs_product - tol.allowance(amgm + lhs_product);
    let lower_ok = lhs_product >= rhs_expanded - tol.allowance(expanded.scale);
    let degenerate_tight = lhs_product < tol.absolute && rhs_expanded < tol.absolute;
    Ok(ChainReport {
        a: ma,
        b: mb,
        c: mc,
        delta_a,
        delta_b,
        delta_c,
        lhs_product,
        amgm_bound: amgm,
        rhs_expanded,
        rhs_centered,
        identity_deviation,
        scale: expanded.scale,
        chain_ok: degenerate_tight || (amgm_ok && lower_ok),
        identity_ok: identity_deviation <= tol.allowance(expanded.scale),
        degenerate_tight,
        margin: lhs_product - rhs_expanded,
    })
}

fn require_self_adjoint(space: &TriProductSpace, ops: [&LinearOperator; 3]) -> Result<()> {
    for (name, op) in ['A', 'B', 'C'].into_iter().zip(ops) {
        let check = check_3_self_adjoint(space, op, default_adjoint_tolerance(space, op))?;
        if let Some(witness) = check.witness {
            return Err(Error::RejectedInstance {
                operator: name,
                witness,
            });
        }
    }
    Ok(())
}

/// Evaluate the full chain at `x`, after confirming that all three
/// operators are 3-self-adjoint.
pub fn verify_chain(
    space: &TriProductSpace,
    a: &LinearOperator,
    b: &LinearOperator,
    c: &LinearOperator,
    x: &StateVector,
    tol: &Tolerance,
) -> Result<ChainReport> {
    require_self_adjoint(space, [a, b, c])?;
    require_normalized(space, x, tol)?;
    chain_values(space, a, b, c, x, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderInvariance {
    /// `<PQRx,x,x>` for ABC, ACB, BAC, BCA, CAB, CBA, then `<Ax,Bx,Cx>`.
    pub values: [f64; 7],
    pub max_deviation: f64,
    pub scale: f64,
    pub passed: bool,
}

/// Compare the seven ways of distributing three 3-self-adjoint operators
/// over the slots; they must all agree.
pub fn operator_order_invariance(
    space: &TriProductSpace,
    a: &LinearOperator,
    b: &LinearOperator,
    c: &LinearOperator,
    x: &StateVector,
    tol: &Tolerance,
) -> Result<OrderInvariance> {
    let orders = [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ];
    let mut values = [0.0; 7];
    let mut scale: f64 = 0.0;
    for (slot, [p, q, r]) in orders.into_iter().enumerate() {
        let pqr = p.compose(&q.compose(r)?)?;
        let y = pqr.apply(x)?;
        values[slot] = space.eval3(&y, x, x)?;
        scale = scale.max(space.eval3_abs(&y, x, x)?);
    }
    let (ax, bx, cx) = (a.apply(x)?, b.apply(x)?, c.apply(x)?);
    values[6] = space.eval3(&ax, &bx, &cx)?;
    scale = 1.0 + scale.max(space.eval3_abs(&ax, &bx, &cx)?);

    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_deviation = hi - lo;
    Ok(OrderInvariance {
        values,
        max_deviation,
        scale,
        passed: max_deviation <= tol.allowance(scale),
    })
}
