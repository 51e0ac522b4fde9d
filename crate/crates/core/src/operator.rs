//! Real linear operators on a pointwise space, and the 3-self-adjointness check.

use serde::{Deserialize, Serialize};

use crate::error::{check_dimension, Error, Result, SelfAdjointnessWitness};
use crate::space::TriProductSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearOperator {
    /// Multiplier `x -> (a_i x_i)`.
    Diagonal(Vec<f64>),
    /// Row-major `n x n` matrix.
    Dense { n: usize, entries: Vec<f64> },
}

impl LinearOperator {
    pub fn diagonal(entries: Vec<f64>) -> Self {
        LinearOperator::Diagonal(entries)
    }

    pub fn identity(n: usize) -> Self {
        LinearOperator::Diagonal(vec![1.0; n])
    }

    pub fn zero(n: usize) -> Self {
        LinearOperator::Diagonal(vec![0.0; n])
    }

    pub fn dense(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Precondition(
                "dense operator needs at least one row".into(),
            ));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            check_dimension(n, row.len())?;
            entries.extend(row);
        }
        Ok(LinearOperator::Dense { n, entries })
    }

    pub fn dimension(&self) -> usize {
        match self {
            LinearOperator::Diagonal(d) => d.len(),
            LinearOperator::Dense { n, .. } => *n,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, LinearOperator::Diagonal(_))
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match self {
            LinearOperator::Diagonal(d) => {
                if i == j {
                    d[i]
                } else {
                    0.0
                }
            }
            LinearOperator::Dense { n, entries } => entries[i * n + j],
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        let v = match self {
            LinearOperator::Diagonal(d) => d,
            LinearOperator::Dense { entries, .. } => entries,
        };
        v.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
    }

    pub fn to_dense(&self) -> LinearOperator {
        match self {
            LinearOperator::Dense { .. } => self.clone(),
            LinearOperator::Diagonal(d) => {
                let n = d.len();
                let mut entries = vec![0.0; n * n];
                for (i, a) in d.iter().enumerate() {
                    entries[i * n + i] = *a;
                }
                LinearOperator::Dense { n, entries }
            }
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dimension(self.dimension(), x.len())?;
        Ok(match self {
            LinearOperator::Diagonal(d) => d.iter().zip(x).map(|(a, v)| a * v).collect(),
            LinearOperator::Dense { n, entries } => entries
                .chunks_exact(*n)
                .map(|row| row.iter().zip(x).map(|(a, v)| a * v).sum())
                .collect(),
        })
    }

    /// `x -> self(other(x))`.
    pub fn compose(&self, other: &LinearOperator) -> Result<LinearOperator> {
        let n = self.dimension();
        check_dimension(n, other.dimension())?;
        if let (LinearOperator::Diagonal(a), LinearOperator::Diagonal(b)) = (self, other) {
            return Ok(LinearOperator::Diagonal(
                a.iter().zip(b).map(|(x, y)| x * y).collect(),
            ));
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = (0..n).map(|k| self.entry(i, k) * other.entry(k, j)).sum();
            }
        }
        Ok(LinearOperator::Dense { n, entries })
    }

    /// `sum_k c_k T_k`; stays diagonal when every term is diagonal.
    pub fn linear_combination(terms: &[(f64, &LinearOperator)]) -> Result<LinearOperator> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::Precondition("empty linear combination".into()));
        };
        let n = first.dimension();
        for (_, t) in terms {
            check_dimension(n, t.dimension())?;
        }
        if terms.iter().all(|(_, t)| t.is_diagonal()) {
            let mut d = vec![0.0; n];
            for (c, t) in terms {
                for (i, slot) in d.iter_mut().enumerate() {
                    *slot += c * t.entry(i, i);
                }
            }
            return Ok(LinearOperator::Diagonal(d));
        }
        let mut entries = vec![0.0; n * n];
        for (c, t) in terms {
            for i in 0..n {
                for j in 0..n {
                    entries[i * n + j] += c * t.entry(i, j);
                }
            }
        }
        Ok(LinearOperator::Dense { n, entries })
    }

    /// `self + mu I`.
    pub fn shifted(&self, mu: f64) -> LinearOperator {
        let n = self.dimension();
        LinearOperator::linear_combination(&[(1.0, self), (mu, &LinearOperator::identity(n))])
            .expect("same dimension")
    }

    pub fn scaled(&self, lambda: f64) -> LinearOperator {
        LinearOperator::linear_combination(&[(lambda, self)]).expect("non-empty")
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.dimension();
        (0..n).all(|i| (0..i).all(|j| (self.entry(i, j) - self.entry(j, i)).abs() <= tol))
    }
}

/// Default witness threshold `1e-10 (1 + max|A_ij| max w_i)`.
pub fn default_adjoint_tolerance(space: &TriProductSpace, op: &LinearOperator) -> f64 {
    1e-10 * (1.0 + op.max_abs_entry() * space.max_weight())
}

/// The three slot values at basis triple `(i, j, k)` (0-based) in closed form:
/// `<Ae_i,e_j,e_k> = w_j A_ji [j=k]`, `<e_i,Ae_j,e_k> = w_i A_ij [i=k]`,
/// `<e_i,e_j,Ae_k> = w_i A_ik [i=j]`.
pub fn basis_slot_values(
    space: &TriProductSpace,
    op: &LinearOperator,
    i: usize,
    j: usize,
    k: usize,
) -> [f64; 3] {
    let w = space.weights();
    let delta = |p: usize, q: usize| if p == q { 1.0 } else { 0.0 };
    [
        w[j] * op.entry(j, i) * delta(j, k),
        w[i] * op.entry(i, j) * delta(i, k),
        w[i] * op.entry(i, k) * delta(i, j),
    ]
}

fn spread(v: &[f64; 3]) -> f64 {
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    hi - lo
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfAdjointness {
    pub passed: bool,
    pub tolerance: f64,
    /// Worst basis triple; present exactly when its discrepancy exceeds the tolerance.
    pub witness: Option<SelfAdjointnessWitness>,
}

/// Decide 3-self-adjointness over every basis triple.
///
/// On a pointwise form the only triples with unequal slot values are the
/// ones with exactly two equal indices, and the discrepancy there is
/// `|w_r A_rs|` for an off-diagonal entry `(r, s)`. The scan is therefore
/// `O(n^2)`: the worst entry (first in row-major order on ties) yields the
/// witness `(s, r, r)`.
pub fn check_3_self_adjoint(
    space: &TriProductSpace,
    op: &LinearOperator,
    tol: f64,
) -> Result<SelfAdjointness> {
    let n = space.dimension();
    check_dimension(n, op.dimension())?;
    let mut worst: Option<(f64, usize, usize)> = None;
    if !op.is_diagonal() {
        for r in 0..n {
            for s in 0..n {
                if r == s {
                    continue;
                }
                let d = (space.weights()[r] * op.entry(r, s)).abs();
                // NaN entries count as failures.
                let d = if d.is_nan() { f64::INFINITY } else { d };
                if worst.is_none_or(|(m, _, _)| d > m) {
                    worst = Some((d, r, s));
                }
            }
        }
    }
    let witness = match worst {
        Some((d, r, s)) if d > tol => {
            let values = basis_slot_values(space, op, s, r, r);
            Some(SelfAdjointnessWitness {
                triple: [s + 1, r + 1, r + 1],
                discrepancy: spread(&values),
                values,
            })
        }
        _ => None,
    };
    Ok(SelfAdjointness {
        passed: witness.is_none(),
        tolerance: tol,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap() -> LinearOperator {
        LinearOperator::dense(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(
            LinearOperator::identity(3)
                .apply(&[1.5, -2.0, 0.25])
                .unwrap(),
            vec![1.5, -2.0, 0.25]
        );
        assert_eq!(
            LinearOperator::diagonal(vec![2.0, 3.0])
                .apply(&[1.0, 1.0])
                .unwrap(),
            vec![2.0, 3.0]
        );
        assert_eq!(swap().apply(&[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
        assert!(swap().apply(&[1.0]).is_err());
    }

    #[test]
    fn diagonal_on_basis_vector_is_exact() {
        let a = LinearOperator::diagonal(vec![0.1, -7.3, 1e300]);
        for i in 0..3 {
            let mut e = vec![0.0; 3];
            e[i] = 1.0;
            let mut want = vec![0.0; 3];
            want[i] = a.entry(i, i);
            assert_eq!(a.apply(&e).unwrap(), want);
        }
    }

    #[test]
    fn compose_examples() {
        let c = LinearOperator::diagonal(vec![1.0, 2.0])
            .compose(&LinearOperator::diagonal(vec![3.0, -4.0]))
            .unwrap();
        assert_eq!(c, LinearOperator::diagonal(vec![3.0, -8.0]));

        let a = LinearOperator::dense(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(a.compose(&LinearOperator::identity(2)).unwrap(), a);
        assert_eq!(
            swap().compose(&swap()).unwrap(),
            LinearOperator::identity(2).to_dense()
        );
        assert!(a.compose(&LinearOperator::identity(3)).is_err());
    }

    #[test]
    fn swap_is_rejected_with_known_witness() {
        let s = TriProductSpace::unit(2).unwrap();
        let r = check_3_self_adjoint(&s, &swap(), 1e-10).unwrap();
        assert!(!r.passed);
        let w = r.witness.unwrap();
        assert_eq!(w.triple, [2, 1, 1]);
        assert_eq!(w.values, [1.0, 0.0, 0.0]);
        assert_eq!(w.discrepancy, 1.0);
    }

    #[test]
    fn diagonal_and_zero_pass() {
        let s = TriProductSpace::pointwise(vec![0.5, 2.0, 3.0]).unwrap();
        for op in [
            LinearOperator::diagonal(vec![1.0, -2.0, 5.0]),
            LinearOperator::zero(3),
            LinearOperator::diagonal(vec![1.0, -2.0, 5.0]).to_dense(),
        ] {
            let r = check_3_self_adjoint(&s, &op, default_adjoint_tolerance(&s, &op)).unwrap();
            assert!(r.passed && r.witness.is_none());
        }
    }

    #[test]
    fn witness_weight_enters_discrepancy() {
        let s = TriProductSpace::pointwise(vec![1.0, 4.0, 1.0]).unwrap();
        let mut entries = vec![0.0; 9];
        entries[3 + 2] = 0.5; // A_{23} (1-based), weight w_2 = 4
        entries[1] = 1.5; // A_{12}, weight w_1 = 1
        let op = LinearOperator::Dense { n: 3, entries };
        let w = check_3_self_adjoint(&s, &op, 1e-10)
            .unwrap()
            .witness
            .unwrap();
        assert_eq!(w.triple, [3, 2, 2]);
        assert_eq!(w.discrepancy, 2.0);
    }

    #[test]
    fn linear_combination_and_shift() {
        let a = LinearOperator::diagonal(vec![1.0, 2.0]);
        assert_eq!(a.shifted(1.0), LinearOperator::diagonal(vec![2.0, 3.0]));
        assert_eq!(a.scaled(-2.0), LinearOperator::diagonal(vec![-2.0, -4.0]));
        let m = LinearOperator::linear_combination(&[(1.0, &a), (2.0, &swap())]).unwrap();
        assert_eq!(
            m,
            LinearOperator::dense(vec![vec![1.0, 2.0], vec![2.0, 2.0]]).unwrap()
        );
    }
}
