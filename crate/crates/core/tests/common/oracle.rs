//! Direct-evaluation oracles. Plain loops over coordinates with no use of the
//! library's evaluation paths, so they can check them independently.

pub fn e3(w: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    (0..w.len()).map(|i| w[i] * x[i] * y[i] * z[i]).sum()
}

pub fn norm3(w: &[f64], x: &[f64]) -> f64 {
    (0..w.len())
        .map(|i| w[i] * x[i].abs().powi(3))
        .sum::<f64>()
        .cbrt()
}

pub fn normalize(w: &[f64], x: &[f64]) -> Vec<f64> {
    let s = e3(w, x, x, x);
    x.iter().map(|v| v / s.cbrt()).collect()
}

pub struct Chain {
    pub means: [f64; 3],
    pub deltas: [f64; 3],
    pub lhs: f64,
    pub amgm: f64,
    pub rhs_centered: f64,
    pub rhs_expanded: f64,
}

/// Every quantity of the chain for diagonal operators, coordinate by coordinate.
pub fn chain(w: &[f64], ops: [&[f64]; 3], x: &[f64]) -> Chain {
    let n = w.len();
    let mean = |d: &[f64]| (0..n).map(|i| w[i] * d[i] * x[i].powi(3)).sum::<f64>();
    let means = ops.map(mean);
    let centered =
        |k: usize| -> Vec<f64> { (0..n).map(|i| x[i] * (ops[k][i] - means[k])).collect() };
    let u = [centered(0), centered(1), centered(2)];
    let deltas = [norm3(w, &u[0]), norm3(w, &u[1]), norm3(w, &u[2])];
    let [a, b, c] = means;
    let (pa, pb, pc) = (ops[0], ops[1], ops[2]);
    let expanded: f64 = (0..n)
        .map(|i| {
            w[i] * x[i].powi(3)
                * (pa[i] * pb[i] * pc[i]
                    - a * pb[i] * pc[i]
                    - b * pa[i] * pc[i]
                    - c * pa[i] * pb[i])
        })
        .sum::<f64>()
        + 2.0 * a * b * c;
    Chain {
        means,
        deltas,
        lhs: deltas[0] * deltas[1] * deltas[2],
        amgm: (deltas[0] + deltas[1] + deltas[2]).powi(3) / 27.0,
        rhs_centered: e3(w, &u[0], &u[1], &u[2]).abs(),
        rhs_expanded: expanded.abs(),
    }
}

/// Exhaustive O(n^3) scan of basis triples: evaluates `<Ae_i,e_j,e_k>` and
/// friends by forming `Ae_i` (column i) and pairing basis vectors directly.
/// Returns the maximum slot discrepancy and the set of 1-based triples
/// achieving it.
pub fn exhaustive_adjoint(w: &[f64], a: &[Vec<f64>]) -> (f64, Vec<[usize; 3]>) {
    let n = w.len();
    let basis = |i: usize| -> Vec<f64> { (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect() };
    let column = |i: usize| -> Vec<f64> { (0..n).map(|r| a[r][i]).collect() };
    let mut worst = 0.0_f64;
    let mut at = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = [
                    e3(w, &column(i), &basis(j), &basis(k)),
                    e3(w, &basis(i), &column(j), &basis(k)),
                    e3(w, &basis(i), &basis(j), &column(k)),
                ];
                let d = v.iter().cloned().fold(f64::MIN, f64::max)
                    - v.iter().cloned().fold(f64::MAX, f64::min);
                if d > worst {
                    worst = d;
                    at = vec![[i + 1, j + 1, k + 1]];
                } else if d == worst && d > 0.0 {
                    at.push([i + 1, j + 1, k + 1]);
                }
            }
        }
    }
    (worst, at)
}

/// Frozen oracle outputs for the three-projection instance on unit-weight
/// R^3 at `x = (1,1,1) 3^(-1/3)`. Computed by `chain` above (see the
/// `oracle_freezes_projection_values` test) and by hand:
/// means 1/3, each centered vector has cubes (1/3)(8+1+1)/27, so every
/// uncertainty is (10/81)^(1/3); the centered triple product is
/// 3 (1/3)(2/3)(-1/3)(-1/3) = 2/27.
pub const PROJECTION_LHS: f64 = 10.0 / 81.0;
pub const PROJECTION_RHS: f64 = 2.0 / 27.0;
pub const PROJECTION_RATIO: f64 = 0.6;
