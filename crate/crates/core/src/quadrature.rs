//! Positive-weight quadrature rules used to discretize `L^3` on an interval.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Midpoint,
    Trapezoid,
    /// Composite Simpson; needs an odd node count of at least 3.
    Simpson,
    GaussLegendre,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Midpoint => "midpoint",
            Rule::Trapezoid => "trapezoid",
            Rule::Simpson => "simpson",
            Rule::GaussLegendre => "gauss_legendre",
        }
    }
}

pub fn nodes_and_weights(rule: Rule, n: usize, lo: f64, hi: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidSpace(format!(
            "quadrature interval [{lo}, {hi}] is empty or not finite"
        )));
    }
    let len = hi - lo;
    match rule {
        Rule::Midpoint => {
            if n == 0 {
                return Err(Error::InvalidSpace("midpoint rule needs n >= 1".into()));
            }
            let h = len / n as f64;
            let t = (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect();
            Ok((t, vec![h; n]))
        }
        Rule::Trapezoid => {
            if n < 2 {
                return Err(Error::InvalidSpace("trapezoid rule needs n >= 2".into()));
            }
            let h = len / (n - 1) as f64;
            let t = (0..n).map(|i| lo + i as f64 * h).collect();
            let mut w = vec![h; n];
            w[0] = h / 2.0;
            w[n - 1] = h / 2.0;
            Ok((t, w))
        }
        Rule::Simpson => {
            if n < 3 || n.is_multiple_of(2) {
                return Err(Error::InvalidSpace(
                    "simpson rule needs an odd n >= 3".into(),
                ));
            }
            let h = len / (n - 1) as f64;
            let t = (0..n).map(|i| lo + i as f64 * h).collect();
            let w = (0..n)
                .map(|i| {
                    let c = if i == 0 || i == n - 1 {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    c * h / 3.0
                })
                .collect();
            Ok((t, w))
        }
        Rule::GaussLegendre => {
            if n == 0 {
                return Err(Error::InvalidSpace("gauss-legendre needs n >= 1".into()));
            }
            let (x, w) = gauss_legendre_reference(n);
            let half = len / 2.0;
            let mid = (lo + hi) / 2.0;
            Ok((
                x.iter().map(|v| mid + half * v).collect(),
                w.iter().map(|v| half * v).collect(),
            ))
        }
    }
}

/// Nodes (ascending) and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))`.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate(rule: Rule, n: usize, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (t, w) = nodes_and_weights(rule, n, lo, hi).unwrap();
        t.iter().zip(&w).map(|(t, w)| w * f(*t)).sum()
    }

    #[test]
    fn weights_are_positive_and_sum_to_length() {
        for rule in [
            Rule::Midpoint,
            Rule::Trapezoid,
            Rule::Simpson,
            Rule::GaussLegendre,
        ] {
            for n in [3, 5, 9, 21] {
                let (_, w) = nodes_and_weights(rule, n, -1.0, 2.0).unwrap();
                assert!(w.iter().all(|v| *v > 0.0));
                assert!((w.iter().sum::<f64>() - 3.0).abs() < 1e-13, "{rule:?} {n}");
            }
        }
    }

    #[test]
    fn exactness_degrees() {
        // simpson: cubics exact; n-point gauss: degree 2n-1 exact
        let cubic = |t: f64| t * t * t - 2.0 * t + 1.0;
        let exact = 0.25 * 16.0 - 4.0 + 2.0;
        assert!((integrate(Rule::Simpson, 5, 0.0, 2.0, cubic) - exact).abs() < 1e-13);
        let p9 = |t: f64| t.powi(9) + t.powi(8);
        let exact9 = 1.0 / 10.0 + 1.0 / 9.0;
        assert!((integrate(Rule::GaussLegendre, 5, 0.0, 1.0, p9) - exact9).abs() < 1e-14);
    }

    #[test]
    fn gauss_nodes_known_values() {
        let (x, w) = gauss_legendre_reference(2);
        let r = 1.0 / 3f64.sqrt();
        assert!((x[0] + r).abs() < 1e-15 && (x[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x3, w3) = gauss_legendre_reference(3);
        assert!(x3[1].abs() < 1e-15);
        assert!((w3[1] - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(nodes_and_weights(Rule::Simpson, 4, 0.0, 1.0).is_err());
        assert!(nodes_and_weights(Rule::Trapezoid, 1, 0.0, 1.0).is_err());
        assert!(nodes_and_weights(Rule::Midpoint, 3, 1.0, 1.0).is_err());
    }
}
