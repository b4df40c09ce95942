//! Gauss–Hermite rules and an adaptive tensor-product integrator over the
//! plane with weight `e^{−x²−y²}`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Nodes and weights for `∫ e^{−x²} f(x) dx ≈ Σ wᵢ f(xᵢ)`.
#[derive(Clone, Debug)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Golub–Welsch: eigen-decomposition of the Jacobi matrix of the physicists'
/// Hermite polynomials.
pub fn gauss_hermite(n: usize) -> HermiteRule {
    assert!(n >= 1, "a quadrature rule needs at least one node");
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let b = (i as f64 / 2.0).sqrt();
        jac[(i - 1, i)] = b;
        jac[(i, i - 1)] = b;
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Symmetrize: the rule is exactly symmetric about 0.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-x, w);
        pairs[j] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    HermiteRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// `∫∫ e^{−x²−y²} f(x, y) dx dy` with an `n × n` tensor rule.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(f: &F, rule: &HermiteRule) -> f64 {
    let mut acc = 0.0;
    for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
        let mut row = 0.0;
        for (y, wy) in rule.nodes.iter().zip(&rule.weights) {
            row += wy * f(*x, *y);
        }
        acc += wx * row;
    }
    acc
}

/// Settings for [`adaptive_2d`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveHermite {
    pub start_nodes: usize,
    pub max_nodes: usize,
    pub tol: f64,
}

impl Default for AdaptiveHermite {
    fn default() -> Self {
        Self {
            start_nodes: 40,
            max_nodes: 640,
            tol: 1e-8,
        }
    }
}

/// Outcome of a converged adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub nodes: usize,
    pub last_change: f64,
}

/// Doubles the node count until successive estimates differ by less than `tol`.
pub fn adaptive_2d<F: Fn(f64, f64) -> f64>(f: F, cfg: AdaptiveHermite) -> Result<Integral> {
    let mut n = cfg.start_nodes.max(2);
    let mut prev = integrate_2d(&f, &gauss_hermite(n));
    let mut change = f64::INFINITY;
    while 2 * n <= cfg.max_nodes {
        n *= 2;
        let cur = integrate_2d(&f, &gauss_hermite(n));
        change = (cur - prev).abs();
        prev = cur;
        if change < cfg.tol {
            return Ok(Integral {
                value: cur,
                nodes: n,
                last_change: change,
            });
        }
    }
    Err(Error::Quadrature {
        nodes: n,
        last_change: change,
        tolerance: cfg.tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn small_rules_match_tabulated_values() {
        let r = gauss_hermite(2);
        assert!((r.nodes[1] - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((r.weights[0] - PI.sqrt() / 2.0).abs() < 1e-14);
        let r = gauss_hermite(3);
        assert_eq!(r.nodes[1], 0.0);
        assert!((r.nodes[2] - 1.5f64.sqrt()).abs() < 1e-14);
        assert!((r.weights[1] - 2.0 * PI.sqrt() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_moments_are_exact() {
        let r = gauss_hermite(20);
        // ∫ e^{-x²} x^{2k} dx = Γ(k + 1/2)
        let mut gamma = PI.sqrt();
        for k in 0..10 {
            let got: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(2 * k)).sum();
            assert!((got - gamma).abs() < 1e-10 * gamma.max(1.0), "k={k}");
            gamma *= k as f64 + 0.5;
        }
    }

    #[test]
    fn adaptive_integrates_narrow_gaussian() {
        // ∫∫ e^{-x²-y²} e^{-9(x²+y²)} = π / 10
        let got = adaptive_2d(|x, y| (-9.0 * (x * x + y * y)).exp(), AdaptiveHermite::default()).unwrap();
        assert!((got.value - PI / 10.0).abs() < 1e-9);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let cfg = AdaptiveHermite {
            start_nodes: 4,
            max_nodes: 8,
            tol: 1e-14,
        };
        let err = adaptive_2d(|x, y| (5.0 * x).cos() * (3.0 * y).cos(), cfg).unwrap_err();
        assert!(matches!(err, Error::Quadrature { nodes: 8, .. }));
    }
}
