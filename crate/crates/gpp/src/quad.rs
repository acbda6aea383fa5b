//! Gauss-Hermite quadrature for Gaussian expectations.
//!
//! Logistic-Gaussian integrals (expected sigmoid, expected Bernoulli entropy,
//! the softplus term in the classifier entropy) have no closed form; a
//! 64-node rule resolves them to well below 1e-8 over the (mean, variance)
//! ranges that arise here.
//!
//! Nodes and weights come from the Golub-Welsch eigendecomposition of the
//! Jacobi matrix for physicists' Hermite polynomials; rules are computed once
//! per node count and cached.

use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::Arc;

use nalgebra::DMatrix;
use once_cell::sync::Lazy;

use crate::error::{GppError, Result};

/// Default node count used throughout the crate.
pub const DEFAULT_GH_NODES: usize = 64;

#[derive(Debug)]
struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

static RULES: Lazy<Mutex<HashMap<usize, Arc<Rule>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn rule(n: usize) -> Arc<Rule> {
    let mut cache = RULES.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(compute_rule(n)))
        .clone()
}

fn compute_rule(n: usize) -> Rule {
    // Jacobi matrix for Hermite: zero diagonal, off-diagonal sqrt(i/2).
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let b = (i as f64 / 2.0).sqrt();
        jacobi[(i, i - 1)] = b;
        jacobi[(i - 1, i)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let node = eig.eigenvalues[j];
            let first = eig.eigenvectors[(0, j)];
            (node, sqrt_pi * first * first)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Gauss-Hermite estimate of `E[fn(Z)]` for `Z ~ N(mu, var)`.
///
/// Exact for polynomials of degree < 2 * nodes. `var = 0` returns `fn(mu)`
/// directly.
pub fn gh_expectation<F: Fn(f64) -> f64>(mu: f64, var: f64, f: F, nodes: usize) -> Result<f64> {
    if !(var >= 0.0) || !mu.is_finite() || !var.is_finite() {
        return Err(GppError::InvalidInput(format!(
            "gh_expectation requires finite mu and var >= 0, got mu={mu}, var={var}"
        )));
    }
    if nodes == 0 {
        return Err(GppError::InvalidInput("gh_expectation: nodes must be >= 1".into()));
    }
    if var == 0.0 {
        let y = f(mu);
        if !y.is_finite() {
            return Err(GppError::NumericalFailure(
                "integrand non-finite at the degenerate point".into(),
            ));
        }
        return Ok(y);
    }
    let r = rule(nodes);
    let sd = (2.0 * var).sqrt();
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    let mut acc = 0.0;
    for (&x, &w) in r.nodes.iter().zip(&r.weights) {
        let y = f(mu + sd * x);
        if !y.is_finite() {
            return Err(GppError::NumericalFailure(format!(
                "integrand non-finite at quadrature node z = {}",
                mu + sd * x
            )));
        }
        acc += w * y;
    }
    Ok(acc * inv_sqrt_pi)
}

/// Dense trapezoid integration of `E[fn(Z)]` over mu +/- 10 sd.
///
/// Slow but independent of the Gauss-Hermite path; used as an oracle in
/// tests and exposed for the acceptance suite.
pub fn trapezoid_expectation<F: Fn(f64) -> f64>(mu: f64, var: f64, f: F, points: usize) -> f64 {
    if var == 0.0 {
        return f(mu);
    }
    let sd = var.sqrt();
    let lo = mu - 10.0 * sd;
    let hi = mu + 10.0 * sd;
    let h = (hi - lo) / (points - 1) as f64;
    let density = |z: f64| {
        let t = (z - mu) / sd;
        (-0.5 * t * t).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
    };
    let mut acc = 0.0;
    for i in 0..points {
        let z = lo + i as f64 * h;
        let w = if i == 0 || i == points - 1 { 0.5 } else { 1.0 };
        acc += w * f(z) * density(z);
    }
    acc * h
}
