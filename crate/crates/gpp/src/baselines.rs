//! Reference probes and OOD scorers: a linear probe (LP), its bootstrap
//! ensemble (LPE), max-softmax (MSP), Mahalanobis and k-nearest-neighbor
//! scores.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::beta_gp::ObservationSet;
use crate::error::{GppError, Result};
use crate::kernel::Representation;
use crate::linalg::spd_factor;
use crate::logistic::{bernoulli_entropy, sigmoid, softplus};
use crate::uncertainty::UncertaintyReport;

/// Default L2 regularization for linear probes.
pub const DEFAULT_LP_REG: f64 = 1e-4;

/// Default ensemble size for LPE.
pub const DEFAULT_LPE_MEMBERS: usize = 100;

/// L2-regularized logistic regression on bias-augmented representations.
#[derive(Debug, Clone)]
pub struct LinearProbe {
    /// d weights followed by the bias.
    weights: DVector<f64>,
    pub iterations: usize,
    pub final_loss: f64,
    pub final_grad_norm: f64,
}

impl LinearProbe {
    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }
}

fn augmented(a: &Representation) -> DVector<f64> {
    let d = a.dim();
    let mut x = DVector::zeros(d + 1);
    x.rows_mut(0, d).copy_from(a.vector());
    x[d] = 1.0;
    x
}

/// Mean logistic NLL plus `reg/2 |w|^2`, with its gradient.
fn loss_and_grad(
    xs: &[DVector<f64>],
    ys: &[u8],
    w: &DVector<f64>,
    reg: f64,
) -> (f64, DVector<f64>) {
    let n = xs.len() as f64;
    let mut loss = 0.0;
    let mut grad = DVector::zeros(w.len());
    for (x, &y) in xs.iter().zip(ys) {
        let z = w.dot(x);
        // NLL of y under sigmoid(z): softplus(z) - y z.
        loss += softplus(z) - f64::from(y) * z;
        grad += x * (sigmoid(z) - f64::from(y));
    }
    loss = loss / n + 0.5 * reg * w.norm_squared();
    grad = grad / n + w * reg;
    (loss, grad)
}

/// Fits a linear probe by full-batch gradient descent with backtracking line
/// search (max 500 iterations, gradient-norm stop 1e-6).
///
/// Single-class data is rejected unless `allow_degenerate` is set, in which
/// case the regularizer keeps the optimum finite.
pub fn fit_lp(obs: &ObservationSet, reg: f64, allow_degenerate: bool) -> Result<LinearProbe> {
    if obs.is_empty() {
        return Err(GppError::InvalidInput("fit_lp requires at least one observation".into()));
    }
    if !(reg >= 0.0) {
        return Err(GppError::InvalidInput("regularization must be >= 0".into()));
    }
    let single_class = obs.n_pos() == 0 || obs.n_pos() == obs.len();
    if single_class && !allow_degenerate {
        return Err(GppError::InvalidInput(
            "single-class data; pass allow_degenerate to fit anyway".into(),
        ));
    }
    let xs: Vec<DVector<f64>> = obs.reps().iter().map(augmented).collect();
    let ys = obs.labels();

    let mut w = DVector::zeros(obs.dim() + 1);
    let (mut loss, mut grad) = loss_and_grad(&xs, ys, &w, reg);
    let mut iterations = 0;
    let max_iter = 500;
    while iterations < max_iter && grad.norm() > 1e-6 {
        // Backtracking line search with Armijo condition.
        let mut step = 1.0;
        let g2 = grad.norm_squared();
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = &w - &grad * step;
            let (new_loss, new_grad) = loss_and_grad(&xs, ys, &candidate, reg);
            if new_loss <= loss - 1e-4 * step * g2 {
                w = candidate;
                loss = new_loss;
                grad = new_grad;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        iterations += 1;
    }
    Ok(LinearProbe {
        final_grad_norm: grad.norm(),
        weights: w,
        iterations,
        final_loss: loss,
    })
}

/// Predicted probability of a positive label.
pub fn predict_lp(probe: &LinearProbe, a: &Representation) -> f64 {
    sigmoid(probe.weights.dot(&augmented(a)))
}

/// Bootstrap ensemble of linear probes.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<LinearProbe>,
    pub seed: u64,
}

impl Ensemble {
    pub fn members(&self) -> &[LinearProbe] {
        &self.members
    }

    pub fn predictions(&self, a: &Representation) -> Vec<f64> {
        self.members.iter().map(|m| predict_lp(m, a)).collect()
    }
}

/// Trains `n_members` probes on with-replacement resamples of size |D|.
/// Single-class resamples are kept and fit in degenerate mode, matching
/// what a real bootstrap produces at small |D|.
pub fn fit_lpe(obs: &ObservationSet, n_members: usize, reg: f64, seed: u64) -> Result<Ensemble> {
    if obs.is_empty() {
        return Err(GppError::InvalidInput("fit_lpe requires at least one observation".into()));
    }
    if n_members == 0 {
        return Err(GppError::InvalidInput("ensemble must have at least one member".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = obs.len();
    let mut members = Vec::with_capacity(n_members);
    for _ in 0..n_members {
        let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let reps: Vec<Representation> = idx.iter().map(|&i| obs.reps()[i].clone()).collect();
        let labels: Vec<u8> = idx.iter().map(|&i| obs.labels()[i]).collect();
        let resample = ObservationSet::new(reps, labels)?;
        members.push(fit_lp(&resample, reg, true)?);
    }
    Ok(Ensemble { members, seed })
}

/// Sample-based uncertainty report from the ensemble's member predictions:
/// mean prediction, mean Bernoulli entropy, histogram-estimated episteme
/// (20 bins over [0,1] with add-one smoothing), and negative prediction
/// variance as the OOD score.
pub fn lpe_report(ens: &Ensemble, a: &Representation) -> Result<UncertaintyReport> {
    if ens.members.is_empty() {
        return Err(GppError::InvalidInput("empty ensemble".into()));
    }
    let preds = ens.predictions(a);
    let n = preds.len() as f64;
    let mean = preds.iter().sum::<f64>() / n;
    let var = preds.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / n;
    let alea = preds.iter().map(|&p| bernoulli_entropy(p)).sum::<f64>() / n;

    const BINS: usize = 20;
    let width = 1.0 / BINS as f64;
    let mut counts = [0usize; BINS];
    for &p in &preds {
        let b = ((p / width) as usize).min(BINS - 1);
        counts[b] += 1;
    }
    // Differential entropy of the smoothed histogram density.
    let total = n + BINS as f64;
    let entropy: f64 = -counts
        .iter()
        .map(|&c| {
            let mass = (c as f64 + 1.0) / total;
            mass * (mass / width).ln()
        })
        .sum::<f64>();

    Ok(UncertaintyReport {
        judged_probability: mean,
        episteme: -entropy,
        alea,
        latent_mean: f64::NAN,
        latent_variance: f64::NAN,
        ood_score: -var,
    })
}

/// Maximum predicted softmax probability: `max(p, 1-p)`.
pub fn msp_score(probe: &LinearProbe, a: &Representation) -> f64 {
    let p = predict_lp(probe, a);
    p.max(1.0 - p)
}

/// Per-class Gaussian with a shared ridge-regularized covariance.
#[derive(Debug, Clone)]
pub struct GaussianClassModel {
    means: Vec<DVector<f64>>,
    chol: crate::linalg::SpdFactorization,
    pub ridge: f64,
}

/// Fits class means and a pooled within-class covariance with ridge
/// `tau = 1e-3 trace / d` (plus a tiny absolute floor so an all-duplicates
/// class cannot produce a singular matrix).
pub fn maha_fit(obs: &ObservationSet) -> Result<GaussianClassModel> {
    if obs.len() < 2 {
        return Err(GppError::InvalidInput("maha_fit requires at least 2 observations".into()));
    }
    let d = obs.dim();
    let classes: Vec<u8> = if obs.n_pos() == 0 || obs.n_pos() == obs.len() {
        vec![obs.labels()[0]]
    } else {
        vec![1, 0]
    };
    let mut means = Vec::new();
    let mut pooled = DMatrix::<f64>::zeros(d, d);
    for &c in &classes {
        let rows: Vec<&Representation> = obs
            .reps()
            .iter()
            .zip(obs.labels())
            .filter(|(_, &y)| y == c)
            .map(|(r, _)| r)
            .collect();
        let mut mean = DVector::zeros(d);
        for r in &rows {
            mean += r.vector();
        }
        mean /= rows.len() as f64;
        for r in &rows {
            let diff = r.vector() - &mean;
            pooled += &diff * diff.transpose();
        }
        means.push(mean);
    }
    pooled /= obs.len() as f64;
    let ridge = (1e-3 * pooled.trace() / d as f64).max(1e-12);
    for i in 0..d {
        pooled[(i, i)] += ridge;
    }
    let chol = spd_factor(&pooled, 0.0)?;
    Ok(GaussianClassModel { means, chol, ridge })
}

/// Negative of the smallest squared Mahalanobis distance to any class mean;
/// 0 is the maximum, attained at a class mean.
pub fn maha_score(model: &GaussianClassModel, a: &Representation) -> Result<f64> {
    if a.dim() != model.means[0].len() {
        return Err(GppError::InvalidInput("maha_score: dimension mismatch".into()));
    }
    let mut best = f64::INFINITY;
    for mean in &model.means {
        let diff = a.vector() - mean;
        let solved = model.chol.solve_vec(&diff);
        best = best.min(diff.dot(&solved));
    }
    Ok(-best)
}

/// Negative Euclidean distance to the k-th nearest observed representation.
pub fn knn_score(obs: &ObservationSet, a: &Representation, k: usize) -> Result<f64> {
    if k == 0 || k > obs.len() {
        return Err(GppError::InvalidInput(format!(
            "knn_score requires 1 <= k <= |D|, got k={k} with |D|={}",
            obs.len()
        )));
    }
    if a.dim() != obs.dim() {
        return Err(GppError::InvalidInput("knn_score: dimension mismatch".into()));
    }
    let mut dists: Vec<f64> = obs
        .reps()
        .iter()
        .map(|r| (r.vector() - a.vector()).norm())
        .collect();
    dists.sort_by(f64::total_cmp);
    Ok(-dists[k - 1])
}
