//! Beta-GP probes: prior construction, pseudo-observation encoding, and the
//! closed-form function-space and weight-space posteriors.
//!
//! A Beta(eps, eps) prior over the Bernoulli parameter `g(a)` is approximated
//! by two latent GPs `f_alpha`, `f_beta` via moment-matched log-normals, with
//! `g = sigmoid(f)` and `f = f_alpha - f_beta`. A binary observation is
//! encoded as a pair of heteroscedastic Gaussian pseudo-observations: a
//! positive label contributes target `y' = log(eps+s) - v'/2` with noise
//! variance `v' = log(1/(eps+s)+1)` on `f_alpha` and the prior-level target
//! `y'' = log(eps) - v''/2` with noise `v'' = log(1/eps+1)` on `f_beta`
//! (swapped for a negative label).
//!
//! Because both latents share the prior `GP(mu, k)` and differ only in their
//! noise diagonals, the posterior of `f` is available in closed form from two
//! Cholesky factorizations, and with the cosine kernel the whole posterior
//! collapses to a (d+1)-dimensional Gaussian over affine classifier weights.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Beta, Continuous};

use crate::error::{GppError, Result};
use crate::kernel::{self, KernelConfig, KernelNorm, Representation};
use crate::linalg::{spd_factor, SpdFactorization, DEFAULT_BASE_JITTER};
use crate::quad::DEFAULT_GH_NODES;

/// All probe hyperparameters. Defaults follow the reference experimental
/// setup: Beta(0.1, 0.1) prior, observation strength 5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GppConfig {
    /// Beta prior concentration, > 0.
    pub epsilon: f64,
    /// Observation strength s >= 1.
    pub strength: f64,
    pub kernel_norm: KernelNorm,
    /// Gauss-Hermite node count for uncertainty integrals.
    pub gh_nodes: usize,
    /// Starting jitter for kernel-matrix factorizations.
    pub base_jitter: f64,
}

impl Default for GppConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            strength: 5.0,
            kernel_norm: KernelNorm::UnitDiag,
            gh_nodes: DEFAULT_GH_NODES,
            base_jitter: DEFAULT_BASE_JITTER,
        }
    }
}

impl GppConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(GppError::InvalidInput(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.strength >= 1.0) || !self.strength.is_finite() {
            return Err(GppError::InvalidInput(format!(
                "strength must be >= 1, got {}",
                self.strength
            )));
        }
        if self.gh_nodes == 0 {
            return Err(GppError::InvalidInput("gh_nodes must be >= 1".into()));
        }
        if !(self.base_jitter > 0.0) {
            return Err(GppError::InvalidInput("base_jitter must be positive".into()));
        }
        Ok(())
    }

    pub fn kernel_config(&self) -> Result<KernelConfig> {
        KernelConfig::new(self.epsilon, self.kernel_norm)
    }

    /// Kernel scale `v = log(1/epsilon + 1)`.
    pub fn v(&self) -> f64 {
        (1.0 / self.epsilon + 1.0).ln()
    }
}

/// Constant prior mean `mu = log(eps) - v/2` of both latent GPs, chosen so
/// the prior marginal of each latent is the moment-matched log-normal.
pub fn prior_mean(cfg: &GppConfig) -> f64 {
    cfg.epsilon.ln() - cfg.v() / 2.0
}

/// Targets and noise variances of the pseudo-observations that encode a
/// binary label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoTargets {
    /// Target on the "agreeing" latent: `log(eps+s) - v'/2`.
    pub y_prime: f64,
    /// Target on the "disagreeing" latent: `log(eps) - v''/2`.
    pub y_dprime: f64,
    /// Noise variance on the agreeing latent: `log(1/(eps+s) + 1)`.
    pub v_prime: f64,
    /// Noise variance on the disagreeing latent: `log(1/eps + 1)`.
    pub v_dprime: f64,
}

pub fn pseudo_targets(cfg: &GppConfig) -> PseudoTargets {
    let v_prime = (1.0 / (cfg.epsilon + cfg.strength) + 1.0).ln();
    let v_dprime = (1.0 / cfg.epsilon + 1.0).ln();
    PseudoTargets {
        y_prime: (cfg.epsilon + cfg.strength).ln() - v_prime / 2.0,
        y_dprime: cfg.epsilon.ln() - v_dprime / 2.0,
        v_prime,
        v_dprime,
    }
}

/// Labeled representations, stored with positives before negatives.
///
/// The reordering permutation is retained so callers can map results back to
/// their original row order; posterior quantities themselves are invariant to
/// observation order.
#[derive(Debug, Clone)]
pub struct ObservationSet {
    reps: Vec<Representation>,
    labels: Vec<u8>,
    n_pos: usize,
    dim: usize,
    /// `permutation[i]` is the original index of internal row i.
    permutation: Vec<usize>,
}

impl ObservationSet {
    pub fn new(reps: Vec<Representation>, labels: Vec<u8>) -> Result<Self> {
        if reps.len() != labels.len() {
            return Err(GppError::InvalidInput(format!(
                "observation set has {} representations but {} labels",
                reps.len(),
                labels.len()
            )));
        }
        if reps.is_empty() {
            return Err(GppError::InvalidInput(
                "cannot infer dimension from an empty observation set; use ObservationSet::empty(d)"
                    .into(),
            ));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(GppError::InvalidInput("labels must be 0 or 1".into()));
        }
        let dim = reps[0].dim();
        if reps.iter().any(|r| r.dim() != dim) {
            return Err(GppError::InvalidInput(
                "observation set has inconsistent representation dimensions".into(),
            ));
        }
        let mut order: Vec<usize> = (0..reps.len()).collect();
        // Stable partition: positives first, original relative order kept.
        order.sort_by_key(|&i| labels[i] == 0);
        let n_pos = labels.iter().filter(|&&y| y == 1).count();
        let sorted_reps: Vec<Representation> = order.iter().map(|&i| reps[i].clone()).collect();
        let sorted_labels: Vec<u8> = order.iter().map(|&i| labels[i]).collect();
        Ok(Self {
            reps: sorted_reps,
            labels: sorted_labels,
            n_pos,
            dim,
            permutation: order,
        })
    }

    /// An empty observation set of known dimension; fitting it yields the
    /// pure prior probe.
    pub fn empty(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GppError::InvalidInput("dimension must be >= 1".into()));
        }
        Ok(Self {
            reps: vec![],
            labels: vec![],
            n_pos: 0,
            dim,
            permutation: vec![],
        })
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_pos(&self) -> usize {
        self.n_pos
    }

    /// Representations in internal (positives-first) order.
    pub fn reps(&self) -> &[Representation] {
        &self.reps
    }

    /// Labels in internal order.
    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// The same points with every label flipped.
    pub fn flipped(&self) -> Result<Self> {
        if self.is_empty() {
            return Self::empty(self.dim);
        }
        let labels = self.labels.iter().map(|&y| 1 - y).collect();
        Self::new(self.reps.clone(), labels)
    }
}

/// Marginal Gaussian of the latent `f(a)` at one query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentGaussian {
    pub mean: f64,
    pub variance: f64,
}

/// Precomputed posterior state of a fitted probe.
///
/// Immutable after `fit`; all query operations are read-only and safe to run
/// concurrently. The clamp counter tracks how often the posterior-variance
/// subtraction went negative in floating point and was clamped to zero.
#[derive(Debug)]
pub struct FittedProbe {
    config: GppConfig,
    observations: ObservationSet,
    chol_alpha: Option<SpdFactorization>,
    chol_beta: Option<SpdFactorization>,
    /// `K_alpha^{-1} (y_alpha - mu 1)`.
    solve_alpha: DVector<f64>,
    /// `K_beta^{-1} (y_beta - mu 1)`.
    solve_beta: DVector<f64>,
    weight_mean: DVector<f64>,
    weight_cov: DMatrix<f64>,
    clamp_count: AtomicUsize,
}

/// Fits the probe: builds the two noise-augmented kernel matrices, factorizes
/// them, caches the solve vectors, and assembles the weight-space Gaussian.
///
/// An empty observation set is legal and yields the pure prior probe
/// (`u = 0`, `Sigma = 2I`).
pub fn fit(observations: ObservationSet, config: GppConfig) -> Result<FittedProbe> {
    config.validate()?;
    let kcfg = config.kernel_config()?;
    let d = observations.dim();
    let n = observations.len();

    if n == 0 {
        return Ok(FittedProbe {
            config,
            observations,
            chol_alpha: None,
            chol_beta: None,
            solve_alpha: DVector::zeros(0),
            solve_beta: DVector::zeros(0),
            weight_mean: DVector::zeros(d + 1),
            weight_cov: DMatrix::identity(d + 1, d + 1) * 2.0,
            clamp_count: AtomicUsize::new(0),
        });
    }

    let targets = pseudo_targets(&config);
    let mu = prior_mean(&config);
    let k = kernel::kernel_matrix(observations.reps(), observations.reps(), &kcfg)?;

    let mut k_alpha = k.clone();
    let mut k_beta = k;
    let mut y_alpha = DVector::zeros(n);
    let mut y_beta = DVector::zeros(n);
    for i in 0..n {
        let positive = observations.labels()[i] == 1;
        let (na, nb, ta, tb) = if positive {
            (targets.v_prime, targets.v_dprime, targets.y_prime, targets.y_dprime)
        } else {
            (targets.v_dprime, targets.v_prime, targets.y_dprime, targets.y_prime)
        };
        k_alpha[(i, i)] += na;
        k_beta[(i, i)] += nb;
        y_alpha[i] = ta - mu;
        y_beta[i] = tb - mu;
    }

    let chol_alpha = spd_factor(&k_alpha, config.base_jitter)?;
    let chol_beta = spd_factor(&k_beta, config.base_jitter)?;
    let solve_alpha = chol_alpha.solve_vec(&y_alpha);
    let solve_beta = chol_beta.solve_vec(&y_beta);

    // Weight posterior: u = Psi (sa - sb), Sigma = 2I - Psi (Ka^-1 + Kb^-1) Psi^T.
    let psi = kernel::feature_matrix(observations.reps(), &kcfg);
    let weight_mean = &psi * (&solve_alpha - &solve_beta);
    let psi_t = psi.transpose();
    let inv_sum = chol_alpha.solve(&psi_t) + chol_beta.solve(&psi_t);
    let mut weight_cov = DMatrix::identity(d + 1, d + 1) * 2.0 - &psi * inv_sum;
    // Symmetrize away the triangular-solve round-off.
    let sym = (&weight_cov + weight_cov.transpose()) * 0.5;
    weight_cov = sym;

    Ok(FittedProbe {
        config,
        observations,
        chol_alpha: Some(chol_alpha),
        chol_beta: Some(chol_beta),
        solve_alpha,
        solve_beta,
        weight_mean,
        weight_cov,
        clamp_count: AtomicUsize::new(0),
    })
}

impl FittedProbe {
    pub fn config(&self) -> &GppConfig {
        &self.config
    }

    pub fn observations(&self) -> &ObservationSet {
        &self.observations
    }

    pub fn dim(&self) -> usize {
        self.observations.dim()
    }

    /// Number of negative-variance clamps so far across all queries.
    pub fn clamp_count(&self) -> usize {
        self.clamp_count.load(Ordering::Relaxed)
    }

    /// Jitters added to `K_alpha` and `K_beta` during factorization.
    pub fn jitters(&self) -> (f64, f64) {
        (
            self.chol_alpha.as_ref().map_or(0.0, SpdFactorization::jitter),
            self.chol_beta.as_ref().map_or(0.0, SpdFactorization::jitter),
        )
    }

    fn check_query_dims(&self, queries: &[Representation]) -> Result<()> {
        if let Some(q) = queries.iter().find(|q| q.dim() != self.dim()) {
            return Err(GppError::InvalidInput(format!(
                "query dimension {} does not match probe dimension {}",
                q.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Marginal latent posterior `N(mu_D(a), k_D(a, a))` at each query.
    pub fn latent_posterior(&self, queries: &[Representation]) -> Result<Vec<LatentGaussian>> {
        self.check_query_dims(queries)?;
        let kcfg = self.config.kernel_config()?;
        let m = queries.len();

        let prior_diag: Vec<f64> = queries
            .iter()
            .map(|q| kernel::cosine_kernel(q, q, &kcfg).map(|k| 2.0 * k))
            .collect::<Result<_>>()?;

        if self.observations.is_empty() {
            return Ok(queries
                .iter()
                .zip(prior_diag)
                .map(|(_, variance)| LatentGaussian { mean: 0.0, variance })
                .collect());
        }

        let k_q = kernel::kernel_matrix(queries, self.observations.reps(), &kcfg)?;
        let diff = &self.solve_alpha - &self.solve_beta;
        let k_q_t = k_q.transpose();
        let inv_sum = self.chol_alpha.as_ref().unwrap().solve(&k_q_t)
            + self.chol_beta.as_ref().unwrap().solve(&k_q_t);

        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            let row = k_q.row(i);
            let mean = row.transpose().dot(&diff);
            let data_term = row.transpose().dot(&inv_sum.column(i).clone_owned());
            let mut variance = prior_diag[i] - data_term;
            if variance < 0.0 {
                self.clamp_count.fetch_add(1, Ordering::Relaxed);
                variance = 0.0;
            }
            out.push(LatentGaussian { mean, variance });
        }
        Ok(out)
    }

    /// Full joint latent posterior over the queries: mean vector and
    /// covariance matrix (diagonal clamped at zero).
    pub fn latent_posterior_full(
        &self,
        queries: &[Representation],
    ) -> Result<(DVector<f64>, DMatrix<f64>)> {
        self.check_query_dims(queries)?;
        let kcfg = self.config.kernel_config()?;
        let prior = kernel::kernel_matrix(queries, queries, &kcfg)? * 2.0;

        if self.observations.is_empty() {
            return Ok((DVector::zeros(queries.len()), prior));
        }

        let k_q = kernel::kernel_matrix(queries, self.observations.reps(), &kcfg)?;
        let diff = &self.solve_alpha - &self.solve_beta;
        let mean = &k_q * diff;
        let k_q_t = k_q.transpose();
        let inv_sum = self.chol_alpha.as_ref().unwrap().solve(&k_q_t)
            + self.chol_beta.as_ref().unwrap().solve(&k_q_t);
        let mut cov = prior - &k_q * inv_sum;
        for i in 0..cov.nrows() {
            if cov[(i, i)] < 0.0 {
                self.clamp_count.fetch_add(1, Ordering::Relaxed);
                cov[(i, i)] = 0.0;
            }
        }
        Ok((mean, cov))
    }

    /// The Gaussian over classifier weights W with `f(a) = W . psi(a)`.
    pub fn weight_posterior(&self) -> (&DVector<f64>, &DMatrix<f64>) {
        (&self.weight_mean, &self.weight_cov)
    }

    /// Draws `n` i.i.d. classifier weight vectors `W ~ N(u, Sigma)` with a
    /// seeded generator; each induces the classifier `sigmoid(W . psi(a))`.
    pub fn sample_classifiers(&self, n: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
        if n == 0 {
            return Err(GppError::InvalidInput("sample count must be >= 1".into()));
        }
        let chol = spd_factor(&self.weight_cov, self.config.base_jitter)?;
        let l = chol.lower();
        let dim = self.weight_mean.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = rand_distr::StandardNormal;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let z = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(normal));
            out.push(&self.weight_mean + &l * z);
        }
        Ok(out)
    }

    /// Evaluates a sampled classifier's latent value `W . psi(a)`.
    pub fn latent_of_weights(&self, weights: &DVector<f64>, query: &Representation) -> Result<f64> {
        self.check_query_dims(std::slice::from_ref(query))?;
        let kcfg = self.config.kernel_config()?;
        Ok(weights.dot(&kernel::feature_map(query, &kcfg)))
    }
}

/// Density of the classifier output `g(a) = sigmoid(f(a))` at `y` when
/// `f(a) ~ N(mean, variance)` (the logit-normal density).
pub fn g_pdf(y: f64, lat: &LatentGaussian) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(GppError::InvalidInput(format!(
            "g_pdf requires y in (0, 1), got {y}"
        )));
    }
    if lat.variance <= 0.0 {
        return Err(GppError::DegenerateDistribution(
            "g_pdf undefined for zero latent variance".into(),
        ));
    }
    let logit = y.ln() - (1.0 - y).ln();
    let z = logit - lat.mean;
    let norm = 1.0 / (y * (1.0 - y) * (2.0 * std::f64::consts::PI * lat.variance).sqrt());
    Ok(norm * (-z * z / (2.0 * lat.variance)).exp())
}

/// The moment-matched approximation of the Beta(eps_hat, eps_hat) prior
/// density: the logit-normal with zero mean and variance `2 log(1/eps_hat + 1)`.
pub fn prior_approx_pdf(y: f64, eps_hat: f64) -> Result<f64> {
    if !(eps_hat > 0.0) {
        return Err(GppError::InvalidInput("eps_hat must be positive".into()));
    }
    g_pdf(
        y,
        &LatentGaussian {
            mean: 0.0,
            variance: 2.0 * (1.0 / eps_hat + 1.0).ln(),
        },
    )
}

/// Curve table emitted by [`prior_inspect`].
#[derive(Debug, Clone)]
pub struct PriorInspection {
    pub y: Vec<f64>,
    /// Exact Beta(eps, eps) prior density.
    pub beta_prior: Vec<f64>,
    /// Logit-normal approximation of the prior using eps_hat.
    pub approx_prior: Vec<f64>,
    /// Exact Beta(eps, eps + s) posterior after one negative observation.
    pub beta_one_negative: Vec<f64>,
    /// Probe posterior density after one negative observation.
    pub gp_one_negative: Vec<f64>,
    /// Exact Beta(eps + s, eps + s) posterior after a positive and a negative
    /// at the same point.
    pub beta_pos_neg_pair: Vec<f64>,
    /// Probe posterior density after the same pair.
    pub gp_pos_neg_pair: Vec<f64>,
}

/// Hyperparameter inspection curves: the exact Beta prior/posteriors next to
/// the probe's approximations, so epsilon, eps_hat and s can be chosen by
/// eye before committing to a fit.
pub fn prior_inspect(
    epsilon: f64,
    eps_hat: f64,
    strength: f64,
    grid: usize,
) -> Result<PriorInspection> {
    if grid < 2 {
        return Err(GppError::InvalidInput("grid must have at least 2 points".into()));
    }
    let config = GppConfig {
        epsilon,
        strength,
        ..GppConfig::default()
    };
    config.validate()?;
    if !(eps_hat > 0.0) {
        return Err(GppError::InvalidInput("eps_hat must be positive".into()));
    }

    let beta_prior = Beta::new(epsilon, epsilon)
        .map_err(|e| GppError::InvalidInput(format!("Beta({epsilon}, {epsilon}): {e}")))?;
    let beta_one_neg = Beta::new(epsilon, epsilon + strength)
        .map_err(|e| GppError::InvalidInput(format!("Beta posterior: {e}")))?;
    let beta_pair = Beta::new(epsilon + strength, epsilon + strength)
        .map_err(|e| GppError::InvalidInput(format!("Beta posterior: {e}")))?;

    // Single-point probes at an arbitrary representation; with the unit-diag
    // kernel the curves do not depend on the point chosen.
    let a0 = Representation::new(vec![0.0])?;
    let one_neg = fit(
        ObservationSet::new(vec![a0.clone()], vec![0])?,
        config,
    )?;
    let pair = fit(
        ObservationSet::new(vec![a0.clone(), a0.clone()], vec![1, 0])?,
        config,
    )?;
    let lat_one_neg = one_neg.latent_posterior(std::slice::from_ref(&a0))?[0];
    let lat_pair = pair.latent_posterior(std::slice::from_ref(&a0))?[0];

    let mut out = PriorInspection {
        y: Vec::with_capacity(grid),
        beta_prior: Vec::with_capacity(grid),
        approx_prior: Vec::with_capacity(grid),
        beta_one_negative: Vec::with_capacity(grid),
        gp_one_negative: Vec::with_capacity(grid),
        beta_pos_neg_pair: Vec::with_capacity(grid),
        gp_pos_neg_pair: Vec::with_capacity(grid),
    };
    for i in 0..grid {
        let y = (i + 1) as f64 / (grid + 1) as f64;
        out.y.push(y);
        out.beta_prior.push(beta_prior.pdf(y));
        out.approx_prior.push(prior_approx_pdf(y, eps_hat)?);
        out.beta_one_negative.push(beta_one_neg.pdf(y));
        out.gp_one_negative.push(g_pdf(y, &lat_one_neg)?);
        out.beta_pos_neg_pair.push(beta_pair.pdf(y));
        out.gp_pos_neg_pair.push(g_pdf(y, &lat_pair)?);
    }
    Ok(out)
}
