//! The three uncertainty measures and the OOD score, computed from a latent
//! marginal `f(a) ~ N(mu_D, k_D)`.
//!
//! * judged probability `E[sigmoid(f)]` — the probe's expected probability
//!   of a positive label;
//! * episteme `-H[g(a)]` — negative entropy of the classifier output
//!   distribution; bounded below (ignorance has a limit) but unbounded above;
//! * alea `E[h(sigmoid(f))]` — expected Bernoulli entropy of the label given
//!   the classifier output, in `[0, log 2]`.
//!
//! All expectations are evaluated by Gauss-Hermite quadrature; Monte Carlo
//! over sampled classifiers is kept to the test suite as an oracle.

use serde::{Deserialize, Serialize};

use crate::beta_gp::{GppConfig, LatentGaussian};
use crate::error::{GppError, Result};
use crate::logistic::{bernoulli_entropy_of_logit, sigmoid, softplus};
use crate::quad::gh_expectation;

/// Per-query uncertainty summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub judged_probability: f64,
    /// Negative classifier-output entropy in nats.
    pub episteme: f64,
    /// Expected Bernoulli entropy in nats, in [0, log 2].
    pub alea: f64,
    pub latent_mean: f64,
    pub latent_variance: f64,
    /// Negative latent variance; higher means more in-distribution.
    pub ood_score: f64,
}

/// `E[sigmoid(f)]`; a zero-variance latent degenerates to `sigmoid(mean)`.
pub fn judged_probability(lat: &LatentGaussian, cfg: &GppConfig) -> Result<f64> {
    gh_expectation(lat.mean, lat.variance, sigmoid, cfg.gh_nodes)
}

/// Negative entropy of `g(a) = sigmoid(f(a))`:
/// `-H[g] = -(H[f] - mu - 2 E[softplus(-f)])` with `H[f] = log(2 pi e k_D)/2`.
///
/// Errors on zero variance, where episteme diverges to +infinity.
pub fn episteme(lat: &LatentGaussian, cfg: &GppConfig) -> Result<f64> {
    if lat.variance <= 0.0 {
        return Err(GppError::DegenerateDistribution(
            "episteme is unbounded for zero latent variance".into(),
        ));
    }
    let h_f = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * lat.variance).ln();
    let e_softplus = gh_expectation(lat.mean, lat.variance, |f| softplus(-f), cfg.gh_nodes)?;
    let h_g = h_f - lat.mean - 2.0 * e_softplus;
    Ok(-h_g)
}

/// `E[h(sigmoid(f))]` where h is the Bernoulli entropy; degenerates to
/// `h(sigmoid(mean))` at zero variance.
pub fn alea(lat: &LatentGaussian, cfg: &GppConfig) -> Result<f64> {
    gh_expectation(lat.mean, lat.variance, bernoulli_entropy_of_logit, cfg.gh_nodes)
}

/// `-k_D(a, a)`, the computationally cheap episteme proxy used for OOD
/// detection. Label-independent: flipping every observation label leaves it
/// unchanged.
pub fn ood_score(lat: &LatentGaussian) -> f64 {
    -lat.variance
}

/// Assembles the full report for one latent marginal.
pub fn report(lat: &LatentGaussian, cfg: &GppConfig) -> Result<UncertaintyReport> {
    Ok(UncertaintyReport {
        judged_probability: judged_probability(lat, cfg)?,
        episteme: episteme(lat, cfg)?,
        alea: alea(lat, cfg)?,
        latent_mean: lat.mean,
        latent_variance: lat.variance,
        ood_score: ood_score(lat),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta_gp::{fit, ObservationSet};
    use crate::kernel::Representation;
    use crate::quad::trapezoid_expectation;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    const LN_2: f64 = std::f64::consts::LN_2;

    fn lat(mean: f64, variance: f64) -> LatentGaussian {
        LatentGaussian { mean, variance }
    }

    #[test]
    fn judged_probability_symmetry_and_limits() {
        let cfg = GppConfig::default();
        for var in [0.0, 0.3, 2.0, 8.0] {
            assert_relative_eq!(
                judged_probability(&lat(0.0, var), &cfg).unwrap(),
                0.5,
                epsilon = 1e-12
            );
        }
        assert_relative_eq!(
            judged_probability(&lat(2.0, 0.0), &cfg).unwrap(),
            sigmoid(2.0),
            epsilon = 1e-12
        );
        let oracle = trapezoid_expectation(1.5, 2.0, sigmoid, 200_001);
        assert!((judged_probability(&lat(1.5, 2.0), &cfg).unwrap() - oracle).abs() < 1e-8);
    }

    #[test]
    fn judged_probability_shrinks_toward_half_with_variance() {
        // Rationality: more latent variance pulls the judged probability
        // toward 0.5, and zero variance recovers sigmoid(mean).
        let cfg = GppConfig::default();
        let mu = 1.8;
        let mut last = sigmoid(mu);
        for var in [0.1, 0.5, 2.0, 2.0 * cfg.v(), 10.0] {
            let p = judged_probability(&lat(mu, var), &cfg).unwrap();
            assert!((p - 0.5).abs() <= (sigmoid(mu) - 0.5).abs() + 1e-12);
            assert!((p - 0.5).abs() <= (last - 0.5).abs() + 1e-12);
            last = p;
        }
    }

    #[test]
    fn alea_reference_values() {
        let cfg = GppConfig::default();
        assert_relative_eq!(alea(&lat(0.0, 0.0), &cfg).unwrap(), LN_2, epsilon = 1e-12);
        // Bernoulli entropy vanishes as the mean runs away.
        assert!(alea(&lat(40.0, 0.5), &cfg).unwrap() < 1e-9);
        assert!(alea(&lat(-40.0, 0.5), &cfg).unwrap() < 1e-9);
        let oracle = trapezoid_expectation(1.0, 0.5, bernoulli_entropy_of_logit, 200_001);
        assert!((alea(&lat(1.0, 0.5), &cfg).unwrap() - oracle).abs() < 1e-8);
    }

    #[test]
    fn alea_is_within_bernoulli_bounds() {
        let cfg = GppConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let a = alea(
                &lat(rng.gen_range(-10.0..10.0), rng.gen_range(0.0..10.0)),
                &cfg,
            )
            .unwrap();
            assert!(a >= 0.0 && a <= LN_2 + 1e-9, "alea {a} out of range");
        }
    }

    #[test]
    fn episteme_exceeds_negative_latent_entropy() {
        // H[g] < H[f] pointwise, so episteme > -H[f].
        let cfg = GppConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let l = lat(rng.gen_range(-6.0..6.0), rng.gen_range(1e-3..10.0));
            let h_f =
                0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * l.variance).ln();
            assert!(episteme(&l, &cfg).unwrap() > -h_f);
        }
    }

    #[test]
    fn episteme_matches_density_entropy_oracle() {
        // -integral p log p of the classifier-output density, by midpoint rule.
        let cfg = GppConfig::default();
        for (mu, var) in [(0.0, 2.0 * cfg.v()), (1.2, 0.7), (-2.0, 3.0), (0.0, 0.1)] {
            let l = lat(mu, var);
            let n = 2_000_000;
            let h = 1.0 / n as f64;
            let entropy: f64 = -(0..n)
                .map(|i| {
                    let y = (i as f64 + 0.5) * h;
                    let p = crate::beta_gp::g_pdf(y, &l).unwrap();
                    if p > 0.0 {
                        p * p.ln() * h
                    } else {
                        0.0
                    }
                })
                .sum::<f64>();
            let e = episteme(&l, &cfg).unwrap();
            assert!((e + entropy).abs() < 1e-5, "mu={mu} var={var}: {e} vs {}", -entropy);
        }
    }

    #[test]
    fn episteme_increases_as_variance_shrinks() {
        let cfg = GppConfig::default();
        let values: Vec<f64> = [2.0, 1.0, 0.5, 0.1]
            .iter()
            .map(|&v| episteme(&lat(0.0, v), &cfg).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
    }

    #[test]
    fn episteme_rejects_degenerate_variance() {
        assert!(matches!(
            episteme(&lat(1.0, 0.0), &GppConfig::default()),
            Err(GppError::DegenerateDistribution(_))
        ));
    }

    #[test]
    fn ood_score_is_negative_variance_and_label_free() {
        assert_eq!(ood_score(&lat(3.0, 1.5)), -1.5);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cfg = GppConfig::default();
        let reps: Vec<Representation> = (0..8)
            .map(|_| {
                Representation::new((0..3).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap()
            })
            .collect();
        let labels: Vec<u8> = (0..8).map(|_| rng.gen_range(0..2u8)).collect();
        let obs = ObservationSet::new(reps.clone(), labels).unwrap();
        let flipped = obs.flipped().unwrap();
        let q = Representation::new(vec![0.4, -0.9, 1.2]).unwrap();
        let s1 = ood_score(
            &fit(obs, cfg).unwrap().latent_posterior(std::slice::from_ref(&q)).unwrap()[0],
        );
        let s2 = ood_score(
            &fit(flipped, cfg).unwrap().latent_posterior(std::slice::from_ref(&q)).unwrap()[0],
        );
        assert!((s1 - s2).abs() < 1e-10);

        // Observing the query itself strictly raises its score over the prior.
        let prior = fit(ObservationSet::empty(3).unwrap(), cfg).unwrap();
        let prior_score =
            ood_score(&prior.latent_posterior(std::slice::from_ref(&q)).unwrap()[0]);
        let observed = fit(ObservationSet::new(vec![q.clone()], vec![1]).unwrap(), cfg).unwrap();
        let observed_score =
            ood_score(&observed.latent_posterior(std::slice::from_ref(&q)).unwrap()[0]);
        assert!(observed_score > prior_score);
    }

    #[test]
    fn report_bundles_all_measures() {
        let cfg = GppConfig::default();
        let l = lat(0.8, 1.1);
        let r = report(&l, &cfg).unwrap();
        assert_eq!(r.latent_mean, 0.8);
        assert_eq!(r.latent_variance, 1.1);
        assert_eq!(r.ood_score, -1.1);
        assert_relative_eq!(r.judged_probability, judged_probability(&l, &cfg).unwrap());
        assert!(r.judged_probability > 0.5 && r.judged_probability < 1.0);
    }
}
