//! Acceptance gate: one test per release criterion, each printing a single
//! `criterion N (<name>): PASS|FAIL` line. Tolerances and synthetic-data
//! geometry are frozen; do not loosen them to make a failing build green.

use std::f64::consts::{LN_2, PI};
use std::path::Path;
use std::time::{Duration, Instant};

use gpp::baselines::{fit_lpe, knn_score, lpe_report, DEFAULT_LPE_MEMBERS, DEFAULT_LP_REG};
use gpp::beta_gp::{self, g_pdf, prior_approx_pdf, GppConfig, LatentGaussian, ObservationSet};
use gpp::cli::{self, Detector, ProbeOptions};
use gpp::data::{synth_clusters, SynthConfig};
use gpp::kernel::Representation;
use gpp::logistic::{bernoulli_entropy_of_logit, sigmoid};
use gpp::metrics::{auroc, pearson, ScoredLabels};
use gpp::quad::trapezoid_expectation;
use gpp::uncertainty;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn criterion(number: u32, name: &str, budget: Duration, body: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    match &outcome {
        Ok(()) if elapsed <= budget => {
            println!("criterion {number} ({name}): PASS [{elapsed:.2?}]");
        }
        Ok(()) => {
            println!(
                "criterion {number} ({name}): FAIL [over budget: {elapsed:.2?} > {budget:.2?}]"
            );
            panic!("criterion {number} exceeded its runtime budget");
        }
        Err(msg) => {
            println!("criterion {number} ({name}): FAIL [{msg}]");
            panic!("criterion {number} failed: {msg}");
        }
    }
}

fn random_observations(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> ObservationSet {
    let reps = (0..n)
        .map(|_| Representation::new((0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap())
        .collect();
    let labels = (0..n).map(|i| u8::from(i % 2 == 0 && rng.gen_bool(0.8))).collect();
    ObservationSet::new(reps, labels).unwrap()
}

fn random_queries(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> Vec<Representation> {
    (0..n)
        .map(|_| Representation::new((0..dim).map(|_| rng.gen_range(-4.0..4.0)).collect()).unwrap())
        .collect()
}

#[test]
fn criterion_1_posterior_equivalence() {
    criterion(1, "posterior equivalence", Duration::from_secs(10), || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for instance in 0..100 {
            let dim = rng.gen_range(1..=16);
            let n = rng.gen_range(1..=40);
            let epsilon = [0.1, 0.5, 1.0][instance % 3];
            let strength = [1.0, 5.0, 100.0][(instance / 3) % 3];
            let config = GppConfig { epsilon, strength, ..GppConfig::default() };
            let probe = beta_gp::fit(random_observations(&mut rng, dim, n), config)
                .map_err(|e| e.to_string())?;
            let queries = random_queries(&mut rng, dim, 5);
            let latents = probe.latent_posterior(&queries).map_err(|e| e.to_string())?;
            let (u, sigma) = probe.weight_posterior();
            for (lat, q) in latents.iter().zip(&queries) {
                let psi = gpp::kernel::feature_map(
                    q,
                    &probe.config().kernel_config().map_err(|e| e.to_string())?,
                );
                let w_mean = u.dot(&psi);
                let w_var = (psi.transpose() * sigma * &psi)[(0, 0)].max(0.0);
                let scale = 1.0 + lat.mean.abs();
                if (lat.mean - w_mean).abs() / scale > 1e-8 {
                    return Err(format!(
                        "instance {instance}: mean mismatch {} vs {}",
                        lat.mean, w_mean
                    ));
                }
                let vscale = 1.0 + lat.variance.abs();
                if (lat.variance - w_var).abs() / vscale > 1e-8 {
                    return Err(format!(
                        "instance {instance}: variance mismatch {} vs {}",
                        lat.variance, w_var
                    ));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_2_density_normalization() {
    criterion(2, "density normalization", Duration::from_secs(5), || {
        // Substituting y = sigmoid(f) grades the mesh toward the density
        // spikes at the interval ends; the Jacobian y(1-y) must cancel the
        // density's change-of-variables factor for the mass to come out 1.
        let n_points = 200_000usize;
        for &mu in &[-6.0, -2.0, 0.0, 1.0, 4.0] {
            for &var in &[0.05, 0.5, 2.0, 4.79, 10.0] {
                let lat = LatentGaussian { mean: mu, variance: var };
                // sigmoid saturates to exactly 1.0 in f64 near |f| = 37; the
                // truncated Gaussian tail is ~1e-21, far below tolerance.
                let lo = (mu - 12.0 * var.sqrt()).max(-34.0);
                let hi = (mu + 12.0 * var.sqrt()).min(34.0);
                let step = (hi - lo) / n_points as f64;
                let mut mass = 0.0;
                for i in 0..n_points {
                    let f = lo + (i as f64 + 0.5) * step;
                    let y = sigmoid(f);
                    mass += g_pdf(y, &lat).map_err(|e| e.to_string())? * y * (1.0 - y) * step;
                }
                if (mass - 1.0).abs() > 1e-6 {
                    return Err(format!("mass {mass} at mu={mu}, k={var}"));
                }
            }
        }
        // The prior-predictive approximation is the same density with the
        // prior moments substituted: mean 0, variance 2*log(1/eps_hat + 1).
        for &eps_hat in &[0.1, 0.5, 1.0, 2.0] {
            let lat = LatentGaussian { mean: 0.0, variance: 2.0 * (1.0f64 / eps_hat + 1.0).ln() };
            for i in 1..100 {
                let y = i as f64 / 100.0;
                let a = prior_approx_pdf(y, eps_hat).map_err(|e| e.to_string())?;
                let b = g_pdf(y, &lat).map_err(|e| e.to_string())?;
                if (a - b).abs() > 1e-14 * (1.0 + a.abs()) {
                    return Err(format!("prior substitution mismatch at y={y}: {a} vs {b}"));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_3_quadrature_vs_oracle() {
    criterion(3, "quadrature vs oracle", Duration::from_secs(60), || {
        // Dense-grid oracle over the supported envelope.
        let config = GppConfig::default();
        for i in 0..=12 {
            let mu = -6.0 + i as f64;
            for &var in &[1e-3, 0.01, 0.1, 1.0, 4.0, 10.0] {
                let lat = LatentGaussian { mean: mu, variance: var };
                let judged =
                    uncertainty::judged_probability(&lat, &config).map_err(|e| e.to_string())?;
                let alea = uncertainty::alea(&lat, &config).map_err(|e| e.to_string())?;
                let episteme = uncertainty::episteme(&lat, &config).map_err(|e| e.to_string())?;
                let judged_o = trapezoid_expectation(mu, var, sigmoid, 200_000);
                let alea_o = trapezoid_expectation(mu, var, bernoulli_entropy_of_logit, 200_000);
                let softplus_o =
                    trapezoid_expectation(mu, var, |f| gpp::logistic::softplus(-f), 200_000);
                let episteme_o =
                    -(0.5 * (2.0 * PI * std::f64::consts::E * var).ln() - mu - 2.0 * softplus_o);
                for (name, got, want) in [
                    ("judged", judged, judged_o),
                    ("alea", alea, alea_o),
                    ("episteme", episteme, episteme_o),
                ] {
                    if (got - want).abs() > 1e-6 {
                        return Err(format!(
                            "{name} mismatch at mu={mu}, k={var}: {got} vs {want}"
                        ));
                    }
                }
            }
        }

        // Monte Carlo via sampled classifiers on fitted probes.
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let n_draws = 100_000usize;
        for probe_idx in 0..20u64 {
            let dim = rng.gen_range(2..=8);
            let n_obs = rng.gen_range(4..=20);
            let probe =
                beta_gp::fit(random_observations(&mut rng, dim, n_obs), GppConfig::default())
                    .map_err(|e| e.to_string())?;
            let query = random_queries(&mut rng, dim, 1).pop().unwrap();
            let lat =
                probe.latent_posterior(std::slice::from_ref(&query)).map_err(|e| e.to_string())?
                    [0]
                .clone();
            let report = uncertainty::report(&lat, &config).map_err(|e| e.to_string())?;

            let draws =
                probe.sample_classifiers(n_draws, 1000 + probe_idx).map_err(|e| e.to_string())?;
            let mut judged = Vec::with_capacity(n_draws);
            let mut aleas = Vec::with_capacity(n_draws);
            let mut neg_log_density = Vec::with_capacity(n_draws);
            for w in &draws {
                let f = probe.latent_of_weights(w, &query).map_err(|e| e.to_string())?;
                judged.push(sigmoid(f));
                aleas.push(bernoulli_entropy_of_logit(f));
                neg_log_density
                    .push(-g_pdf(sigmoid(f), &lat).map_err(|e| e.to_string())?.ln());
            }
            for (name, samples, want) in [
                ("judged", &judged, report.judged_probability),
                ("alea", &aleas, report.alea),
                ("episteme", &neg_log_density, -report.episteme),
            ] {
                let mean = samples.iter().sum::<f64>() / n_draws as f64;
                let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>()
                    / (n_draws - 1) as f64;
                let se = (var / n_draws as f64).sqrt();
                if (mean - want).abs() > 3.0 * se.max(1e-12) {
                    return Err(format!(
                        "probe {probe_idx} {name}: MC {mean} vs quadrature {want}, se {se}"
                    ));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_4_entropy_bounds() {
    criterion(4, "entropy bounds", Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for &epsilon in &[0.1, 0.5, 1.0] {
            let config = GppConfig { epsilon, ..GppConfig::default() };
            let v = config.v();
            let h_f_cap = 0.5 * (4.0 * PI * std::f64::consts::E * v).ln();
            for _ in 0..20 {
                let dim = rng.gen_range(1..=12);
                let n_obs = rng.gen_range(1..=30);
                let probe =
                    beta_gp::fit(random_observations(&mut rng, dim, n_obs), config.clone())
                        .map_err(|e| e.to_string())?;
                let queries = random_queries(&mut rng, dim, 10);
                for lat in probe.latent_posterior(&queries).map_err(|e| e.to_string())? {
                    if lat.variance <= 0.0 {
                        continue;
                    }
                    let h_f = 0.5 * (2.0 * PI * std::f64::consts::E * lat.variance).ln();
                    if h_f > h_f_cap + 1e-9 {
                        return Err(format!("latent entropy {h_f} above cap {h_f_cap}"));
                    }
                    let h_g = -uncertainty::episteme(&lat, &config).map_err(|e| e.to_string())?;
                    if h_g >= h_f {
                        return Err(format!("output entropy {h_g} not below latent {h_f}"));
                    }
                }
            }
        }
        Ok(())
    });
}

// Frozen fuzz-sweep geometry: chosen by pilot so that the probe's posterior
// tightens within 128 observations while the clusters stay distinguishable.
const FUZZ_DIM: usize = 8;
const FUZZ_SEPARATION: f64 = 6.0;
const FUZZ_SCALE: f64 = 0.5;
const FUZZ_N_QUERY: usize = 128;
const KEEP_PROBS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
const OBS_SIZES: [usize; 5] = [8, 16, 32, 64, 128];
const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

#[test]
fn criterion_5_fuzziness_sweep() {
    criterion(5, "fuzziness sweep", Duration::from_secs(300), || {
        let config = GppConfig::default();
        let prior = LatentGaussian { mean: 0.0, variance: 2.0 * config.v() };
        let prior_episteme = uncertainty::episteme(&prior, &config).map_err(|e| e.to_string())?;
        let ignorance_threshold = prior_episteme + 0.5;

        let mut alea_pos_128: Vec<(f64, Vec<f64>)> =
            KEEP_PROBS.iter().map(|&p| (p, Vec::new())).collect();
        for &n_obs in &OBS_SIZES {
            let mut truth = Vec::new();
            let mut gpp_judged = Vec::new();
            let mut lpe_judged = Vec::new();
            for (pi, &keep_prob) in KEEP_PROBS.iter().enumerate() {
                for &seed in &SEEDS {
                    let synth = SynthConfig {
                        dim: FUZZ_DIM,
                        n_obs,
                        n_query: FUZZ_N_QUERY,
                        separation: FUZZ_SEPARATION,
                        scale: FUZZ_SCALE,
                        keep_prob,
                        seed,
                    };
                    let (obs_table, query_table) =
                        synth_clusters(&synth).map_err(|e| e.to_string())?;
                    let obs = obs_table.to_observations().map_err(|e| e.to_string())?;
                    let probe =
                        beta_gp::fit(obs.clone(), config.clone()).map_err(|e| e.to_string())?;
                    let ens = fit_lpe(&obs, DEFAULT_LPE_MEMBERS, DEFAULT_LP_REG, seed)
                        .map_err(|e| e.to_string())?;
                    let latents =
                        probe.latent_posterior(&query_table.rows).map_err(|e| e.to_string())?;
                    let true_probs = query_table.true_probs.as_ref().unwrap();
                    for (i, (lat, q)) in latents.iter().zip(&query_table.rows).enumerate() {
                        let rep = uncertainty::report(lat, &config).map_err(|e| e.to_string())?;
                        truth.push(true_probs[i]);
                        gpp_judged.push(rep.judged_probability);
                        lpe_judged
                            .push(lpe_report(&ens, q).map_err(|e| e.to_string())?.judged_probability);
                        // (c) no confident ignorance: near-prior episteme must
                        // not come with an extreme judged probability.
                        if rep.episteme < ignorance_threshold
                            && !(0.1..=0.9).contains(&rep.judged_probability)
                        {
                            return Err(format!(
                                "confident ignorance: episteme {} < {ignorance_threshold}, judged {}",
                                rep.episteme, rep.judged_probability
                            ));
                        }
                        if n_obs == 128 && true_probs[i] > 0.0 {
                            alea_pos_128[pi].1.push(rep.alea);
                        }
                    }
                }
            }
            // (a) pooled calibration: judged probability vs true label
            // probability across all fuzziness levels.
            let r_gpp = pearson(&gpp_judged, &truth).map_err(|e| e.to_string())?;
            let r_lpe = pearson(&lpe_judged, &truth).map_err(|e| e.to_string())?;
            if n_obs >= 16 && r_gpp < r_lpe {
                return Err(format!("|D|={n_obs}: pooled pearson gpp {r_gpp} < lpe {r_lpe}"));
            }
        }
        // (b) alea over positive-cluster queries at |D| = 128.
        for (p, aleas) in &alea_pos_128 {
            let mean = aleas.iter().sum::<f64>() / aleas.len() as f64;
            if *p == 0.5 && (mean - LN_2).abs() > 0.08 {
                return Err(format!("p=0.5 alea {mean} not within 0.08 of ln 2"));
            }
            if *p == 1.0 && mean > 0.1 {
                return Err(format!("p=1.0 alea {mean} > 0.1"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_6_ood_benchmark() {
    criterion(6, "ood benchmark", Duration::from_secs(300), || {
        let options = ProbeOptions::default();
        for &n_obs in &OBS_SIZES {
            let cells = cli::ood_bench(
                &Detector::ALL,
                n_obs,
                128,
                128,
                16,
                6.0,
                0.5,
                0.0,
                1.0,
                &options,
            )
            .map_err(|e| e.to_string())?;
            let score = |d: Detector| {
                cells.iter().find(|c| c.detector == d).map(|c| c.auroc).unwrap_or(f64::NAN)
            };
            let gpp_auroc = score(Detector::Gpp);
            let best = [Detector::Msp, Detector::Maha, Detector::Knn, Detector::Lpe]
                .into_iter()
                .map(score)
                .fold(f64::NEG_INFINITY, f64::max);
            if n_obs >= 32 && gpp_auroc < 0.95 {
                return Err(format!("|D|={n_obs}: gpp auroc {gpp_auroc} < 0.95"));
            }
            if gpp_auroc < best - 0.05 {
                return Err(format!(
                    "|D|={n_obs}: gpp auroc {gpp_auroc} more than 0.05 below best {best}"
                ));
            }
            // Frozen regression floor from the pilot run (seed 0 minimum was
            // 0.9947 across all observation counts).
            if gpp_auroc < 0.98 {
                return Err(format!("|D|={n_obs}: gpp auroc {gpp_auroc} below frozen floor 0.98"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_7_algebraic_invariants() {
    criterion(7, "algebraic invariants", Duration::from_secs(60), || {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let config = GppConfig::default();
        for trial in 0..25 {
            let dim = rng.gen_range(1..=10);
            let n = rng.gen_range(2..=24);
            let obs = random_observations(&mut rng, dim, n);
            let queries = random_queries(&mut rng, dim, 6);
            let probe =
                beta_gp::fit(obs.clone(), config.clone()).map_err(|e| e.to_string())?;
            let latents = probe.latent_posterior(&queries).map_err(|e| e.to_string())?;

            // Label-flip antisymmetry of the posterior mean; variance is
            // shared because K_alpha and K_beta swap roles.
            let flipped = beta_gp::fit(obs.flipped().map_err(|e| e.to_string())?, config.clone())
                .map_err(|e| e.to_string())?;
            for (a, b) in latents
                .iter()
                .zip(flipped.latent_posterior(&queries).map_err(|e| e.to_string())?)
            {
                if (a.mean + b.mean).abs() > 1e-8 * (1.0 + a.mean.abs()) {
                    return Err(format!("trial {trial}: flip mean {} vs {}", a.mean, b.mean));
                }
                if (a.variance - b.variance).abs() > 1e-8 * (1.0 + a.variance) {
                    return Err(format!("trial {trial}: flip variance mismatch"));
                }
            }

            // Permutation invariance of the fitted posterior.
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            let permuted = ObservationSet::new(
                order.iter().map(|&i| obs.reps()[i].clone()).collect(),
                order.iter().map(|&i| obs.labels()[i]).collect(),
            )
            .map_err(|e| e.to_string())?;
            let probe_p =
                beta_gp::fit(permuted, config.clone()).map_err(|e| e.to_string())?;
            for (a, b) in latents
                .iter()
                .zip(probe_p.latent_posterior(&queries).map_err(|e| e.to_string())?)
            {
                if (a.mean - b.mean).abs() > 1e-8 * (1.0 + a.mean.abs())
                    || (a.variance - b.variance).abs() > 1e-8 * (1.0 + a.variance)
                {
                    return Err(format!("trial {trial}: permutation changed the posterior"));
                }
            }

            // Adding an observation never increases posterior variance.
            let extra_rep = random_queries(&mut rng, dim, 1).pop().unwrap();
            let mut reps = obs.reps().to_vec();
            let mut labels = obs.labels().to_vec();
            reps.push(extra_rep);
            labels.push(rng.gen_range(0..=1));
            let bigger = beta_gp::fit(
                ObservationSet::new(reps, labels).map_err(|e| e.to_string())?,
                config.clone(),
            )
            .map_err(|e| e.to_string())?;
            for (a, b) in latents
                .iter()
                .zip(bigger.latent_posterior(&queries).map_err(|e| e.to_string())?)
            {
                if b.variance > a.variance + 1e-7 {
                    return Err(format!(
                        "trial {trial}: variance grew {} -> {}",
                        a.variance, b.variance
                    ));
                }
            }
        }

        // AUROC against the O(n^2) pairwise definition.
        for trial in 0..20 {
            let n = rng.gen_range(4..=60);
            let scores: Vec<f64> =
                (0..n).map(|_| (rng.gen_range(0.0..1.0) * 8.0f64).round() / 8.0).collect();
            let labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
            if !labels.contains(&0) || !labels.contains(&1) {
                continue;
            }
            let fast = auroc(&ScoredLabels::new(scores.clone(), labels.clone()).unwrap())
                .map_err(|e| e.to_string())?;
            let (mut wins, mut pairs) = (0.0, 0.0);
            for (i, &si) in scores.iter().enumerate() {
                for (j, &sj) in scores.iter().enumerate() {
                    if labels[i] == 1 && labels[j] == 0 {
                        pairs += 1.0;
                        wins += if si > sj {
                            1.0
                        } else if si == sj {
                            0.5
                        } else {
                            0.0
                        };
                    }
                }
            }
            if (fast - wins / pairs).abs() > 1e-12 {
                return Err(format!("trial {trial}: auroc {fast} vs pairwise {}", wins / pairs));
            }
        }

        // kNN score against a brute-force scan.
        for _ in 0..10 {
            let dim = rng.gen_range(1..=6);
            let n = rng.gen_range(3..=30);
            let obs = random_observations(&mut rng, dim, n);
            let q = random_queries(&mut rng, dim, 1).pop().unwrap();
            let k = rng.gen_range(1..=n);
            let fast = knn_score(&obs, &q, k).map_err(|e| e.to_string())?;
            let mut dists: Vec<f64> = obs
                .reps()
                .iter()
                .map(|r| {
                    r.as_slice()
                        .iter()
                        .zip(q.as_slice())
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect();
            dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if (fast + dists[k - 1]).abs() > 1e-12 {
                return Err(format!("knn {fast} vs brute {}", -dists[k - 1]));
            }
        }
        Ok(())
    });
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    entries.sort();
    entries
}

#[test]
fn criterion_8_manifest_determinism() {
    criterion(8, "manifest determinism", Duration::from_secs(120), || {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let options = ProbeOptions { seed: 9, ..ProbeOptions::default() };

        // probe: real activation files round-tripped through the CSV format.
        let synth = SynthConfig {
            dim: 6,
            n_obs: 24,
            n_query: 16,
            separation: 5.0,
            scale: 0.8,
            keep_prob: 0.75,
            seed: 9,
        };
        let (obs, queries) = synth_clusters(&synth).map_err(|e| e.to_string())?;
        let obs_path = tmp.path().join("obs.csv");
        let query_path = tmp.path().join("queries.csv");
        obs.save(&obs_path).map_err(|e| e.to_string())?;
        queries.save(&query_path).map_err(|e| e.to_string())?;

        let runs: Vec<(&str, Box<dyn Fn(&Path) -> gpp::Result<()>>)> = vec![
            (
                "probe",
                Box::new(move |out: &Path| {
                    cli::cmd_probe(
                        &obs_path,
                        &query_path,
                        options.clone(),
                        &[cli::Baseline::Lp, cli::Baseline::Lpe, cli::Baseline::Knn],
                        out,
                    )
                }),
            ),
            (
                "fuzz_sweep",
                Box::new(move |out: &Path| {
                    cli::cmd_fuzz_sweep(
                        &[0.5, 1.0],
                        &[8, 16],
                        &[0, 1],
                        32,
                        4,
                        5.0,
                        0.8,
                        ProbeOptions { seed: 9, ..ProbeOptions::default() },
                        out,
                    )
                }),
            ),
            (
                "ood",
                Box::new(move |out: &Path| {
                    cli::cmd_ood(
                        &Detector::ALL,
                        &[8, 16],
                        32,
                        32,
                        6,
                        5.0,
                        0.8,
                        0.0,
                        1.0,
                        ProbeOptions { seed: 9, ..ProbeOptions::default() },
                        out,
                    )
                }),
            ),
        ];
        for (name, run) in runs {
            let first = tmp.path().join(format!("{name}-first"));
            let second = tmp.path().join(format!("{name}-second"));
            run(&first).map_err(|e| format!("{name}: {e}"))?;
            cli::cmd_rerun(&first.join("manifest.json"), &second)
                .map_err(|e| format!("{name} rerun: {e}"))?;
            let a = read_tree(&first);
            let b = read_tree(&second);
            if a != b {
                return Err(format!("{name}: rerun outputs differ"));
            }
        }
        Ok(())
    });
}
