//! Fuzzy-concept sweep: how judged probability, alea, and episteme respond
//! when the concept itself is probabilistic.
//!
//! Positive-cluster examples keep their label with probability `p`; the probe
//! never sees `p` directly. A well-calibrated probe should push its judged
//! probability toward `p` and report the residual label noise as alea, while
//! an ensemble of logistic probes tends to stay overconfident. The pooled
//! Pearson correlation (across all fuzziness levels) makes that visible.
//!
//! Run with: cargo run --release --example fuzziness_sweep

use gpp::baselines::{fit_lpe, lpe_report, DEFAULT_LPE_MEMBERS, DEFAULT_LP_REG};
use gpp::beta_gp::{self, GppConfig};
use gpp::data::{synth_clusters, SynthConfig};
use gpp::metrics::pearson;
use gpp::uncertainty;

const KEEP_PROBS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
const OBS_SIZES: [usize; 5] = [8, 16, 32, 64, 128];
const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const DIM: usize = 8;
const SEPARATION: f64 = 6.0;
const SCALE: f64 = 0.5;
const N_QUERY: usize = 128;

fn main() -> gpp::Result<()> {
    let config = GppConfig::default();

    println!("pooled Pearson(judged, true prob) per observation count");
    println!("{:>6} {:>10} {:>10}", "n_obs", "gpp", "lpe");
    for &n_obs in &OBS_SIZES {
        let mut truth = Vec::new();
        let mut gpp_judged = Vec::new();
        let mut lpe_judged = Vec::new();
        for &keep_prob in &KEEP_PROBS {
            for &seed in &SEEDS {
                let synth = SynthConfig {
                    dim: DIM,
                    n_obs,
                    n_query: N_QUERY,
                    separation: SEPARATION,
                    scale: SCALE,
                    keep_prob,
                    seed,
                };
                let (obs_table, query_table) = synth_clusters(&synth)?;
                let obs = obs_table.to_observations()?;
                let probe = beta_gp::fit(obs.clone(), config.clone())?;
                let ens = fit_lpe(&obs, DEFAULT_LPE_MEMBERS, DEFAULT_LP_REG, seed)?;

                let latents = probe.latent_posterior(&query_table.rows)?;
                let true_probs = query_table.true_probs.as_ref().expect("synthetic truth");
                for (i, (lat, query)) in
                    latents.iter().zip(&query_table.rows).enumerate()
                {
                    truth.push(true_probs[i]);
                    gpp_judged.push(uncertainty::report(lat, &config)?.judged_probability);
                    lpe_judged.push(lpe_report(&ens, query)?.judged_probability);
                }
            }
        }
        println!(
            "{:>6} {:>10.4} {:>10.4}",
            n_obs,
            pearson(&gpp_judged, &truth)?,
            pearson(&lpe_judged, &truth)?
        );
    }

    println!();
    println!("mean alea over positive-cluster queries at n_obs = 128");
    println!("{:>6} {:>10} {:>12}", "p", "alea", "ln 2");
    for &keep_prob in &KEEP_PROBS {
        let mut aleas = Vec::new();
        for &seed in &SEEDS {
            let synth = SynthConfig {
                dim: DIM,
                n_obs: 128,
                n_query: N_QUERY,
                separation: SEPARATION,
                scale: SCALE,
                keep_prob,
                seed,
            };
            let (obs_table, query_table) = synth_clusters(&synth)?;
            let probe = beta_gp::fit(obs_table.to_observations()?, config.clone())?;
            let latents = probe.latent_posterior(&query_table.rows)?;
            let true_probs = query_table.true_probs.as_ref().expect("synthetic truth");
            for (lat, &tp) in latents.iter().zip(true_probs) {
                if tp > 0.0 {
                    aleas.push(uncertainty::report(lat, &config)?.alea);
                }
            }
        }
        let mean = aleas.iter().sum::<f64>() / aleas.len() as f64;
        println!("{:>6.2} {:>10.4} {:>12.4}", keep_prob, mean, std::f64::consts::LN_2);
    }
    Ok(())
}
