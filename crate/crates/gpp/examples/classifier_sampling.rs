//! Sample whole classifiers from the weight-space posterior and compare the
//! Monte Carlo picture with the closed-form report: the sampled classifier
//! outputs at a query should reproduce the judged probability, and their
//! spread is exactly what episteme summarizes.
//!
//! Run with: cargo run --release --example classifier_sampling

use gpp::beta_gp::{self, GppConfig, ObservationSet};
use gpp::kernel::Representation;
use gpp::logistic::sigmoid;
use gpp::uncertainty;

fn rep(values: &[f64]) -> Representation {
    Representation::new(values.to_vec()).unwrap()
}

fn main() -> gpp::Result<()> {
    let observations = ObservationSet::new(
        vec![rep(&[2.0, 1.0]), rep(&[1.5, -0.5]), rep(&[-2.0, 0.3]), rep(&[-1.8, 1.1])],
        vec![1, 1, 0, 0],
    )?;
    let config = GppConfig::default();
    let probe = beta_gp::fit(observations, config.clone())?;
    // A boundary query: the sampled classifiers should disagree visibly.
    let query = rep(&[0.2, 0.6]);

    let lat = &probe.latent_posterior(std::slice::from_ref(&query))?[0];
    let report = uncertainty::report(lat, &config)?;

    let n = 20_000;
    let weights = probe.sample_classifiers(n, 7)?;
    let outputs: Vec<f64> = weights
        .iter()
        .map(|w| probe.latent_of_weights(w, &query).map(sigmoid))
        .collect::<gpp::Result<_>>()?;
    let mc_mean = outputs.iter().sum::<f64>() / n as f64;

    println!("query latent: mean {:.4}, variance {:.4}", lat.mean, lat.variance);
    println!("judged probability (quadrature): {:.4}", report.judged_probability);
    println!("judged probability ({n} sampled classifiers): {mc_mean:.4}");

    // A histogram of the sampled classifier outputs: this is the posterior
    // over "what the classifier at this query could be", the object episteme
    // scores the concentration of.
    let mut bins = [0usize; 10];
    for &g in &outputs {
        bins[((g * 10.0) as usize).min(9)] += 1;
    }
    let peak = *bins.iter().max().unwrap();
    println!("\noutput histogram (episteme {:.3}):", report.episteme);
    for (i, count) in bins.iter().enumerate() {
        let bar = "#".repeat(count * 60 / peak);
        println!("[{:.1}, {:.1}) {bar}", i as f64 / 10.0, (i + 1) as f64 / 10.0);
    }
    Ok(())
}
