//! Fit a probe on a handful of labeled activations and read out the full
//! uncertainty report for a few query points: judged probability, episteme
//! (how much the probe has learned), alea (irreducible label noise), and the
//! OOD score.
//!
//! Run with: cargo run --example probe_basics

use gpp::beta_gp::{self, GppConfig, ObservationSet};
use gpp::kernel::Representation;
use gpp::uncertainty;

fn rep(values: &[f64]) -> Representation {
    Representation::new(values.to_vec()).unwrap()
}

fn main() -> gpp::Result<()> {
    // A tiny concept: "first coordinate is large".
    let observations = ObservationSet::new(
        vec![
            rep(&[3.1, 0.2]),
            rep(&[2.8, -0.4]),
            rep(&[3.4, 0.9]),
            rep(&[-3.0, 0.1]),
            rep(&[-2.7, -0.8]),
            rep(&[-3.3, 0.5]),
        ],
        vec![1, 1, 1, 0, 0, 0],
    )?;
    let config = GppConfig::default();
    let probe = beta_gp::fit(observations, config.clone())?;

    let queries = [
        ("deep inside the positive cluster", rep(&[3.0, 0.0])),
        ("deep inside the negative cluster", rep(&[-3.0, 0.0])),
        ("between the clusters", rep(&[0.0, 0.3])),
        ("far from everything", rep(&[0.5, 40.0])),
    ];

    println!(
        "{:<34} {:>8} {:>9} {:>7} {:>8}",
        "query", "judged", "episteme", "alea", "ood"
    );
    for (label, query) in &queries {
        let lat = &probe.latent_posterior(std::slice::from_ref(query))?[0];
        let report = uncertainty::report(lat, &config)?;
        println!(
            "{:<34} {:>8.3} {:>9.3} {:>7.3} {:>8.3}",
            label, report.judged_probability, report.episteme, report.alea, report.ood_score
        );
    }

    // An empty probe is the prior: judged probability 1/2 everywhere and the
    // most negative OOD score the model can produce.
    let prior_probe = beta_gp::fit(ObservationSet::empty(2)?, config.clone())?;
    let lat = &prior_probe.latent_posterior(&[rep(&[3.0, 0.0])])?[0];
    let report = uncertainty::report(lat, &config)?;
    println!(
        "\nprior (no observations): judged {:.3}, episteme {:.3}, ood {:.3}",
        report.judged_probability, report.episteme, report.ood_score
    );
    Ok(())
}
