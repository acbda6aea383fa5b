//! ID-vs-OOD benchmark: the probe's posterior-variance score against MSP,
//! Mahalanobis, kNN, and an ensemble-disagreement baseline, swept over the
//! number of observations.
//!
//! Run with: cargo run --release --example ood_detection

use gpp::cli::{ood_bench, Detector, ProbeOptions};

fn main() -> gpp::Result<()> {
    let options = ProbeOptions::default();
    let obs_sizes = [8usize, 16, 32, 64, 128];

    println!("AUROC, 128 in-distribution vs 128 uniform-noise queries");
    print!("{:>6}", "n_obs");
    for d in Detector::ALL {
        print!(" {:>8}", d.name());
    }
    println!();
    for &n_obs in &obs_sizes {
        let cells = ood_bench(
            &Detector::ALL,
            n_obs,
            128,
            128,
            16,  // dim
            6.0, // separation
            0.5, // cluster scale
            0.0, // noise low
            1.0, // noise high
            &options,
        )?;
        print!("{n_obs:>6}");
        for d in Detector::ALL {
            let auroc = cells.iter().find(|c| c.detector == d).unwrap().auroc;
            print!(" {auroc:>8.4}");
        }
        println!();
    }
    Ok(())
}
