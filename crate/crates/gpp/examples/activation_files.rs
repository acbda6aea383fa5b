//! The file-based workflow used by the `gpp` binary: write activation CSVs,
//! run the probe command on them, and read back the per-query reports and
//! the manifest that makes the run repeatable.
//!
//! Run with: cargo run --example activation_files

use gpp::cli::{cmd_probe, Baseline, ProbeOptions, RunManifest};
use gpp::data::{synth_clusters, SynthConfig};

fn main() -> gpp::Result<()> {
    let dir = std::env::temp_dir().join("gpp-activation-files-example");
    std::fs::create_dir_all(&dir)?;

    // Any process can produce these files; the format is one `v0,...,vn` row
    // per activation with a `dim=..,label=..,trueprob=..` header line.
    let synth = SynthConfig {
        dim: 4,
        n_obs: 32,
        n_query: 8,
        separation: 5.0,
        scale: 0.7,
        keep_prob: 1.0,
        seed: 3,
    };
    let (obs, queries) = synth_clusters(&synth)?;
    let obs_path = dir.join("obs.csv");
    let query_path = dir.join("queries.csv");
    obs.save(&obs_path)?;
    queries.save(&query_path)?;

    let out = dir.join("out");
    cmd_probe(
        &obs_path,
        &query_path,
        ProbeOptions::default(),
        &[Baseline::Lp, Baseline::Knn],
        &out,
    )?;

    println!("reports (one JSON object per query):");
    for line in std::fs::read_to_string(out.join("reports.jsonl"))?.lines() {
        println!("  {line}");
    }

    let manifest = RunManifest::load(&out.join("manifest.json"))?;
    println!("\nmanifest command: {}", manifest.command);
    println!("input digests:");
    for (file, digest) in &manifest.input_digests {
        println!("  {file}: {digest}");
    }
    println!("(gpp rerun --manifest {:?} reproduces the outputs byte for byte)", out.join("manifest.json"));
    Ok(())
}
