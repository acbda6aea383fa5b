//! Thin command-line front end over `gpp::cli`.
//!
//! Exit status: 0 on success, 2 on usage/input errors, 3 on numerical
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gpp::cli::{self, Baseline, Detector, ProbeOptions};
use gpp::kernel::KernelNorm;
use gpp::GppError;

#[derive(Parser)]
#[command(name = "gpp", version, about = "Gaussian process probes over activation files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Beta prior concentration.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Observation strength s >= 1.
    #[arg(long, default_value_t = 5.0)]
    strength: f64,
    /// Kernel normalization: unit-diag or eq4.
    #[arg(long, default_value = "unit-diag")]
    kernel_norm: KernelNorm,
    /// Gauss-Hermite node count.
    #[arg(long, default_value_t = 64)]
    gh_nodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "gpp-out")]
    out: PathBuf,
}

impl CommonOpts {
    fn probe_options(&self) -> ProbeOptions {
        ProbeOptions {
            epsilon: self.epsilon,
            strength: self.strength,
            kernel_norm: self.kernel_norm,
            gh_nodes: self.gh_nodes,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit a probe on an observation file and report uncertainty per query.
    Probe {
        /// Observation activation file (CSV with labels).
        #[arg(long)]
        obs: PathBuf,
        /// Query activation file (CSV).
        #[arg(long)]
        queries: PathBuf,
        /// Comma-separated baseline columns: lp,lpe,msp,maha,knn.
        #[arg(long, value_delimiter = ',')]
        baselines: Vec<Baseline>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Sweep concept fuzziness (label keep probability) against observation
    /// count on synthetic two-cluster data.
    FuzzSweep {
        /// Ground-truth label keep probabilities.
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.75, 1.0])]
        keep_probs: Vec<f64>,
        /// Observation set sizes.
        #[arg(long, value_delimiter = ',', default_values_t = [8, 16, 32, 64, 128])]
        obs_sizes: Vec<usize>,
        /// Seeds; one sweep per seed.
        #[arg(long, value_delimiter = ',', default_values_t = [0, 1, 2, 3, 4])]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 128)]
        n_query: usize,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 6.0)]
        separation: f64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// ID-vs-OOD detection benchmark over an observation-size sweep.
    Ood {
        /// Comma-separated detectors: gpp,msp,maha,knn,lpe.
        #[arg(long, value_delimiter = ',')]
        detectors: Vec<Detector>,
        #[arg(long, value_delimiter = ',', default_values_t = [8, 16, 32, 64, 128])]
        obs_sizes: Vec<usize>,
        #[arg(long, default_value_t = 128)]
        n_id: usize,
        #[arg(long, default_value_t = 128)]
        n_ood: usize,
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long, default_value_t = 6.0)]
        separation: f64,
        #[arg(long, default_value_t = 0.5)]
        scale: f64,
        #[arg(long, default_value_t = 0.0)]
        noise_low: f64,
        #[arg(long, default_value_t = 1.0)]
        noise_high: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Emit prior/posterior inspection curves for choosing epsilon and s.
    PriorInspect {
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Moment-matching concentration for the approximation curve.
        #[arg(long)]
        eps_hat: Option<f64>,
        #[arg(long, default_value_t = 5.0)]
        strength: f64,
        #[arg(long, default_value_t = 199)]
        grid: usize,
        #[arg(long, default_value = "gpp-out")]
        out: PathBuf,
    },
    /// Re-execute the command recorded in a run manifest.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "gpp-out")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> gpp::Result<()> {
    match cli.command {
        Command::Probe { obs, queries, baselines, common } => {
            cli::cmd_probe(&obs, &queries, common.probe_options(), &baselines, &common.out)
        }
        Command::FuzzSweep {
            keep_probs,
            obs_sizes,
            seeds,
            n_query,
            dim,
            separation,
            scale,
            common,
        } => cli::cmd_fuzz_sweep(
            &keep_probs,
            &obs_sizes,
            &seeds,
            n_query,
            dim,
            separation,
            scale,
            common.probe_options(),
            &common.out,
        ),
        Command::Ood {
            detectors,
            obs_sizes,
            n_id,
            n_ood,
            dim,
            separation,
            scale,
            noise_low,
            noise_high,
            common,
        } => {
            let detectors =
                if detectors.is_empty() { Detector::ALL.to_vec() } else { detectors };
            cli::cmd_ood(
                &detectors,
                &obs_sizes,
                n_id,
                n_ood,
                dim,
                separation,
                scale,
                noise_low,
                noise_high,
                common.probe_options(),
                &common.out,
            )
        }
        Command::PriorInspect { epsilon, eps_hat, strength, grid, out } => {
            cli::cmd_prior_inspect(epsilon, eps_hat.unwrap_or(epsilon), strength, grid, &out)
        }
        Command::Rerun { manifest, out } => cli::cmd_rerun(&manifest, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ GppError::NumericalFailure(_)) => {
            eprintln!("gpp: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("gpp: {e}");
            ExitCode::from(2)
        }
    }
}
