//! Command implementations behind the `gpp` binary.
//!
//! Every command resolves its full configuration up front, writes its
//! outputs, and then writes a `RunManifest` JSON next to them. The manifest
//! carries the resolved configuration, all seeds, digests of input files,
//! and the numerical counters (jitter, variance clamps), and is sufficient
//! to reproduce the outputs byte-for-byte via `rerun`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{self, DEFAULT_LPE_MEMBERS, DEFAULT_LP_REG};
use crate::beta_gp::{self, GppConfig, ObservationSet};
use crate::data::{self, SynthConfig};
use crate::error::{GppError, Result};
use crate::kernel::{KernelNorm, Representation};
use crate::metrics::{self, ScoredLabels};
use crate::uncertainty;

/// Reproducibility record written next to every command's outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub input_digests: BTreeMap<String, String>,
    pub jitter: Vec<f64>,
    pub clamp_count: usize,
    pub outputs: Vec<String>,
}

impl RunManifest {
    fn write(&self, out_dir: &Path) -> Result<()> {
        let path = out_dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| GppError::InvalidInput(format!("manifest serialization: {e}")))?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| GppError::Parse {
            line: e.line(),
            msg: format!("manifest: {e}"),
        })
    }
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

fn ensure_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    Ok(())
}

/// Resolved probe-level options shared by the commands.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub epsilon: f64,
    pub strength: f64,
    pub kernel_norm: KernelNorm,
    pub gh_nodes: usize,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            strength: 5.0,
            kernel_norm: KernelNorm::UnitDiag,
            gh_nodes: 64,
            seed: 0,
        }
    }
}

impl ProbeOptions {
    pub fn gpp_config(&self) -> GppConfig {
        GppConfig {
            epsilon: self.epsilon,
            strength: self.strength,
            kernel_norm: self.kernel_norm,
            gh_nodes: self.gh_nodes,
            ..GppConfig::default()
        }
    }
}

/// Baseline columns requested for `probe`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    Lp,
    Lpe,
    Msp,
    Maha,
    Knn,
}

impl std::str::FromStr for Baseline {
    type Err = GppError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(Self::Lp),
            "lpe" => Ok(Self::Lpe),
            "msp" => Ok(Self::Msp),
            "maha" => Ok(Self::Maha),
            "knn" => Ok(Self::Knn),
            other => Err(GppError::InvalidInput(format!("unknown baseline {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProbeArgs {
    obs: PathBuf,
    queries: PathBuf,
    options: ProbeOptions,
    baselines: Vec<Baseline>,
}

/// One JSON-lines row per query.
#[derive(Debug, Serialize, Deserialize)]
struct ProbeRow {
    #[serde(flatten)]
    report: uncertainty::UncertaintyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    lp_probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lpe_probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lpe_ood_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    msp_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    maha_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    knn_score: Option<f64>,
}

/// Fits a probe on an observation file and writes one uncertainty report per
/// query as JSON lines, plus the run manifest.
pub fn cmd_probe(
    obs_path: &Path,
    query_path: &Path,
    options: ProbeOptions,
    requested: &[Baseline],
    out_dir: &Path,
) -> Result<()> {
    ensure_out_dir(out_dir)?;
    let obs_table = data::load_activations(obs_path)?;
    let query_table = data::load_activations(query_path)?;

    let queries = &query_table.rows;
    let dim = query_table
        .dim()
        .ok_or_else(|| GppError::InvalidInput("query file has no rows".into()))?;
    let observations = if obs_table.is_empty() {
        ObservationSet::empty(dim)?
    } else {
        obs_table.to_observations()?
    };

    let config = options.gpp_config();
    let probe = beta_gp::fit(observations.clone(), config)?;
    let latents = probe.latent_posterior(queries)?;

    let lp = if requested.iter().any(|b| matches!(b, Baseline::Lp | Baseline::Msp)) {
        Some(baselines::fit_lp(&observations, DEFAULT_LP_REG, true)?)
    } else {
        None
    };
    let lpe = if requested.contains(&Baseline::Lpe) {
        Some(baselines::fit_lpe(&observations, DEFAULT_LPE_MEMBERS, DEFAULT_LP_REG, options.seed)?)
    } else {
        None
    };
    let maha = if requested.contains(&Baseline::Maha) {
        Some(baselines::maha_fit(&observations)?)
    } else {
        None
    };

    let mut lines = String::new();
    for (q, lat) in queries.iter().zip(&latents) {
        let lpe_rep = lpe.as_ref().map(|e| baselines::lpe_report(e, q)).transpose()?;
        let row = ProbeRow {
            report: uncertainty::report(lat, &config)?,
            lp_probability: requested
                .contains(&Baseline::Lp)
                .then(|| baselines::predict_lp(lp.as_ref().unwrap(), q)),
            lpe_probability: lpe_rep.as_ref().map(|r| r.judged_probability),
            lpe_ood_score: lpe_rep.as_ref().map(|r| r.ood_score),
            msp_score: requested
                .contains(&Baseline::Msp)
                .then(|| baselines::msp_score(lp.as_ref().unwrap(), q)),
            maha_score: maha.as_ref().map(|m| baselines::maha_score(m, q)).transpose()?,
            knn_score: if requested.contains(&Baseline::Knn) {
                Some(baselines::knn_score(&observations, q, 1)?)
            } else {
                None
            },
        };
        lines.push_str(
            &serde_json::to_string(&row)
                .map_err(|e| GppError::InvalidInput(format!("report serialization: {e}")))?,
        );
        lines.push('\n');
    }
    std::fs::write(out_dir.join("reports.jsonl"), lines)?;

    let (ja, jb) = probe.jitters();
    let mut input_digests = BTreeMap::new();
    input_digests.insert(obs_path.display().to_string(), sha256_file(obs_path)?);
    input_digests.insert(query_path.display().to_string(), sha256_file(query_path)?);
    let args = ProbeArgs {
        obs: obs_path.to_path_buf(),
        queries: query_path.to_path_buf(),
        options,
        baselines: requested.to_vec(),
    };
    RunManifest {
        command: "probe".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: serde_json::to_value(&args)
            .map_err(|e| GppError::InvalidInput(e.to_string()))?,
        input_digests,
        jitter: vec![ja, jb],
        clamp_count: probe.clamp_count(),
        outputs: vec!["reports.jsonl".into()],
    }
    .write(out_dir)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FuzzSweepArgs {
    keep_probs: Vec<f64>,
    obs_sizes: Vec<usize>,
    seeds: Vec<u64>,
    n_query: usize,
    dim: usize,
    separation: f64,
    scale: f64,
    options: ProbeOptions,
}

/// One fuzz-sweep cell: GPP and LPE Pearson correlation between judged and
/// true probabilities, and mean alea/episteme over originally-positive
/// queries.
#[derive(Debug, Clone)]
pub struct FuzzCell {
    pub keep_prob: f64,
    pub n_obs: usize,
    pub seed: u64,
    pub pearson_gpp: f64,
    pub pearson_lpe: f64,
    pub mean_alea_pos: f64,
    pub mean_episteme_pos: f64,
    pub mean_judged_pos: f64,
    pub lpe_mean_alea_pos: f64,
}

/// Evaluates one (keep_prob, n_obs, seed) cell of the fuzziness sweep.
pub fn fuzz_cell(
    keep_prob: f64,
    n_obs: usize,
    seed: u64,
    n_query: usize,
    dim: usize,
    separation: f64,
    scale: f64,
    options: &ProbeOptions,
) -> Result<FuzzCell> {
    let synth = SynthConfig {
        dim,
        n_obs,
        n_query,
        separation,
        scale,
        keep_prob,
        seed,
    };
    let (obs_table, query_table) = data::synth_clusters(&synth)?;
    let observations = obs_table.to_observations()?;
    let config = options.gpp_config();
    let probe = beta_gp::fit(observations.clone(), config)?;
    let latents = probe.latent_posterior(&query_table.rows)?;
    let true_probs = query_table.true_probs.as_ref().unwrap();

    let ensemble =
        baselines::fit_lpe(&observations, DEFAULT_LPE_MEMBERS, DEFAULT_LP_REG, seed ^ 0x5eed)?;

    let mut gpp_judged = Vec::with_capacity(latents.len());
    let mut lpe_judged = Vec::with_capacity(latents.len());
    let mut alea_pos = Vec::new();
    let mut episteme_pos = Vec::new();
    let mut judged_pos = Vec::new();
    let mut lpe_alea_pos = Vec::new();
    for ((lat, q), &p) in latents.iter().zip(&query_table.rows).zip(true_probs) {
        let r = uncertainty::report(lat, &config)?;
        let lr = baselines::lpe_report(&ensemble, q)?;
        gpp_judged.push(r.judged_probability);
        lpe_judged.push(lr.judged_probability);
        if p > 0.0 {
            alea_pos.push(r.alea);
            episteme_pos.push(r.episteme);
            judged_pos.push(r.judged_probability);
            lpe_alea_pos.push(lr.alea);
        }
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len().max(1) as f64;
    Ok(FuzzCell {
        keep_prob,
        n_obs,
        seed,
        pearson_gpp: metrics::pearson(true_probs, &gpp_judged)?,
        pearson_lpe: metrics::pearson(true_probs, &lpe_judged)?,
        mean_alea_pos: mean(&alea_pos),
        mean_episteme_pos: mean(&episteme_pos),
        mean_judged_pos: mean(&judged_pos),
        lpe_mean_alea_pos: mean(&lpe_alea_pos),
    })
}

/// Runs the full fuzziness sweep and writes `fuzz_sweep.csv` plus the
/// manifest. Cells are emitted in the canonical (keep_prob, n_obs, seed)
/// order regardless of evaluation order.
#[allow(clippy::too_many_arguments)]
pub fn cmd_fuzz_sweep(
    keep_probs: &[f64],
    obs_sizes: &[usize],
    seeds: &[u64],
    n_query: usize,
    dim: usize,
    separation: f64,
    scale: f64,
    options: ProbeOptions,
    out_dir: &Path,
) -> Result<()> {
    ensure_out_dir(out_dir)?;
    let mut csv = String::from(
        "keep_prob,n_obs,seed,pearson_gpp,pearson_lpe,mean_alea_pos,mean_episteme_pos,mean_judged_pos,lpe_mean_alea_pos\n",
    );
    for &p in keep_probs {
        for &n in obs_sizes {
            for &seed in seeds {
                let cell = fuzz_cell(p, n, seed, n_query, dim, separation, scale, &options)?;
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{}",
                    cell.keep_prob,
                    cell.n_obs,
                    cell.seed,
                    cell.pearson_gpp,
                    cell.pearson_lpe,
                    cell.mean_alea_pos,
                    cell.mean_episteme_pos,
                    cell.mean_judged_pos,
                    cell.lpe_mean_alea_pos
                );
            }
        }
    }
    std::fs::write(out_dir.join("fuzz_sweep.csv"), csv)?;

    let args = FuzzSweepArgs {
        keep_probs: keep_probs.to_vec(),
        obs_sizes: obs_sizes.to_vec(),
        seeds: seeds.to_vec(),
        n_query,
        dim,
        separation,
        scale,
        options,
    };
    RunManifest {
        command: "fuzz-sweep".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: serde_json::to_value(&args)
            .map_err(|e| GppError::InvalidInput(e.to_string()))?,
        input_digests: BTreeMap::new(),
        jitter: vec![],
        clamp_count: 0,
        outputs: vec!["fuzz_sweep.csv".into()],
    }
    .write(out_dir)
}

/// OOD detectors available to `cmd_ood`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    Gpp,
    Msp,
    Maha,
    Knn,
    Lpe,
}

impl Detector {
    pub const ALL: [Detector; 5] =
        [Detector::Gpp, Detector::Msp, Detector::Maha, Detector::Knn, Detector::Lpe];

    pub fn name(self) -> &'static str {
        match self {
            Detector::Gpp => "gpp",
            Detector::Msp => "msp",
            Detector::Maha => "maha",
            Detector::Knn => "knn",
            Detector::Lpe => "lpe",
        }
    }
}

impl std::str::FromStr for Detector {
    type Err = GppError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gpp" => Ok(Self::Gpp),
            "msp" => Ok(Self::Msp),
            "maha" => Ok(Self::Maha),
            "knn" => Ok(Self::Knn),
            "lpe" => Ok(Self::Lpe),
            other => Err(GppError::InvalidInput(format!("unknown detector {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct OodArgs {
    obs_sizes: Vec<usize>,
    detectors: Vec<Detector>,
    n_id: usize,
    n_ood: usize,
    dim: usize,
    separation: f64,
    scale: f64,
    noise_low: f64,
    noise_high: f64,
    options: ProbeOptions,
}

/// Scores ID and OOD queries with one detector; higher = more in-distribution.
fn detector_scores(
    detector: Detector,
    observations: &ObservationSet,
    probe: &beta_gp::FittedProbe,
    queries: &[Representation],
    seed: u64,
) -> Result<Vec<f64>> {
    match detector {
        Detector::Gpp => Ok(probe
            .latent_posterior(queries)?
            .iter()
            .map(uncertainty::ood_score)
            .collect()),
        Detector::Msp => {
            let lp = baselines::fit_lp(observations, DEFAULT_LP_REG, true)?;
            Ok(queries.iter().map(|q| baselines::msp_score(&lp, q)).collect())
        }
        Detector::Maha => {
            let model = baselines::maha_fit(observations)?;
            queries.iter().map(|q| baselines::maha_score(&model, q)).collect()
        }
        Detector::Knn => {
            queries.iter().map(|q| baselines::knn_score(observations, q, 1)).collect()
        }
        Detector::Lpe => {
            let ens =
                baselines::fit_lpe(observations, DEFAULT_LPE_MEMBERS, DEFAULT_LP_REG, seed)?;
            queries
                .iter()
                .map(|q| baselines::lpe_report(&ens, q).map(|r| r.ood_score))
                .collect()
        }
    }
}

/// One (detector, |D|) cell of the OOD benchmark.
#[derive(Debug, Clone)]
pub struct OodCell {
    pub detector: Detector,
    pub n_obs: usize,
    pub auroc: f64,
}

/// Builds the ID-vs-OOD benchmark for one observation size and evaluates the
/// requested detectors. ID queries are fresh cluster samples; OOD queries
/// are uniform noise.
#[allow(clippy::too_many_arguments)]
pub fn ood_bench(
    detectors: &[Detector],
    n_obs: usize,
    n_id: usize,
    n_ood: usize,
    dim: usize,
    separation: f64,
    scale: f64,
    noise_low: f64,
    noise_high: f64,
    options: &ProbeOptions,
) -> Result<Vec<OodCell>> {
    let synth = SynthConfig {
        dim,
        n_obs,
        n_query: n_id,
        separation,
        scale,
        keep_prob: 1.0,
        seed: options.seed,
    };
    let (obs_table, id_table) = data::synth_clusters(&synth)?;
    let noise = data::ood_noise(n_ood, dim, noise_low, noise_high, options.seed ^ 0x00d)?;
    let observations = obs_table.to_observations()?;
    let probe = beta_gp::fit(observations.clone(), options.gpp_config())?;

    let mut queries: Vec<Representation> = id_table.rows.clone();
    queries.extend(noise.rows.iter().cloned());
    let mut labels = vec![1u8; n_id];
    labels.extend(std::iter::repeat(0u8).take(n_ood));

    let mut cells = Vec::with_capacity(detectors.len());
    for &detector in detectors {
        let scores = detector_scores(detector, &observations, &probe, &queries, options.seed)?;
        let auroc = metrics::auroc(&ScoredLabels::new(scores, labels.clone())?)?;
        cells.push(OodCell { detector, n_obs, auroc });
    }
    Ok(cells)
}

/// Runs the OOD benchmark over an observation-size sweep and writes
/// `ood_auroc.csv` plus the manifest. Output rows are canonicalized by
/// (n_obs, detector name) so the detector list order never changes values
/// or layout.
#[allow(clippy::too_many_arguments)]
pub fn cmd_ood(
    detectors: &[Detector],
    obs_sizes: &[usize],
    n_id: usize,
    n_ood: usize,
    dim: usize,
    separation: f64,
    scale: f64,
    noise_low: f64,
    noise_high: f64,
    options: ProbeOptions,
    out_dir: &Path,
) -> Result<()> {
    ensure_out_dir(out_dir)?;
    let mut rows: Vec<OodCell> = Vec::new();
    for &n in obs_sizes {
        rows.extend(ood_bench(
            detectors, n, n_id, n_ood, dim, separation, scale, noise_low, noise_high, &options,
        )?);
    }
    rows.sort_by(|a, b| (a.n_obs, a.detector.name()).cmp(&(b.n_obs, b.detector.name())));

    let mut csv = String::from("n_obs,detector,auroc\n");
    for c in &rows {
        let _ = writeln!(csv, "{},{},{}", c.n_obs, c.detector.name(), c.auroc);
    }
    std::fs::write(out_dir.join("ood_auroc.csv"), csv)?;

    let mut sorted_detectors = detectors.to_vec();
    sorted_detectors.sort_by_key(|d| d.name());
    let args = OodArgs {
        obs_sizes: obs_sizes.to_vec(),
        detectors: sorted_detectors,
        n_id,
        n_ood,
        dim,
        separation,
        scale,
        noise_low,
        noise_high,
        options,
    };
    RunManifest {
        command: "ood".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: serde_json::to_value(&args)
            .map_err(|e| GppError::InvalidInput(e.to_string()))?,
        input_digests: BTreeMap::new(),
        jitter: vec![],
        clamp_count: 0,
        outputs: vec!["ood_auroc.csv".into()],
    }
    .write(out_dir)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PriorInspectArgs {
    epsilon: f64,
    eps_hat: f64,
    strength: f64,
    grid: usize,
}

/// Emits the prior/posterior inspection curves as `prior_curves.csv`.
pub fn cmd_prior_inspect(
    epsilon: f64,
    eps_hat: f64,
    strength: f64,
    grid: usize,
    out_dir: &Path,
) -> Result<()> {
    ensure_out_dir(out_dir)?;
    let t = beta_gp::prior_inspect(epsilon, eps_hat, strength, grid)?;
    let mut csv = String::from(
        "y,beta_prior,approx_prior,beta_one_negative,gp_one_negative,beta_pos_neg_pair,gp_pos_neg_pair\n",
    );
    for i in 0..t.y.len() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            t.y[i],
            t.beta_prior[i],
            t.approx_prior[i],
            t.beta_one_negative[i],
            t.gp_one_negative[i],
            t.beta_pos_neg_pair[i],
            t.gp_pos_neg_pair[i]
        );
    }
    std::fs::write(out_dir.join("prior_curves.csv"), csv)?;

    RunManifest {
        command: "prior-inspect".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: serde_json::to_value(PriorInspectArgs { epsilon, eps_hat, strength, grid })
            .map_err(|e| GppError::InvalidInput(e.to_string()))?,
        input_digests: BTreeMap::new(),
        jitter: vec![],
        clamp_count: 0,
        outputs: vec!["prior_curves.csv".into()],
    }
    .write(out_dir)
}

/// Re-executes the command recorded in a manifest, writing into `out_dir`.
/// Outputs are byte-identical to the original run.
pub fn cmd_rerun(manifest_path: &Path, out_dir: &Path) -> Result<()> {
    let manifest = RunManifest::load(manifest_path)?;
    let cfg = manifest.config.clone();
    let decode_err =
        |e: serde_json::Error| GppError::InvalidInput(format!("manifest config: {e}"));
    match manifest.command.as_str() {
        "probe" => {
            let args: ProbeArgs = serde_json::from_value(cfg).map_err(decode_err)?;
            cmd_probe(&args.obs, &args.queries, args.options, &args.baselines, out_dir)
        }
        "fuzz-sweep" => {
            let args: FuzzSweepArgs = serde_json::from_value(cfg).map_err(decode_err)?;
            cmd_fuzz_sweep(
                &args.keep_probs,
                &args.obs_sizes,
                &args.seeds,
                args.n_query,
                args.dim,
                args.separation,
                args.scale,
                args.options,
                out_dir,
            )
        }
        "ood" => {
            let args: OodArgs = serde_json::from_value(cfg).map_err(decode_err)?;
            cmd_ood(
                &args.detectors,
                &args.obs_sizes,
                args.n_id,
                args.n_ood,
                args.dim,
                args.separation,
                args.scale,
                args.noise_low,
                args.noise_high,
                args.options,
                out_dir,
            )
        }
        "prior-inspect" => {
            let args: PriorInspectArgs = serde_json::from_value(cfg).map_err(decode_err)?;
            cmd_prior_inspect(args.epsilon, args.eps_hat, args.strength, args.grid, out_dir)
        }
        other => Err(GppError::InvalidInput(format!("manifest names unknown command {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ood_noise, ActivationTable};

    fn write_table(dir: &Path, name: &str, table: &ActivationTable) -> PathBuf {
        let path = dir.join(name);
        table.save(&path).unwrap();
        path
    }

    #[test]
    fn probe_with_empty_observations_reports_prior() {
        let tmp = tempfile::tempdir().unwrap();
        let empty = ActivationTable {
            rows: vec![],
            labels: Some(vec![]),
            true_probs: None,
            provenance: "empty".into(),
        };
        // An empty table still needs a dimension in its header; build by hand.
        let obs_path = tmp.path().join("obs.csv");
        std::fs::write(&obs_path, "dim=3,label=1,trueprob=0\n").unwrap();
        assert!(empty.is_empty());

        let queries = ood_noise(4, 3, 0.0, 1.0, 1).unwrap();
        let q_path = write_table(tmp.path(), "queries.csv", &queries);

        let out = tmp.path().join("out");
        cmd_probe(&obs_path, &q_path, ProbeOptions::default(), &[], &out).unwrap();
        let text = std::fs::read_to_string(out.join("reports.jsonl")).unwrap();
        let v = 11.0f64.ln();
        for line in text.lines() {
            let row: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!((row["judged_probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
            assert!((row["ood_score"].as_f64().unwrap() + 2.0 * v).abs() < 1e-9);
        }
        assert!(out.join("manifest.json").exists());
    }

    #[test]
    fn probe_rejects_dimension_mismatch() {
        let tmp = tempfile::tempdir().unwrap();
        let obs = {
            let mut t = ood_noise(4, 3, 0.0, 1.0, 2).unwrap();
            t.labels = Some(vec![1, 0, 1, 0]);
            t
        };
        let queries = ood_noise(2, 5, 0.0, 1.0, 3).unwrap();
        let obs_path = write_table(tmp.path(), "obs.csv", &obs);
        let q_path = write_table(tmp.path(), "q.csv", &queries);
        let r = cmd_probe(&obs_path, &q_path, ProbeOptions::default(), &[], &tmp.path().join("o"));
        assert!(matches!(r, Err(GppError::InvalidInput(_))));
    }

    #[test]
    fn prior_inspect_writes_monotone_grid() {
        let tmp = tempfile::tempdir().unwrap();
        cmd_prior_inspect(1.0, 1.0, 5.0, 51, tmp.path()).unwrap();
        let text = std::fs::read_to_string(tmp.path().join("prior_curves.csv")).unwrap();
        let ys: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(ys.len(), 51);
        assert!(ys.windows(2).all(|w| w[0] < w[1]));
        // Beta(1,1) prior column is constant 1.
        for line in text.lines().skip(1) {
            let p: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!((p - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn detector_order_does_not_change_values() {
        let opts = ProbeOptions::default();
        let a = ood_bench(&[Detector::Gpp, Detector::Knn], 8, 16, 16, 4, 6.0, 1.0, 0.0, 1.0, &opts)
            .unwrap();
        let b = ood_bench(&[Detector::Knn, Detector::Gpp], 8, 16, 16, 4, 6.0, 1.0, 0.0, 1.0, &opts)
            .unwrap();
        let find = |cells: &[OodCell], d: Detector| {
            cells.iter().find(|c| c.detector == d).unwrap().auroc
        };
        assert_eq!(find(&a, Detector::Gpp), find(&b, Detector::Gpp));
        assert_eq!(find(&a, Detector::Knn), find(&b, Detector::Knn));
    }
}
