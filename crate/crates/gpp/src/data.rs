//! Activation-file ingestion and the synthetic generators used by the
//! experiment commands.
//!
//! Canonical file format: UTF-8 CSV whose first line is the header
//! `dim=<d>,label=<0|1>,trueprob=<0|1>`, followed by one row per example of
//! d decimal floats, then the optional label and optional true probability.
//! Floats are written in Rust's shortest round-trip form, so saving and
//! reloading reproduces the underlying binary values bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::beta_gp::ObservationSet;
use crate::error::{GppError, Result};
use crate::kernel::Representation;

/// A rectangular table of representations with optional label and
/// true-probability columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationTable {
    pub rows: Vec<Representation>,
    pub labels: Option<Vec<u8>>,
    pub true_probs: Option<Vec<f64>>,
    pub provenance: String,
}

impl ActivationTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.rows.first().map(Representation::dim)
    }

    /// Converts to an observation set; requires the label column.
    pub fn to_observations(&self) -> Result<ObservationSet> {
        let labels = self.labels.as_ref().ok_or_else(|| {
            GppError::InvalidInput(format!("{}: no label column", self.provenance))
        })?;
        if self.rows.is_empty() {
            return Err(GppError::InvalidInput(format!(
                "{}: empty table cannot become observations",
                self.provenance
            )));
        }
        ObservationSet::new(self.rows.clone(), labels.clone())
    }

    /// Serializes to the canonical CSV format.
    pub fn to_csv(&self) -> String {
        let d = self.dim().unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "dim={d},label={},trueprob={}",
            u8::from(self.labels.is_some()),
            u8::from(self.true_probs.is_some())
        );
        for (i, row) in self.rows.iter().enumerate() {
            let mut fields: Vec<String> =
                row.as_slice().iter().map(|x| format!("{x}")).collect();
            if let Some(labels) = &self.labels {
                fields.push(format!("{}", labels[i]));
            }
            if let Some(ps) = &self.true_probs {
                fields.push(format!("{}", ps[i]));
            }
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parses the canonical CSV format; errors carry 1-based line numbers.
    pub fn from_csv(text: &str, provenance: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(GppError::Parse {
            line: 1,
            msg: "empty file".into(),
        })?;
        let (dim, has_label, has_trueprob) = parse_header(header)?;

        let mut rows = Vec::new();
        let mut labels = if has_label { Some(Vec::new()) } else { None };
        let mut true_probs = if has_trueprob { Some(Vec::new()) } else { None };
        let expected = dim + usize::from(has_label) + usize::from(has_trueprob);

        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != expected {
                return Err(GppError::Parse {
                    line: lineno,
                    msg: format!("expected {expected} fields, found {}", fields.len()),
                });
            }
            let mut values = Vec::with_capacity(dim);
            for f in &fields[..dim] {
                let x: f64 = f.trim().parse().map_err(|e| GppError::Parse {
                    line: lineno,
                    msg: format!("bad float {f:?}: {e}"),
                })?;
                if !x.is_finite() {
                    return Err(GppError::Parse {
                        line: lineno,
                        msg: format!("non-finite value {f:?}"),
                    });
                }
                values.push(x);
            }
            rows.push(Representation::new(values).map_err(|e| GppError::Parse {
                line: lineno,
                msg: e.to_string(),
            })?);
            let mut cursor = dim;
            if let Some(labels) = labels.as_mut() {
                let y: u8 = fields[cursor].trim().parse().map_err(|e| GppError::Parse {
                    line: lineno,
                    msg: format!("bad label {:?}: {e}", fields[cursor]),
                })?;
                if y > 1 {
                    return Err(GppError::Parse {
                        line: lineno,
                        msg: format!("label must be 0 or 1, got {y}"),
                    });
                }
                labels.push(y);
                cursor += 1;
            }
            if let Some(ps) = true_probs.as_mut() {
                let p: f64 = fields[cursor].trim().parse().map_err(|e| GppError::Parse {
                    line: lineno,
                    msg: format!("bad true probability {:?}: {e}", fields[cursor]),
                })?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(GppError::Parse {
                        line: lineno,
                        msg: format!("true probability out of [0,1]: {p}"),
                    });
                }
                ps.push(p);
            }
        }
        Ok(Self {
            rows,
            labels,
            true_probs,
            provenance: provenance.to_string(),
        })
    }
}

fn parse_header(header: &str) -> Result<(usize, bool, bool)> {
    let parts: Vec<&str> = header.trim().split(',').collect();
    let bad = || GppError::Parse {
        line: 1,
        msg: format!("header must be dim=<d>,label=<0|1>,trueprob=<0|1>, got {header:?}"),
    };
    if parts.len() != 3 {
        return Err(bad());
    }
    let dim: usize = parts[0].strip_prefix("dim=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let label: u8 =
        parts[1].strip_prefix("label=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let trueprob: u8 =
        parts[2].strip_prefix("trueprob=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if dim == 0 || label > 1 || trueprob > 1 {
        return Err(bad());
    }
    Ok((dim, label == 1, trueprob == 1))
}

/// Loads an activation table from a file; provenance is the path.
pub fn load_activations(path: &Path) -> Result<ActivationTable> {
    let text = std::fs::read_to_string(path)?;
    ActivationTable::from_csv(&text, &path.display().to_string())
}

/// Configuration for the two-cluster synthetic generator.
///
/// One Gaussian cluster per class, separated along the first axis. The
/// keep probability implements the one-directional label flip: an
/// originally-positive example keeps its positive label with probability
/// `keep_prob` and is flipped to negative otherwise; negatives are never
/// flipped.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SynthConfig {
    pub dim: usize,
    pub n_obs: usize,
    pub n_query: usize,
    /// Distance between the two cluster means along the first axis.
    pub separation: f64,
    /// Isotropic standard deviation of each cluster.
    pub scale: f64,
    /// Probability that an originally-positive example keeps label 1.
    pub keep_prob: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(GppError::InvalidInput("dim must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.keep_prob) {
            return Err(GppError::InvalidInput(format!(
                "keep_prob must be in [0,1], got {}",
                self.keep_prob
            )));
        }
        if !self.separation.is_finite() || !(self.scale > 0.0) {
            return Err(GppError::InvalidInput("separation/scale must be finite, scale > 0".into()));
        }
        Ok(())
    }
}

fn sample_cluster_point(rng: &mut ChaCha8Rng, cfg: &SynthConfig, positive: bool) -> Representation {
    let center = if positive { cfg.separation / 2.0 } else { -cfg.separation / 2.0 };
    let mut values = Vec::with_capacity(cfg.dim);
    for i in 0..cfg.dim {
        let base = if i == 0 { center } else { 0.0 };
        values.push(base + cfg.scale * rng.sample::<f64, _>(rand_distr::StandardNormal));
    }
    Representation::new(values).unwrap()
}

fn generate_split(rng: &mut ChaCha8Rng, cfg: &SynthConfig, n: usize) -> ActivationTable {
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut true_probs = Vec::with_capacity(n);
    for i in 0..n {
        let positive = i % 2 == 0;
        rows.push(sample_cluster_point(rng, cfg, positive));
        if positive {
            let kept = rng.gen_bool(cfg.keep_prob.clamp(0.0, 1.0));
            labels.push(u8::from(kept));
            true_probs.push(cfg.keep_prob);
        } else {
            labels.push(0);
            true_probs.push(0.0);
        }
    }
    ActivationTable {
        rows,
        labels: Some(labels),
        true_probs: Some(true_probs),
        provenance: format!("synth_clusters(seed={})", cfg.seed),
    }
}

/// Generates disjoint observation and query splits of two-cluster data with
/// the one-directional flip applied to originally-positive labels. Both
/// splits carry the flipped label and a true-probability column
/// (`keep_prob` for originally-positive rows, 0 for negative rows).
pub fn synth_clusters(cfg: &SynthConfig) -> Result<(ActivationTable, ActivationTable)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let obs = generate_split(&mut rng, cfg, cfg.n_obs);
    let queries = generate_split(&mut rng, cfg, cfg.n_query);
    Ok((obs, queries))
}

/// Uniform random points in representation space, labeled as nothing.
///
/// Stands in for noise stimuli: with no basis function available, noise is
/// drawn directly in representation space, which the provenance records.
pub fn ood_noise(n: usize, dim: usize, low: f64, high: f64, seed: u64) -> Result<ActivationTable> {
    if dim == 0 {
        return Err(GppError::InvalidInput("dim must be >= 1".into()));
    }
    if !(low < high) {
        return Err(GppError::InvalidInput(format!(
            "noise range must satisfy low < high, got [{low}, {high})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            Representation::new((0..dim).map(|_| rng.gen_range(low..high)).collect()).unwrap()
        })
        .collect();
    Ok(ActivationTable {
        rows,
        labels: None,
        true_probs: None,
        provenance: format!(
            "ood_noise(seed={seed}, range=[{low},{high}); drawn in representation space, no basis function applied)"
        ),
    })
}

/// Splits a table into disjoint observation and query subsets by seeded
/// shuffle.
pub fn split_disjoint(
    table: &ActivationTable,
    n_obs: usize,
    n_query: usize,
    seed: u64,
) -> Result<(ActivationTable, ActivationTable)> {
    if n_obs + n_query > table.len() {
        return Err(GppError::InvalidInput(format!(
            "cannot split {} rows into {n_obs} observations + {n_query} queries",
            table.len()
        )));
    }
    let mut idx: Vec<usize> = (0..table.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let take = |range: &[usize], tag: &str| ActivationTable {
        rows: range.iter().map(|&i| table.rows[i].clone()).collect(),
        labels: table.labels.as_ref().map(|l| range.iter().map(|&i| l[i]).collect()),
        true_probs: table.true_probs.as_ref().map(|p| range.iter().map(|&i| p[i]).collect()),
        provenance: format!("{}[{tag} split, seed={seed}]", table.provenance),
    };
    Ok((take(&idx[..n_obs], "obs"), take(&idx[n_obs..n_obs + n_query], "query")))
}
