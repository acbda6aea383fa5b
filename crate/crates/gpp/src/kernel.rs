//! The cosine kernel over bias-augmented representations.
//!
//! A representation `a` is mapped into an augmented space by appending a
//! bias dimension fixed at 1 and rescaling so the kernel is an inner product
//! of feature vectors:
//!
//! ```text
//! k(a, a') = psi(a) . psi(a'),   psi(a) = c(a) * sqrt(v) * [a; 1]
//! ```
//!
//! with `v = log(1/epsilon + 1)` tying the kernel scale to a Beta(eps, eps)
//! prior over classifier outputs. Two normalizations `c(a)` are supported:
//!
//! * [`KernelNorm::UnitDiag`] (default): `c(a) = 1/sqrt(|a|^2 + 1)`, which
//!   makes `k(a, a) = v` hold exactly for every `a`. This is the constraint
//!   the prior construction relies on.
//! * [`KernelNorm::Eq4`]: `c(a) = 1/(|a| + 1)`, the literal augmented-space
//!   scaling; here `k(a, a) = v (|a|^2 + 1)/(|a| + 1)^2 <= v` with equality
//!   only at `a = 0`.
//!
//! Either way the kernel is an exact finite-dimensional inner product, so a
//! GP with this kernel is a distribution over affine functions of `a`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GppError, Result};

/// A d-dimensional vector representation of a stimulus (e.g. activations).
///
/// Entries are validated finite at construction; the dimension is fixed for
/// the lifetime of the value.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation(DVector<f64>);

impl Representation {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(GppError::InvalidInput(
                "representation must have dimension >= 1".into(),
            ));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(GppError::InvalidInput(
                "representation contains non-finite entries".into(),
            ));
        }
        Ok(Self(DVector::from_vec(values)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub(crate) fn vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// Which feature-map normalization defines the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelNorm {
    /// `psi(a) = sqrt(v) [a; 1] / sqrt(|a|^2 + 1)`; `k(a,a) = v` for all `a`.
    #[default]
    UnitDiag,
    /// `psi(a) = sqrt(v) [a; 1] / (|a| + 1)`.
    Eq4,
}

impl std::str::FromStr for KernelNorm {
    type Err = GppError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit-diag" => Ok(Self::UnitDiag),
            "eq4" => Ok(Self::Eq4),
            other => Err(GppError::InvalidInput(format!(
                "unknown kernel norm {other:?}; expected unit-diag or eq4"
            ))),
        }
    }
}

/// Kernel hyperparameters: the Beta prior concentration and normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    epsilon: f64,
    norm: KernelNorm,
}

impl KernelConfig {
    pub fn new(epsilon: f64, norm: KernelNorm) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(GppError::InvalidInput(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )));
        }
        Ok(Self { epsilon, norm })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn norm(&self) -> KernelNorm {
        self.norm
    }

    /// Kernel scale `v = log(1/epsilon + 1)`, always recomputed from epsilon.
    pub fn v(&self) -> f64 {
        (1.0 / self.epsilon + 1.0).ln()
    }
}

fn scale(a: &Representation, cfg: &KernelConfig) -> f64 {
    let n = a.norm();
    let c = match cfg.norm {
        KernelNorm::UnitDiag => (n * n + 1.0).sqrt(),
        KernelNorm::Eq4 => n + 1.0,
    };
    cfg.v().sqrt() / c
}

/// The augmented feature map `psi(a)`, a (d+1)-vector whose last entry is
/// the scaled bias.
pub fn feature_map(a: &Representation, cfg: &KernelConfig) -> DVector<f64> {
    let s = scale(a, cfg);
    let d = a.dim();
    let mut out = DVector::zeros(d + 1);
    for i in 0..d {
        out[i] = s * a.vector()[i];
    }
    out[d] = s;
    out
}

/// Evaluates `k(a, b) = psi(a) . psi(b)` in closed form.
pub fn cosine_kernel(a: &Representation, b: &Representation, cfg: &KernelConfig) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(GppError::InvalidInput(format!(
            "kernel dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let dot = a.vector().dot(b.vector());
    Ok(scale(a, cfg) * scale(b, cfg) * (dot + 1.0))
}

/// Kernel matrix `[k(A_i, B_j)]`; symmetric PSD when `A` and `B` coincide.
pub fn kernel_matrix(
    rows: &[Representation],
    cols: &[Representation],
    cfg: &KernelConfig,
) -> Result<DMatrix<f64>> {
    if let Some(d) = rows.iter().chain(cols.iter()).map(Representation::dim).next() {
        if rows.iter().chain(cols.iter()).any(|r| r.dim() != d) {
            return Err(GppError::InvalidInput(
                "kernel_matrix: inconsistent representation dimensions".into(),
            ));
        }
    }
    let row_scales: Vec<f64> = rows.iter().map(|r| scale(r, cfg)).collect();
    let col_scales: Vec<f64> = cols.iter().map(|c| scale(c, cfg)).collect();
    let mut out = DMatrix::zeros(rows.len(), cols.len());
    for (i, a) in rows.iter().enumerate() {
        for (j, b) in cols.iter().enumerate() {
            let dot = a.vector().dot(b.vector());
            out[(i, j)] = row_scales[i] * col_scales[j] * (dot + 1.0);
        }
    }
    Ok(out)
}

/// The `(d+1) x n` matrix whose columns are `psi(a_i)`.
pub(crate) fn feature_matrix(reps: &[Representation], cfg: &KernelConfig) -> DMatrix<f64> {
    let d = reps.first().map_or(0, Representation::dim);
    let mut out = DMatrix::zeros(d + 1, reps.len());
    for (j, a) in reps.iter().enumerate() {
        out.set_column(j, &feature_map(a, cfg));
    }
    out
}
