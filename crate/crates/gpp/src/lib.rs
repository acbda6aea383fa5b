//! Gaussian process probes over fixed vector representations.
//!
//! A probe is a distribution over binary classifiers of a model's
//! activations, built from a Beta-GP: a Beta(eps, eps) prior over the label
//! probability at every point, approximated by two latent GPs with a cosine
//! kernel so the whole posterior is a (d+1)-dimensional Gaussian over affine
//! classifier weights. From the latent posterior at a query the probe
//! reports:
//!
//! * the judged probability that the label is positive,
//! * episteme — how much the probe knows about that probability,
//! * alea — how intrinsically fuzzy the label is,
//! * an OOD score (negative latent variance).
//!
//! ```
//! use gpp::beta_gp::{fit, GppConfig, ObservationSet};
//! use gpp::kernel::Representation;
//! use gpp::uncertainty;
//!
//! let obs = ObservationSet::new(
//!     vec![
//!         Representation::new(vec![1.0, 0.2]).unwrap(),
//!         Representation::new(vec![-1.0, -0.1]).unwrap(),
//!     ],
//!     vec![1, 0],
//! ).unwrap();
//! let probe = fit(obs, GppConfig::default()).unwrap();
//! let query = Representation::new(vec![0.9, 0.1]).unwrap();
//! let lat = probe.latent_posterior(std::slice::from_ref(&query)).unwrap()[0];
//! let report = uncertainty::report(&lat, probe.config()).unwrap();
//! assert!(report.judged_probability > 0.5);
//! ```
//!
//! The `examples/` directory has one runnable example per capability
//! (probing, prior inspection, fuzziness sweeps, OOD detection, classifier
//! sampling); the `gpp` binary exposes the same workflows as subcommands
//! with reproducibility manifests.

pub mod baselines;
pub mod beta_gp;
pub mod cli;
pub mod data;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod logistic;
pub mod metrics;
pub mod quad;
pub mod uncertainty;

pub use error::{GppError, Result};
