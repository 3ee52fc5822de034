//! Flexible bivariate beta mixture models.
//!
//! * [`bbeta`]: the bivariate beta density, moments and sampler
//! * [`optim`]: box-constrained maximization used by the M-step
//! * [`emfit`]: mixture fitting by EM, prediction, sampling, model documents
//! * [`metrics`]: clustering accuracy, ARI, AMI
//! * [`data`]: synthetic benchmark sets, CSV, normalization, PCA
//! * [`baselines`]: k-means and Gaussian mixtures

pub mod baselines;
pub mod bbeta;
pub mod data;
pub mod emfit;
pub mod error;
pub mod metrics;
pub mod optim;
pub mod util;

pub use bbeta::{BetaParams, Point2, QuadratureConfig};
pub use emfit::{DataMatrix, FitConfig, FitResult, FitTrace, MixtureModel, Responsibilities};
pub use error::{Error, Result};
