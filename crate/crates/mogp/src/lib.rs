//! Multi-output Gaussian process toolkit for coupled time series.
//!
//! The crate jointly models `M` irregularly sampled channels with spectral
//! mixture kernels — the multi-output spectral mixture (MOSM) and its
//! constrained variants (CSM, SM-LMC, SM-IGP) — trains hyperparameters by
//! MAP optimization from periodogram-based initializations, imputes and
//! forecasts held-out observations with exact GP inference, and reports
//! normalized cross-correlation matrices and error metrics.
//!
//! Modules map onto the pipeline stages:
//!
//! - [`series`]: CSV ingestion, invertible transforms, train/test masking.
//! - [`kernel`]: the spectral mixture kernel family and Gram assembly.
//! - [`gp`]: exact inference — MAP objective, gradients, posteriors.
//! - [`train`]: periodogram peak initialization and multi-trial fitting.
//! - [`analytics`]: cross-correlation matrices and nMAE/nRMSE reports.
//! - [`synth`]: deterministic synthetic benchmark generation.
//! - [`plot`]: self-contained SVG rendering of posterior fits.

pub mod analytics;
pub mod error;
pub mod gp;
pub mod kernel;
pub mod plot;
pub mod series;
pub mod synth;
pub mod train;

pub use error::{Error, Result};
