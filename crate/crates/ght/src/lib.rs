//! Generalized histogram thresholding.
//!
//! The core operation splits a histogram into two classes by maximizing a
//! Bayesian MAP score for a two-Gaussian mixture with conjugate priors
//! (scaled-inverse-chi-squared on the variances, Beta on the mixture
//! weight). Depending on the four hyperparameters (nu, tau, kappa, omega)
//! the same score reproduces three classic thresholders exactly:
//!
//! * `nu = 0, kappa = 0` is minimum error thresholding (MET),
//! * `nu -> inf, tau -> 0, kappa = 0` is Otsu's method,
//! * `kappa -> inf` is the weighted percentile at fraction omega.
//!
//! Everything is built from one cumulative pass over the histogram
//! ([`histogram::split_stats`]); [`threshold`] holds the four thresholders,
//! [`reference`] two deliberately independent reimplementations used as
//! correctness oracles, [`image`] the grayscale binarization pipeline,
//! [`metrics`] DIBCO-style F1/PSNR/DRD evaluation, and [`tuner`] a
//! coordinate-descent hyperparameter search.

pub mod error;
pub mod histogram;
pub mod image;
pub mod metrics;
pub mod reference;
pub mod threshold;
pub mod tuner;

pub use error::GhtError;
pub use histogram::{split_stats, Histogram, SplitStats, CLIP};
pub use threshold::{
    argmax_mean_ties, ght, met, otsu, otsu_distortion_form, wprctile, GhtParams, ThresholdResult,
};
