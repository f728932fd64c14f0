//! The four thresholders over shared split statistics.
//!
//! All of them rank the K-1 splits by a per-split score and return the mean
//! of the bin centers whose splits attain the exact maximum. Score details:
//!
//! * [`ght`]: the full MAP score. Each side contributes
//!   `-d/v - w*ln(v) + 2*(w + kappa*omega_side)*ln(w)` where
//!   `v = clip((p*nu*tau^2 + d) / (p*nu + w))` is the posterior-mode
//!   variance under a scaled-inverse-chi-squared prior rescaled by the
//!   mixture fraction.
//! * [`met`]: minimum error thresholding,
//!   `l = 1 + w0*ln(clip(d0/w0)) + w1*ln(clip(d1/w1)) - 2*(w0*ln(w0) + w1*ln(w1))`,
//!   minimized. Identical ranking to `ght` at `nu = kappa = 0` except on
//!   splits where a zero-distortion side trips the variance clamp.
//! * [`otsu`] and [`otsu_distortion_form`]: inter-class variance
//!   `w0*w1*(mu0 - mu1)^2` and the equivalent total-minus-intra-class form;
//!   both rank identically.
//! * [`wprctile`]: cross entropy `-omega*ln(p0) - (1-omega)*ln(p1)`,
//!   minimized; picks the split whose mass fraction is closest to omega.

use crate::error::GhtError;
use crate::histogram::{clip, split_stats, Histogram, SplitStats};

/// Finite stand-ins for the limit parameters of the special cases.
pub const NEAR_INF_NU: f64 = 1e60;
pub const NEAR_ZERO_TAU: f64 = 1e-15;
pub const NEAR_INF_KAPPA: f64 = 1e60;

/// The four hyperparameters. `nu` is the variance-prior strength, `tau` its
/// scale, `kappa` the Beta concentration and `omega` the Beta mode; the
/// derived Beta parameters are `alpha = kappa*omega + 1` and
/// `beta = kappa*(1-omega) + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhtParams {
    nu: f64,
    tau: f64,
    kappa: f64,
    omega: f64,
}

impl GhtParams {
    pub fn new(nu: f64, tau: f64, kappa: f64, omega: f64) -> Result<Self, GhtError> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(GhtError::InvalidParam(format!("nu must be >= 0, got {nu}")));
        }
        if !tau.is_finite() || tau < 0.0 {
            return Err(GhtError::InvalidParam(format!("tau must be >= 0, got {tau}")));
        }
        if !kappa.is_finite() || kappa < 0.0 {
            return Err(GhtError::InvalidParam(format!("kappa must be >= 0, got {kappa}")));
        }
        if !omega.is_finite() || !(0.0..=1.0).contains(&omega) {
            return Err(GhtError::InvalidParam(format!(
                "omega must be in [0, 1], got {omega}"
            )));
        }
        Ok(GhtParams { nu, tau, kappa, omega })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

/// Chosen threshold plus the full per-split score curve. `scores` is always
/// oriented so that the threshold maximizes it (minimization-style scores
/// are negated on the way in).
#[derive(Debug, Clone)]
pub struct ThresholdResult {
    /// Arithmetic mean of the bin centers over `argmax_indices`.
    pub t: f64,
    pub scores: Vec<f64>,
    pub argmax_indices: Vec<usize>,
}

/// Maximum over `scores` with exact float equality for ties; returns the
/// running mean of `x[i]` over all maximizing `i`. Only the first
/// `len(x) - 1` centers are candidates.
pub fn argmax_mean_ties(x: &[f64], scores: &[f64]) -> (f64, Vec<usize>) {
    debug_assert_eq!(scores.len(), x.len() - 1);
    let mut mx = f64::NEG_INFINITY;
    for &s in scores {
        if s > mx {
            mx = s;
        }
    }
    let mut mean = 0.0;
    let mut indices = Vec::new();
    for (i, &s) in scores.iter().enumerate() {
        if s == mx {
            mean += (x[i] - mean) / (indices.len() + 1) as f64;
            indices.push(i);
        }
    }
    (mean, indices)
}

/// One side's score contribution; `kw` is `kappa*omega` for the low side and
/// `kappa*(1-omega)` for the high side. Shared by both sides so that
/// mirror-symmetric splits tie bitwise.
#[inline]
pub(crate) fn ght_side(w: f64, p: f64, d: f64, nu: f64, tau: f64, kw: f64) -> f64 {
    let v = clip((p * nu * tau * tau + d) / (p * nu + w));
    -d / v - w * v.ln() + 2.0 * (w + kw) * w.ln()
}

fn result_from_scores(h: &Histogram, scores: Vec<f64>) -> ThresholdResult {
    let (t, argmax_indices) = argmax_mean_ties(h.x(), &scores);
    ThresholdResult { t, scores, argmax_indices }
}

/// The full MAP thresholder.
pub fn ght(h: &Histogram, p: &GhtParams) -> ThresholdResult {
    let st = split_stats(h);
    let kw0 = p.kappa * p.omega;
    let kw1 = p.kappa * (1.0 - p.omega);
    let mut scores = Vec::with_capacity(st.len());
    for i in 0..st.len() {
        let f0 = ght_side(st.w0[i], st.p0[i], st.d0[i], p.nu, p.tau, kw0);
        let f1 = ght_side(st.w1[i], st.p1[i], st.d1[i], p.nu, p.tau, kw1);
        scores.push(f0 + f1);
    }
    result_from_scores(h, scores)
}

#[inline]
fn met_side(w: f64, d: f64) -> f64 {
    w * clip(d / w).ln() - 2.0 * w * w.ln()
}

/// Minimum error thresholding. The returned `scores` are the negated
/// objective `-l` so the shared argmax rule applies.
pub fn met(h: &Histogram) -> ThresholdResult {
    let st = split_stats(h);
    let mut scores = Vec::with_capacity(st.len());
    for i in 0..st.len() {
        let ell = 1.0 + met_side(st.w0[i], st.d0[i]) + met_side(st.w1[i], st.d1[i]);
        scores.push(-ell);
    }
    result_from_scores(h, scores)
}

/// Otsu's method: maximize inter-class variance.
pub fn otsu(h: &Histogram) -> ThresholdResult {
    let st = split_stats(h);
    let mut scores = Vec::with_capacity(st.len());
    for i in 0..st.len() {
        let dmu = st.mu0_c[i] - st.mu1_c[i];
        scores.push(st.w0[i] * st.w1[i] * dmu * dmu);
    }
    result_from_scores(h, scores)
}

/// Otsu's method in the total-minus-intra-class-distortion form. Ranks
/// identically to [`otsu`]; exists to cross-check the algebraic identity.
pub fn otsu_distortion_form(h: &Histogram) -> ThresholdResult {
    let st = split_stats(h);
    let mut scores = Vec::with_capacity(st.len());
    for i in 0..st.len() {
        scores.push(st.total * st.total_xx - st.total_x * st.total_x - st.total * (st.d0[i] + st.d1[i]));
    }
    result_from_scores(h, scores)
}

/// Weighted percentile: the split whose low-side mass fraction is closest to
/// `omega` (in cross-entropy distance). `scores` are the negated objective.
pub fn wprctile(h: &Histogram, omega: f64) -> Result<ThresholdResult, GhtError> {
    if !omega.is_finite() || !(0.0..=1.0).contains(&omega) {
        return Err(GhtError::InvalidParam(format!(
            "omega must be in [0, 1], got {omega}"
        )));
    }
    let st = split_stats(h);
    let mut scores = Vec::with_capacity(st.len());
    for i in 0..st.len() {
        let hh = -(omega * st.p0[i].ln() + (1.0 - omega) * st.p1[i].ln());
        scores.push(-hh);
    }
    Ok(result_from_scores(h, scores))
}

/// Convenience for the per-split scores of [`ght`] together with the stats
/// they were computed from; used by the reference oracles and tests.
pub fn ght_scores_with_stats(h: &Histogram, p: &GhtParams) -> (Vec<f64>, SplitStats) {
    let st = split_stats(h);
    let kw0 = p.kappa * p.omega;
    let kw1 = p.kappa * (1.0 - p.omega);
    let mut scores = Vec::with_capacity(st.len());
    for i in 0..st.len() {
        let f0 = ght_side(st.w0[i], st.p0[i], st.d0[i], p.nu, p.tau, kw0);
        let f1 = ght_side(st.w1[i], st.p1[i], st.d1[i], p.nu, p.tau, kw1);
        scores.push(f0 + f1);
    }
    (scores, st)
}
