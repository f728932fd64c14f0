//! Shared randomized-histogram generators for the integration tests.
//!
//! Counts come from a random mixture of point masses, uniforms, and
//! Gaussians sampled onto an integer bin grid, so zero bins, spikes, and
//! heavy overlaps all occur naturally.
#![allow(dead_code)] // not every test binary uses every generator

use ght::{GhtParams, Histogram};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn mixture_counts(rng: &mut ChaCha8Rng, k: usize, nexp: (f64, f64)) -> Vec<f64> {
    let kf = k as f64;
    enum Comp {
        Spike(usize),
        Unif(f64, f64),
        Gauss(Normal<f64>),
    }
    let n_spike = rng.random_range(0..=2);
    let n_unif = rng.random_range(0..=2);
    let mut n_gauss = rng.random_range(0..=3);
    if n_spike + n_unif + n_gauss == 0 {
        n_gauss = 1;
    }
    let mut comps = Vec::new();
    for _ in 0..n_spike {
        comps.push(Comp::Spike(rng.random_range(0..k)));
    }
    for _ in 0..n_unif {
        let lo = rng.random_range(0.0..kf);
        let hi = rng.random_range(lo..kf).max(lo + 1e-9);
        comps.push(Comp::Unif(lo, hi));
    }
    for _ in 0..n_gauss {
        let c = rng.random_range(0.0..kf);
        let s = rng.random_range(0.3..kf / 3.0);
        comps.push(Comp::Gauss(Normal::new(c, s).expect("finite params")));
    }
    let weights: Vec<f64> = (0..comps.len()).map(|_| rng.random_range(0.05..1.0)).collect();
    let wsum: f64 = weights.iter().sum();
    let nsamp = 10f64.powf(rng.random_range(nexp.0..nexp.1)) as usize;

    let mut n = vec![0.0f64; k];
    for _ in 0..nsamp {
        let mut u = rng.random_range(0.0..wsum);
        let mut ci = comps.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                ci = i;
                break;
            }
            u -= w;
        }
        let bin = match &comps[ci] {
            Comp::Spike(i) => *i,
            Comp::Unif(lo, hi) => (rng.random_range(*lo..*hi).floor().max(0.0) as usize).min(k - 1),
            Comp::Gauss(g) => (g.sample(rng).floor().max(0.0) as usize).min(k - 1),
        };
        n[bin] += 1.0;
    }
    if n.iter().sum::<f64>() <= 0.0 {
        n[rng.random_range(0..k)] = 1.0;
    }
    n
}

/// Integer-grid histogram, zero bins kept.
pub fn int_histogram(rng: &mut ChaCha8Rng, kmin: usize, kmax: usize, nexp: (f64, f64)) -> Histogram {
    let k = rng.random_range(kmin..=kmax);
    let n = mixture_counts(rng, k, nexp);
    let x = (0..k).map(|v| v as f64).collect();
    Histogram::new(x, n).expect("generator output is valid")
}

/// Like [`int_histogram`] but half the time the grid is continuous
/// (sorted uniform draws on [0, 256)).
pub fn mixed_grid_histogram(rng: &mut ChaCha8Rng, kmin: usize, kmax: usize, nexp: (f64, f64)) -> Histogram {
    let k = rng.random_range(kmin..=kmax);
    let n = mixture_counts(rng, k, nexp);
    let x: Vec<f64> = if rng.random_range(0.0..1.0) < 0.5 {
        let mut x: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..256.0)).collect();
        x.sort_by(f64::total_cmp);
        x
    } else {
        (0..k).map(|v| v as f64).collect()
    };
    Histogram::new(x, n).expect("generator output is valid")
}

/// Integer-grid histogram trimmed so both end bins are populated
/// (interior zeros stay); the grid is re-indexed from 0 after trimming.
pub fn trimmed_histogram(rng: &mut ChaCha8Rng, kmin: usize, kmax: usize, nexp: (f64, f64)) -> Histogram {
    loop {
        let h = int_histogram(rng, kmin, kmax, nexp);
        let n = h.n();
        let first = n.iter().position(|&v| v > 0.0).expect("positive total");
        let last = n.iter().rposition(|&v| v > 0.0).expect("positive total");
        if last - first < 1 {
            continue;
        }
        let n: Vec<f64> = n[first..=last].to_vec();
        let x = (0..n.len()).map(|v| v as f64).collect();
        return Histogram::new(x, n).expect("trim keeps validity");
    }
}

/// Wide parameter draw including exact zeros for nu, tau, kappa.
pub fn full_params(rng: &mut ChaCha8Rng) -> GhtParams {
    let nu = if rng.random_range(0.0..1.0) < 0.2 { 0.0 } else { 2f64.powf(rng.random_range(-10.0..40.0)) };
    let tau = if rng.random_range(0.0..1.0) < 0.1 { 0.0 } else { 2f64.powf(rng.random_range(-10.0..8.0)) };
    let kappa = if rng.random_range(0.0..1.0) < 0.2 { 0.0 } else { 2f64.powf(rng.random_range(-10.0..30.0)) };
    let omega = rng.random_range(0.0..1.0);
    GhtParams::new(nu, tau, kappa, omega).expect("draw is valid")
}

/// Moderate parameter draw used with the trimmed family.
pub fn moderate_params(rng: &mut ChaCha8Rng) -> GhtParams {
    let nu = if rng.random_range(0.0..1.0) < 0.25 { 0.0 } else { 2f64.powf(rng.random_range(0.0..30.0)) };
    let tau = if rng.random_range(0.0..1.0) < 0.1 { 0.0 } else { 2f64.powf(rng.random_range(-4.0..8.0)) };
    let kappa = if rng.random_range(0.0..1.0) < 0.3 { 0.0 } else { 2f64.powf(rng.random_range(-8.0..25.0)) };
    let omega = rng.random_range(0.05..0.95);
    GhtParams::new(nu, tau, kappa, omega).expect("draw is valid")
}
