//! Histogram representation and the shared per-split cumulative statistics.
//!
//! Every thresholder consumes the same eight per-split vectors (class
//! weights, mixture fractions, means, distortions), all derived from one
//! sequential cumulative pass. Numerical conventions that the rest of the
//! crate relies on:
//!
//! * totals are read off the last element of the same cumulative chain that
//!   produces the per-split prefixes, so `w0 + w1` equals the total count
//!   bitwise at every split;
//! * bin centers are re-expressed around their midrange before the
//!   cumulative pass (means are shifted back on export), which removes the
//!   large-offset cancellation that would otherwise break the affine
//!   invariance of the thresholds;
//! * class weights are clamped below at [`CLIP`] before any division and
//!   distortions at zero, absorbing catastrophic cancellation.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::GhtError;

/// Lower clamp applied to class weights and posterior variances before any
/// division or logarithm.
pub const CLIP: f64 = 1e-30;

#[inline]
pub(crate) fn clip(z: f64) -> f64 {
    if z > CLIP {
        z
    } else {
        CLIP
    }
}

/// Sorted bin centers plus nonnegative counts; the universal input.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    x: Vec<f64>,
    n: Vec<f64>,
}

impl Histogram {
    /// Validates and wraps bin centers `x` (nondecreasing) and counts `n`
    /// (nonnegative, positive total). Both must have the same length >= 2.
    pub fn new(x: Vec<f64>, n: Vec<f64>) -> Result<Self, GhtError> {
        if x.len() != n.len() {
            return Err(GhtError::InvalidParam(format!(
                "x and n lengths differ: {} vs {}",
                x.len(),
                n.len()
            )));
        }
        if x.len() < 2 {
            return Err(GhtError::TooFewBins(x.len()));
        }
        for (i, &xi) in x.iter().enumerate() {
            if !xi.is_finite() {
                return Err(GhtError::NonFiniteBin(i));
            }
        }
        for i in 1..x.len() {
            if x[i] < x[i - 1] {
                return Err(GhtError::UnsortedBins(i));
            }
        }
        let mut total = 0.0;
        for (i, &ni) in n.iter().enumerate() {
            if !ni.is_finite() || ni < 0.0 {
                return Err(GhtError::NegativeCount(i));
            }
            total += ni;
        }
        if total <= 0.0 {
            return Err(GhtError::ZeroTotal);
        }
        Ok(Histogram { x, n })
    }

    /// 256-bin histogram of 8-bit intensities: `x = [0, 1, ..., 255]` and
    /// `n[v]` counts the pixels with value `v`.
    pub fn from_pixels(values: &[u8]) -> Result<Self, GhtError> {
        if values.is_empty() {
            return Err(GhtError::EmptyImage);
        }
        let mut n = vec![0.0; 256];
        for &v in values {
            n[v as usize] += 1.0;
        }
        let x = (0..256).map(|v| v as f64).collect();
        Ok(Histogram { x, n })
    }

    /// Histogram of individually weighted samples: `x = values`, all counts 1.
    /// Thresholding it is equivalent to thresholding the quantized histogram
    /// of the same data (same binarization partition).
    pub fn from_sorted_values(values: &[f64]) -> Result<Self, GhtError> {
        if values.len() < 2 {
            return Err(GhtError::TooFewBins(values.len()));
        }
        let n = vec![1.0; values.len()];
        Self::new(values.to_vec(), n)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn n(&self) -> &[f64] {
        &self.n
    }

    /// Number of bins K.
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        false // K >= 2 by construction
    }

    /// Sequential total count.
    pub fn total(&self) -> f64 {
        let mut s = 0.0;
        for &v in &self.n {
            s += v;
        }
        s
    }

    /// True when at most one distinct bin holds all the mass; thresholding
    /// still works (the tie rule resolves it) but a binarization of such an
    /// input is all-one-class.
    pub fn is_degenerate(&self) -> bool {
        let mut seen: Option<f64> = None;
        for (i, &ni) in self.n.iter().enumerate() {
            if ni > 0.0 {
                match seen {
                    None => seen = Some(self.x[i]),
                    Some(xv) if xv == self.x[i] => {}
                    Some(_) => return false,
                }
            }
        }
        true
    }

    /// Reads the `x,n` CSV format. Rejects unsorted centers and negative
    /// counts via the same validation as [`Histogram::new`].
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self, GhtError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        {
            let headers = rdr
                .headers()
                .map_err(|e| GhtError::HistogramCsv(e.to_string()))?;
            if headers.len() < 2 || &headers[0] != "x" || &headers[1] != "n" {
                return Err(GhtError::HistogramCsv(format!(
                    "expected header 'x,n', got '{}'",
                    headers.iter().collect::<Vec<_>>().join(",")
                )));
            }
        }
        let mut x = Vec::new();
        let mut n = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| GhtError::HistogramCsv(e.to_string()))?;
            if rec.len() < 2 {
                return Err(GhtError::HistogramCsv(format!("row {}: missing field", line + 2)));
            }
            let parse = |s: &str, what: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| GhtError::HistogramCsv(format!("row {}: bad {} '{}'", line + 2, what, s)))
            };
            x.push(parse(&rec[0], "x")?);
            n.push(parse(&rec[1], "n")?);
        }
        Self::new(x, n)
    }

    pub fn read_csv_path(path: &Path) -> Result<Self, GhtError> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    /// Writes the `x,n` CSV format.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<(), GhtError> {
        writeln!(writer, "x,n")?;
        for i in 0..self.len() {
            writeln!(writer, "{},{}", self.x[i], self.n[i])?;
        }
        Ok(())
    }

    /// Convolves the counts with a sampled Gaussian kernel of standard
    /// deviation `sigma` (in bins). Full convolution: the grid is extended by
    /// the kernel radius on both sides, so no mass is lost. Requires an
    /// (approximately) uniformly spaced grid.
    pub fn blurred(&self, sigma: f64) -> Result<Histogram, GhtError> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(GhtError::InvalidParam(format!("blur sigma must be positive, got {sigma}")));
        }
        let k = self.len();
        let dx = (self.x[k - 1] - self.x[0]) / (k - 1) as f64;
        if !(dx > 0.0) {
            return Err(GhtError::InvalidParam("blur needs distinct bin centers".into()));
        }
        for i in 1..k {
            let step = self.x[i] - self.x[i - 1];
            if (step - dx).abs() > 1e-9 * dx.abs().max(1.0) {
                return Err(GhtError::InvalidParam(
                    "blur requires a uniformly spaced grid".into(),
                ));
            }
        }
        let r = (4.0 * sigma).ceil() as usize;
        let mut kernel = Vec::with_capacity(2 * r + 1);
        let mut ksum = 0.0;
        for o in -(r as i64)..=(r as i64) {
            let z = o as f64 / sigma;
            let w = (-0.5 * z * z).exp();
            kernel.push(w);
            ksum += w;
        }
        for w in &mut kernel {
            *w /= ksum;
        }
        let out_len = k + 2 * r;
        let mut n = vec![0.0; out_len];
        for (i, &ni) in self.n.iter().enumerate() {
            if ni == 0.0 {
                continue;
            }
            for (j, &kw) in kernel.iter().enumerate() {
                n[i + j] += ni * kw;
            }
        }
        let x = (0..out_len)
            .map(|j| self.x[0] + dx * (j as f64 - r as f64))
            .collect();
        Histogram::new(x, n)
    }
}

/// Per-split cumulative statistics: class weights, mixture fractions,
/// means and distortions on each side of all K-1 splits.
#[derive(Debug, Clone)]
pub struct SplitStats {
    pub w0: Vec<f64>,
    pub w1: Vec<f64>,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    /// Weighted mean below the split, in original bin units.
    pub mu0: Vec<f64>,
    /// Weighted mean above the split, in original bin units.
    pub mu1: Vec<f64>,
    pub d0: Vec<f64>,
    pub d1: Vec<f64>,
    /// Means in midrange-centered units; the score formulas use these.
    pub(crate) mu0_c: Vec<f64>,
    pub(crate) mu1_c: Vec<f64>,
    /// Chain totals (count, first moment, second moment) in centered units.
    pub(crate) total: f64,
    pub(crate) total_x: f64,
    pub(crate) total_xx: f64,
}

impl SplitStats {
    /// Number of splits (K - 1).
    pub fn len(&self) -> usize {
        self.w0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w0.is_empty()
    }
}

/// One cumulative pass plus totals: the eight split-stat vectors.
///
/// Weights are clipped below at [`CLIP`] before division; distortions are
/// clamped to >= 0 to absorb cancellation in the moment-difference form.
pub fn split_stats(h: &Histogram) -> SplitStats {
    let x = h.x();
    let n = h.n();
    let k = h.len();
    let m = (x[0] + x[k - 1]) / 2.0;

    let mut csum = Vec::with_capacity(k);
    let mut csum_x = Vec::with_capacity(k);
    let mut csum_xx = Vec::with_capacity(k);
    let (mut a, mut ax, mut axx) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..k {
        let xc = x[i] - m;
        a += n[i];
        ax += n[i] * xc;
        axx += n[i] * xc * xc;
        csum.push(a);
        csum_x.push(ax);
        csum_xx.push(axx);
    }
    let (total, total_x, total_xx) = (csum[k - 1], csum_x[k - 1], csum_xx[k - 1]);

    let s = k - 1;
    let mut st = SplitStats {
        w0: Vec::with_capacity(s),
        w1: Vec::with_capacity(s),
        p0: Vec::with_capacity(s),
        p1: Vec::with_capacity(s),
        mu0: Vec::with_capacity(s),
        mu1: Vec::with_capacity(s),
        d0: Vec::with_capacity(s),
        d1: Vec::with_capacity(s),
        mu0_c: Vec::with_capacity(s),
        mu1_c: Vec::with_capacity(s),
        total,
        total_x,
        total_xx,
    };
    for i in 0..s {
        let w0 = clip(csum[i]);
        let w1 = clip(total - csum[i]);
        let wsum = w0 + w1;
        let p0 = w0 / wsum;
        let p1 = w1 / wsum;
        let mu0 = csum_x[i] / w0;
        let mu1 = (total_x - csum_x[i]) / w1;
        let d0 = (csum_xx[i] - w0 * mu0 * mu0).max(0.0);
        let d1 = ((total_xx - csum_xx[i]) - w1 * mu1 * mu1).max(0.0);
        st.w0.push(w0);
        st.w1.push(w1);
        st.p0.push(p0);
        st.p1.push(p1);
        st.mu0_c.push(mu0);
        st.mu1_c.push(mu1);
        st.mu0.push(mu0 + m);
        st.mu1.push(mu1 + m);
        st.d0.push(d0);
        st.d1.push(d1);
    }
    st
}
