//! Binarization quality metrics and evaluation reports.
//!
//! F1 and PSNR are computed on the ink class of {0,1} masks. DRD follows
//! the document-binarization convention: a 5x5 reciprocal-Euclidean-distance
//! weight matrix with zero center, normalized to sum 1, accumulated over
//! every disagreeing pixel against the ground-truth neighborhood, divided
//! by the count of non-uniform 8x8 ground-truth blocks (NUBN).

use serde::Serialize;

use crate::error::GhtError;
use crate::image::{BinaryImage, GrayImage};

fn check_dims(pred: &BinaryImage, gt: &BinaryImage) -> Result<(), GhtError> {
    if pred.width() != gt.width() || pred.height() != gt.height() {
        return Err(GhtError::DimensionMismatch(pred.width(), pred.height(), gt.width(), gt.height()));
    }
    Ok(())
}

/// F1 of the ink class, scaled to [0, 100]. Identical masks with no ink
/// anywhere count as perfect agreement.
pub fn f1(pred: &BinaryImage, gt: &BinaryImage) -> Result<f64, GhtError> {
    check_dims(pred, gt)?;
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for (&p, &g) in pred.mask().iter().zip(gt.mask()) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        return Ok(100.0);
    }
    Ok(100.0 * ((2 * tp) as f64 / denom as f64))
}

/// PSNR of the {0,1} masks: `10 log10(1 / MSE)`. Identical masks give
/// positive infinity; callers aggregating must treat that as a sentinel.
pub fn psnr(pred: &BinaryImage, gt: &BinaryImage) -> Result<f64, GhtError> {
    check_dims(pred, gt)?;
    let wrong = pred
        .mask()
        .iter()
        .zip(gt.mask())
        .filter(|(p, g)| p != g)
        .count();
    if wrong == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = wrong as f64 / pred.mask().len() as f64;
    Ok(10.0 * (1.0 / mse).log10())
}

/// Count of 8x8 ground-truth blocks containing both classes. Partial blocks
/// at the right and bottom edges participate.
pub fn nubn(gt: &BinaryImage) -> usize {
    let (w, h) = (gt.width(), gt.height());
    let mut count = 0;
    for by in (0..h).step_by(8) {
        for bx in (0..w).step_by(8) {
            let mut ink = false;
            let mut bg = false;
            'block: for y in by..(by + 8).min(h) {
                for x in bx..(bx + 8).min(w) {
                    if gt.get(x, y) {
                        ink = true;
                    } else {
                        bg = true;
                    }
                    if ink && bg {
                        break 'block;
                    }
                }
            }
            if ink && bg {
                count += 1;
            }
        }
    }
    count
}

/// 5x5 reciprocal-distance weights, zero center, normalized to sum 1.
fn drd_weights() -> [[f64; 5]; 5] {
    let mut w = [[0.0f64; 5]; 5];
    let mut sum = 0.0;
    for (i, row) in w.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let dy = i as f64 - 2.0;
            let dx = j as f64 - 2.0;
            if dx != 0.0 || dy != 0.0 {
                *cell = 1.0 / (dx * dx + dy * dy).sqrt();
                sum += *cell;
            }
        }
    }
    for row in w.iter_mut() {
        for cell in row.iter_mut() {
            *cell /= sum;
        }
    }
    w
}

/// Distance-reciprocal distortion. For every pixel where `pred` disagrees
/// with `gt`, accumulates the weighted ground-truth mismatch over the 5x5
/// neighborhood (out-of-bounds neighbors contribute nothing), then divides
/// by NUBN. A uniform ground truth has no meaningful normalizer and is an
/// error.
pub fn drd(pred: &BinaryImage, gt: &BinaryImage) -> Result<f64, GhtError> {
    check_dims(pred, gt)?;
    let blocks = nubn(gt);
    if blocks == 0 {
        return Err(GhtError::UniformGroundTruth);
    }
    let w = drd_weights();
    let (width, height) = (gt.width() as isize, gt.height() as isize);
    let mut total = 0.0;
    for y in 0..height {
        for x in 0..width {
            let p = pred.get(x as usize, y as usize);
            if p == gt.get(x as usize, y as usize) {
                continue;
            }
            let pv = p as u8 as f64;
            let mut d = 0.0;
            for (i, row) in w.iter().enumerate() {
                let ny = y + i as isize - 2;
                if ny < 0 || ny >= height {
                    continue;
                }
                for (j, &wij) in row.iter().enumerate() {
                    let nx = x + j as isize - 2;
                    if nx < 0 || nx >= width {
                        continue;
                    }
                    let gv = gt.get(nx as usize, ny as usize) as u8 as f64;
                    d += (gv - pv).abs() * wij;
                }
            }
            total += d;
        }
    }
    Ok(total / blocks as f64)
}

/// Exhaustive best global threshold against the ground truth: the t in
/// 0..=255 maximizing ink F1, lowest t on ties. Returns `(t, f1)`.
pub fn oracle_global_threshold(img: &GrayImage, gt: &BinaryImage) -> Result<(f64, f64), GhtError> {
    if img.width() != gt.width() || img.height() != gt.height() {
        return Err(GhtError::DimensionMismatch(img.width(), img.height(), gt.width(), gt.height()));
    }
    let mut total = [0u64; 256];
    let mut ink = [0u64; 256];
    for (&v, &g) in img.pixels().iter().zip(gt.mask()) {
        total[v as usize] += 1;
        if g {
            ink[v as usize] += 1;
        }
    }
    let ink_total: u64 = ink.iter().sum();
    let (mut best_t, mut best_f1) = (0usize, f64::NEG_INFINITY);
    let (mut tp, mut fp) = (0u64, 0u64);
    for t in 0..256 {
        tp += ink[t];
        fp += total[t] - ink[t];
        let fn_ = ink_total - tp;
        let denom = 2 * tp + fp + fn_;
        let f = if denom == 0 { 100.0 } else { 100.0 * ((2 * tp) as f64 / denom as f64) };
        if f > best_f1 {
            best_f1 = f;
            best_t = t;
        }
    }
    Ok((best_t as f64, best_f1))
}

/// Per-image evaluation result.
#[derive(Debug, Clone, Serialize)]
pub struct ImageRecord {
    pub id: String,
    pub f1: f64,
    pub psnr: f64,
    pub drd: f64,
}

/// Mean and sample standard deviation (n - 1 in the denominator; zero for
/// a single value).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
}

fn aggregate_values(values: &[f64]) -> Aggregate {
    if values.is_empty() {
        return Aggregate { mean: f64::INFINITY, std: 0.0 };
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Aggregate { mean, std }
}

/// Corpus-level report. Infinite PSNR values are excluded from the PSNR
/// aggregate (they are sentinels for identical masks, not measurements);
/// JSON renders any that remain in the records as null.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub records: Vec<ImageRecord>,
    pub f1: Aggregate,
    pub psnr: Aggregate,
    pub drd: Aggregate,
}

pub fn aggregate(records: Vec<ImageRecord>) -> Result<EvalReport, GhtError> {
    if records.is_empty() {
        return Err(GhtError::EmptyInput("no evaluation records".into()));
    }
    let f1s: Vec<f64> = records.iter().map(|r| r.f1).collect();
    let psnrs: Vec<f64> = records.iter().map(|r| r.psnr).filter(|v| v.is_finite()).collect();
    let drds: Vec<f64> = records.iter().map(|r| r.drd).collect();
    Ok(EvalReport {
        f1: aggregate_values(&f1s),
        psnr: aggregate_values(&psnrs),
        drd: aggregate_values(&drds),
        records,
    })
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per image: `id,f1,psnr,drd`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), GhtError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["id", "f1", "psnr", "drd"])
            .map_err(|e| GhtError::HistogramCsv(e.to_string()))?;
        for r in &self.records {
            wtr.write_record([
                r.id.clone(),
                r.f1.to_string(),
                r.psnr.to_string(),
                r.drd.to_string(),
            ])
            .map_err(|e| GhtError::HistogramCsv(e.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }
}
