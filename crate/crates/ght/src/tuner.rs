//! Coordinate-descent hyperparameter search over mean corpus F1.
//!
//! All four parameters move in log2 space; omega's exponent is clamped to
//! at most 0 so the value stays in (0, 1]. nu and kappa additionally get an
//! explicit zero candidate, since 0 is infinitely far away in log space but
//! is exactly where the Otsu-like and MET-like corners live. Accepted
//! exponents are quantized to a 0.125 grid. A full sweep with no accepted
//! move halves every step; the search stops when all steps fall below the
//! minimum or the sweep budget runs out. Everything is deterministic.

use rayon::prelude::*;

use crate::error::GhtError;
use crate::image::{run_binarization, Algorithm, BinaryImage, GrayImage};
use crate::metrics::f1;
use crate::threshold::GhtParams;

pub const EXP_GRID: f64 = 0.125;
const EXP_LIMIT: f64 = 128.0;

#[derive(Debug, Clone)]
pub struct TuneConfig {
    pub init: GhtParams,
    /// Log2 step per parameter, ordered nu, tau, kappa, omega.
    pub steps: [f64; 4],
    pub shrink: f64,
    pub max_sweeps: usize,
    pub min_step: f64,
}

impl TuneConfig {
    fn with_init(init: GhtParams) -> Self {
        Self {
            init,
            steps: [2.0, 1.0, 2.0, 0.5],
            shrink: 0.5,
            max_sweeps: 20,
            min_step: EXP_GRID,
        }
    }

    /// Start near the document-binarization sweet spot.
    pub fn warm() -> Self {
        Self::with_init(
            GhtParams::new(2f64.powi(30), 2f64.powi(3), 2f64.powi(22), 2f64.powi(-3))
                .expect("preset is valid"),
        )
    }

    /// Start from an uninformative point.
    pub fn cold() -> Self {
        Self::with_init(GhtParams::new(1.0, 1.0, 1.0, 0.5).expect("preset is valid"))
    }

    fn validate(&self) -> Result<(), GhtError> {
        if self.steps.iter().any(|&s| !s.is_finite() || s <= 0.0) {
            return Err(GhtError::InvalidParam("steps must be positive".into()));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(GhtError::InvalidParam("shrink must be in (0, 1)".into()));
        }
        if self.max_sweeps == 0 {
            return Err(GhtError::InvalidParam("max_sweeps must be at least 1".into()));
        }
        if !(self.min_step > 0.0) {
            return Err(GhtError::InvalidParam("min_step must be positive".into()));
        }
        Ok(())
    }
}

/// One objective evaluation. `exps` are the candidate's log2 exponents in
/// nu, tau, kappa, omega order; `None` marks an exact zero.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub sweep: usize,
    pub param: &'static str,
    pub exps: [Option<f64>; 4],
    pub mean_f1: f64,
}

#[derive(Debug, Clone)]
pub struct TuneResult {
    pub params: GhtParams,
    pub mean_f1: f64,
    pub trace: Vec<TraceRow>,
}

#[derive(Debug, Clone, Copy)]
struct Coord {
    zero: bool,
    /// Last non-zero exponent; the escape point when leaving zero.
    exp: f64,
}

const PARAM_NAMES: [&str; 4] = ["nu", "tau", "kappa", "omega"];

fn snap(e: f64) -> f64 {
    (e / EXP_GRID).round() * EXP_GRID
}

fn init_state(p: &GhtParams) -> [Coord; 4] {
    let vals = [p.nu(), p.tau(), p.kappa(), p.omega()];
    let mut st = [Coord { zero: false, exp: 0.0 }; 4];
    for i in 0..4 {
        if vals[i] > 0.0 {
            st[i] = Coord { zero: false, exp: snap(vals[i].log2()) };
        } else {
            st[i] = Coord { zero: true, exp: 0.0 };
        }
    }
    // Omega lives in (0, 1]; its exponent may not be positive.
    st[3].exp = st[3].exp.min(0.0);
    st
}

fn materialize(st: &[Coord; 4]) -> Option<GhtParams> {
    let v = |c: &Coord| if c.zero { 0.0 } else { c.exp.exp2() };
    GhtParams::new(v(&st[0]), v(&st[1]), v(&st[2]), v(&st[3])).ok()
}

fn exps_of(st: &[Coord; 4]) -> [Option<f64>; 4] {
    let mut out = [None; 4];
    for i in 0..4 {
        if !st[i].zero {
            out[i] = Some(st[i].exp);
        }
    }
    out
}

fn objective(corpus: &[(GrayImage, BinaryImage)], params: &GhtParams) -> f64 {
    let alg = Algorithm::Ght(params.clone());
    let scores: Vec<f64> = corpus
        .par_iter()
        .map(|(img, gt)| {
            let (pred, _) = run_binarization(img, &alg).expect("corpus images are non-empty");
            f1(&pred, gt).expect("corpus dimensions are validated")
        })
        .collect();
    scores.iter().sum::<f64>() / scores.len() as f64
}

/// Candidate moves for one coordinate: both exponent neighbors, plus the
/// exact zero for nu and kappa when not already there.
fn candidates(idx: usize, c: Coord, step: f64) -> Vec<Coord> {
    let mut out = Vec::with_capacity(3);
    for dir in [-1.0, 1.0] {
        let e = snap(c.exp + dir * step);
        if e.abs() > EXP_LIMIT {
            continue;
        }
        if idx == 3 && e > 0.0 {
            continue;
        }
        if c.zero || e != c.exp {
            out.push(Coord { zero: false, exp: e });
        }
    }
    if (idx == 0 || idx == 2) && !c.zero {
        out.push(Coord { zero: true, exp: c.exp });
    }
    out
}

/// Coordinate descent maximizing mean F1 of GHT binarization over the
/// corpus. Every objective evaluation lands in the trace, including the
/// initial point (sweep 0, param "init").
pub fn tune(corpus: &[(GrayImage, BinaryImage)], cfg: &TuneConfig) -> Result<TuneResult, GhtError> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(GhtError::EmptyInput("empty training corpus".into()));
    }
    for (img, gt) in corpus {
        if img.width() != gt.width() || img.height() != gt.height() {
            return Err(GhtError::DimensionMismatch(img.width(), img.height(), gt.width(), gt.height()));
        }
    }

    let mut state = init_state(&cfg.init);
    let mut steps = cfg.steps;
    let params = materialize(&state).ok_or_else(|| GhtError::InvalidParam("initial point invalid".into()))?;
    let mut best_f1 = objective(corpus, &params);
    let mut trace = vec![TraceRow { sweep: 0, param: "init", exps: exps_of(&state), mean_f1: best_f1 }];

    for sweep in 1..=cfg.max_sweeps {
        let mut improved = false;
        for idx in 0..4 {
            for cand in candidates(idx, state[idx], steps[idx]) {
                let mut trial = state;
                trial[idx] = cand;
                let Some(p) = materialize(&trial) else { continue };
                let score = objective(corpus, &p);
                trace.push(TraceRow {
                    sweep,
                    param: PARAM_NAMES[idx],
                    exps: exps_of(&trial),
                    mean_f1: score,
                });
                if score > best_f1 {
                    best_f1 = score;
                    state = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            for s in steps.iter_mut() {
                *s *= cfg.shrink;
            }
            if steps.iter().all(|&s| s < cfg.min_step) {
                break;
            }
        }
    }

    let params = materialize(&state).expect("accepted states are valid");
    Ok(TuneResult { params, mean_f1: best_f1, trace })
}

/// Trace as CSV: `sweep,param,nu_log2,tau_log2,kappa_log2,omega_log2,mean_f1`
/// with the literal `zero` marking exact zeros.
pub fn write_trace_csv<W: std::io::Write>(rows: &[TraceRow], w: W) -> Result<(), GhtError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["sweep", "param", "nu_log2", "tau_log2", "kappa_log2", "omega_log2", "mean_f1"])
        .map_err(|e| GhtError::HistogramCsv(e.to_string()))?;
    for r in rows {
        let cell = |e: Option<f64>| e.map_or_else(|| "zero".to_string(), |v| v.to_string());
        wtr.write_record([
            r.sweep.to_string(),
            r.param.to_string(),
            cell(r.exps[0]),
            cell(r.exps[1]),
            cell(r.exps[2]),
            cell(r.exps[3]),
            r.mean_f1.to_string(),
        ])
        .map_err(|e| GhtError::HistogramCsv(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}
