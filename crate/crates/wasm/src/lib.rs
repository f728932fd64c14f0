//! WebAssembly bindings for the browser demo in `www/`. Three entry points
//! mirror the CLI: threshold a histogram given as CSV text, sweep one
//! hyperparameter over a grid, and binarize an uploaded image. Everything
//! runs client side; inputs and outputs are plain strings and byte buffers
//! so the page needs no framework.
//!
//! The logic lives in plain functions returning `Result<_, String>` so it
//! can be tested on the host; `JsError` can only be constructed inside an
//! actual wasm runtime.

use ght::image::{run_binarization, Algorithm, GrayImage};
use ght::{ght, GhtParams, Histogram};
use wasm_bindgen::prelude::*;

fn parse_histogram(csv: &str) -> Result<Histogram, String> {
    Histogram::read_csv(csv.as_bytes()).map_err(|e| e.to_string())
}

fn parse_params(nu: f64, tau: f64, kappa: f64, omega: f64) -> Result<GhtParams, String> {
    GhtParams::new(nu, tau, kappa, omega).map_err(|e| e.to_string())
}

fn parse_algorithm(name: &str, params: GhtParams) -> Result<Algorithm, String> {
    match name {
        "ght" => Ok(Algorithm::Ght(params)),
        "met" => Ok(Algorithm::Met),
        "otsu" => Ok(Algorithm::Otsu),
        "otsu-distortion" => Ok(Algorithm::OtsuDistortion),
        "wprctile" => Ok(Algorithm::Wprctile(params.omega())),
        other => Err(format!("unknown algorithm {other:?}")),
    }
}

fn run_threshold(
    csv: &str,
    algorithm: &str,
    nu: f64,
    tau: f64,
    kappa: f64,
    omega: f64,
) -> Result<String, String> {
    let h = parse_histogram(csv)?;
    let params = parse_params(nu, tau, kappa, omega)?;
    let res = parse_algorithm(algorithm, params)?.threshold(&h).map_err(|e| e.to_string())?;
    Ok(serde_json::json!({
        "t": res.t,
        "x": &h.x()[..res.scores.len()],
        "scores": res.scores,
    })
    .to_string())
}

#[allow(clippy::too_many_arguments)]
fn run_sweep(
    csv: &str,
    param: &str,
    min: f64,
    max: f64,
    count: usize,
    nu: f64,
    tau: f64,
    kappa: f64,
    omega: f64,
) -> Result<String, String> {
    if count < 2 {
        return Err(format!("count must be at least 2, got {count}"));
    }
    if !(min < max) {
        return Err(format!("min must be below max, got {min} .. {max}"));
    }
    if param == "omega" && !((0.0..=1.0).contains(&min) && (0.0..=1.0).contains(&max)) {
        return Err("omega sweep bounds must lie in [0, 1]".into());
    }
    let h = parse_histogram(csv)?;
    let base = parse_params(nu, tau, kappa, omega)?;

    let mut out = String::from("value,threshold\n");
    for i in 0..count {
        let pos = min + (max - min) * i as f64 / (count - 1) as f64;
        let (value, params) = match param {
            "nu" => (pos.exp2(), GhtParams::new(pos.exp2(), base.tau(), base.kappa(), base.omega())),
            "tau" => (pos.exp2(), GhtParams::new(base.nu(), pos.exp2(), base.kappa(), base.omega())),
            "kappa" => (pos.exp2(), GhtParams::new(base.nu(), base.tau(), pos.exp2(), base.omega())),
            "omega" => (pos, GhtParams::new(base.nu(), base.tau(), base.kappa(), pos)),
            other => return Err(format!("unknown sweep parameter {other:?}")),
        };
        let t = ght(&h, &params.map_err(|e| e.to_string())?).t;
        out.push_str(&format!("{value},{t}\n"));
    }
    Ok(out)
}

fn run_binarize(
    bytes: &[u8],
    algorithm: &str,
    nu: f64,
    tau: f64,
    kappa: f64,
    omega: f64,
) -> Result<BinarizeResult, String> {
    let img = GrayImage::decode(bytes).map_err(|e| e.to_string())?;
    let params = parse_params(nu, tau, kappa, omega)?;
    let alg = parse_algorithm(algorithm, params)?;
    let (mask, res) = run_binarization(&img, &alg).map_err(|e| e.to_string())?;
    let png = mask.to_gray().encode_png().map_err(|e| e.to_string())?;
    Ok(BinarizeResult { t: res.t, png })
}

/// Thresholds a histogram given as `x,n` CSV text. Returns a JSON object
/// `{"t": .., "x": [..], "scores": [..]}` where `x[i]` is the bin whose
/// score `scores[i]` rates the split after that bin.
#[wasm_bindgen]
pub fn threshold_csv(
    csv: &str,
    algorithm: &str,
    nu: f64,
    tau: f64,
    kappa: f64,
    omega: f64,
) -> Result<String, JsError> {
    run_threshold(csv, algorithm, nu, tau, kappa, omega).map_err(|e| JsError::new(&e))
}

/// Sweeps one hyperparameter over a uniform grid and reports the GHT
/// threshold at each point as `value,threshold` CSV. `nu`, `tau` and
/// `kappa` sweep in log2 space (the bounds are exponents); `omega` sweeps
/// linearly in [0, 1]. The remaining parameters stay at the given values.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn sweep_csv(
    csv: &str,
    param: &str,
    min: f64,
    max: f64,
    count: usize,
    nu: f64,
    tau: f64,
    kappa: f64,
    omega: f64,
) -> Result<String, JsError> {
    run_sweep(csv, param, min, max, count, nu, tau, kappa, omega).map_err(|e| JsError::new(&e))
}

/// A binarized image: the threshold that was applied and the mask encoded
/// as a PNG (ink black, background white).
#[wasm_bindgen]
pub struct BinarizeResult {
    t: f64,
    png: Vec<u8>,
}

#[wasm_bindgen]
impl BinarizeResult {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> f64 {
        self.t
    }

    #[wasm_bindgen(getter)]
    pub fn png(&self) -> Vec<u8> {
        self.png.clone()
    }
}

/// Decodes an uploaded image (PNG, PGM or PPM), thresholds its gray
/// histogram and returns the mask as a PNG plus the threshold used.
#[wasm_bindgen]
pub fn binarize_png(
    bytes: &[u8],
    algorithm: &str,
    nu: f64,
    tau: f64,
    kappa: f64,
    omega: f64,
) -> Result<BinarizeResult, JsError> {
    run_binarize(bytes, algorithm, nu, tau, kappa, omega).map_err(|e| JsError::new(&e))
}
