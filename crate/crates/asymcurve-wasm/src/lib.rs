//! Browser bindings for the curve builder and analyzers.
//!
//! Three operations back the demo page: build one block's refinement tower,
//! assemble the closed curve, and run a trimmed classification. Every
//! parameter is clamped before use so a stray slider value degrades to a
//! smaller build or a clean error instead of locking up the tab; the sample
//! budget backstop turns the remaining oversize combinations into messages.
//!
//! The `*_impl` functions are plain Rust and carry the logic; the exported
//! wrappers only translate errors. That split keeps everything testable on
//! the host, where `JsValue` cannot be touched at runtime.

use asymcurve::{
    assemble_gamma, build_gamma_n, classify, BuildOptions, ClassifyConfig, SampledCurve,
};
use wasm_bindgen::prelude::*;

/// Sample ceiling for in-browser builds; about 60 MB of coordinate data.
const DEMO_BUDGET: u64 = 4_000_000;

fn demo_options(samples_per_bump: u32) -> BuildOptions {
    BuildOptions {
        samples_per_bump: samples_per_bump.clamp(4, 32),
        budget: DEMO_BUDGET,
        ..BuildOptions::default()
    }
}

/// Interleaves vertices as [x0, y0, x1, y1, ...]; a closed curve repeats its
/// first vertex at the end so the canvas path closes by itself.
fn flatten(curve: &SampledCurve) -> Vec<f64> {
    let pts = curve.points();
    let n = pts.len() + usize::from(curve.is_closed());
    let mut out = Vec::with_capacity(2 * n);
    for p in pts {
        out.push(p.x);
        out.push(p.y);
    }
    if curve.is_closed() {
        out.push(pts[0].x);
        out.push(pts[0].y);
    }
    out
}

fn block_points_impl(n: u32, depth: u32, samples_per_bump: u32) -> asymcurve::Result<Vec<f64>> {
    let n = n.clamp(1, 6);
    let depth = depth.clamp(1, n.min(5));
    let stack = build_gamma_n(n, depth, &demo_options(samples_per_bump))?;
    Ok(flatten(stack.top()))
}

fn gamma_points_impl(n_max: u32, depth_cap: u32) -> asymcurve::Result<Vec<f64>> {
    let (curve, _) = assemble_gamma(n_max.clamp(1, 5), depth_cap.clamp(1, 5), &demo_options(8))?;
    Ok(flatten(&curve))
}

fn analyze_gamma_impl(n_max: u32, depth_cap: u32, pairs: u32) -> asymcurve::Result<String> {
    // Conformality scans walk the vertices between each pair, so the analyze
    // path clamps harder than the draw path.
    let n_max = n_max.clamp(1, 4);
    let (curve, record) = assemble_gamma(n_max, depth_cap.clamp(1, 5), &demo_options(8))?;
    let cfg = ClassifyConfig {
        delta_fracs: vec![0.125, 0.0625, 0.03125, 0.015625],
        pair_budget: u64::from(pairs.clamp(1_000, 100_000)),
        ua_n_cap: 1 << 14,
        ..ClassifyConfig::default()
    };
    let report = classify(&curve, &cfg)?;
    let witness = record
        .blocks
        .last()
        .map(|b| 2f64.powi(n_max as i32) * b.length)
        .unwrap_or(f64::NAN);
    let summary = serde_json::json!({
        "n_max": n_max,
        "samples": report.samples,
        "total_len": report.total_len,
        "witness_2n_length": witness,
        "chordarc_sup": report.chordarc.sup,
        "smoothness": report
            .smoothness
            .iter()
            .map(|r| serde_json::json!({"delta": r.delta, "sup": r.sup}))
            .collect::<Vec<_>>(),
        "conformality": report
            .conformality
            .iter()
            .map(|r| serde_json::json!({"delta": r.delta, "sup": r.sup}))
            .collect::<Vec<_>>(),
        "flags": {
            "chord_arc": report.consistency_flags.chord_arc,
            "asymptotically_conformal": report.consistency_flags.asymptotically_conformal,
            "asymptotically_smooth": report.consistency_flags.asymptotically_smooth,
        },
    });
    Ok(serde_json::to_string_pretty(&summary).expect("json"))
}

/// Deepest level of block `n` as interleaved coordinates.
#[wasm_bindgen]
pub fn block_points(n: u32, depth: u32, samples_per_bump: u32) -> Result<Vec<f64>, JsError> {
    block_points_impl(n, depth, samples_per_bump).map_err(|e| JsError::new(&e.to_string()))
}

/// The assembled closed curve as interleaved coordinates.
#[wasm_bindgen]
pub fn gamma_points(n_max: u32, depth_cap: u32) -> Result<Vec<f64>, JsError> {
    gamma_points_impl(n_max, depth_cap).map_err(|e| JsError::new(&e.to_string()))
}

/// Classification summary of the assembled curve as a JSON string.
#[wasm_bindgen]
pub fn analyze_gamma(n_max: u32, depth_cap: u32, pairs: u32) -> Result<String, JsError> {
    analyze_gamma_impl(n_max, depth_cap, pairs).map_err(|e| JsError::new(&e.to_string()))
}
