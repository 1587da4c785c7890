//! Browser bindings for three interactive views: a nonlocal flow trajectory,
//! the local threshold against the number of transit corrections, and the
//! analytic threshold against the move distance.
//!
//! Each binding returns a JSON string; the plain Rust functions behind them
//! are what the native tests exercise.

use ftlocal::analytic::{gamma_crit, AnalyticParams};
use ftlocal::catalog::CircuitCatalog;
use ftlocal::flow::{
    bisect_threshold, iterate_flow, optimize_tau, BisectOptions, Classification, FlowOptions, RateMap, Ray,
};
use ftlocal::local::GeometryParams;
use ftlocal::model::{NonlocalMap, ProtocolParams};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const BRACKET: (f64, f64) = (1e-7, 1e-2);
/// Coarser than the CLI default so a slider drag stays responsive.
const DEMO_REL_TOL: f64 = 1e-2;

#[derive(Debug, Serialize)]
pub struct FlowView {
    pub components: Vec<String>,
    pub trajectory: Vec<Vec<f64>>,
    pub classification: Classification,
    pub threshold: f64,
}

/// Flow of the nonlocal map from `scale` along the standard ray with the
/// given wait ratio, together with the threshold on that ray.
pub fn nonlocal_flow(scale: f64, w_ratio: f64) -> ftlocal::Result<FlowView> {
    let map = NonlocalMap::default();
    let ray = Ray::nonlocal_standard(w_ratio)?;
    let flow = iterate_flow(&map, &ray.checked_point(scale)?, &FlowOptions::default())?;
    let opts = BisectOptions { rel_tol: DEMO_REL_TOL, ..BisectOptions::default() };
    let est = bisect_threshold(&map, &ray, BRACKET.0, BRACKET.1, &opts)?;
    Ok(FlowView {
        components: map.component_names(),
        trajectory: flow.trajectory,
        classification: flow.classification,
        threshold: est.scale,
    })
}

#[derive(Debug, Serialize)]
pub struct TauView {
    pub r: u32,
    pub epsilon: f64,
    pub tau: Vec<u32>,
    pub threshold: Vec<f64>,
    pub best_tau: u32,
    pub best_threshold: f64,
}

/// Local threshold for every `tau` in `1..=min(r, tau_max)`.
pub fn tau_curve(r: u32, epsilon: f64, tau_max: u32) -> ftlocal::Result<TauView> {
    let g = GeometryParams::new(r, 1, epsilon)?;
    let opts = BisectOptions { rel_tol: DEMO_REL_TOL, ..BisectOptions::default() };
    let best = optimize_tau(&g, &ProtocolParams::default(), &CircuitCatalog::steane(), 1..=tau_max, BRACKET, &opts)?;
    Ok(TauView {
        r,
        epsilon,
        tau: best.curve.iter().map(|(t, _)| *t).collect(),
        threshold: best.curve.iter().map(|(_, e)| e.scale).collect(),
        best_tau: best.tau,
        best_threshold: best.threshold.scale,
    })
}

#[derive(Debug, Serialize)]
pub struct AnalyticView {
    pub a_lc: u64,
    pub k: u32,
    pub r: Vec<u64>,
    pub gamma_crit: Vec<f64>,
}

/// Analytic threshold at `points` log-spaced move distances in `[r_min, r_max]`.
pub fn analytic_curve(r_min: u64, r_max: u64, points: usize) -> ftlocal::Result<AnalyticView> {
    if r_min == 0 || r_max < r_min || points < 2 {
        return Err(ftlocal::Error::Domain(format!(
            "need 1 <= r_min <= r_max and at least two points, got [{r_min}, {r_max}] with {points}"
        )));
    }
    let p = AnalyticParams::from_catalog(1, &CircuitCatalog::steane(), &ProtocolParams::default())?;
    let (lo, hi) = ((r_min as f64).ln(), (r_max as f64).ln());
    let mut rs: Vec<u64> = (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp().round() as u64)
        .collect();
    rs.dedup();
    let gamma_crit = rs.iter().map(|&r| gamma_crit(r, p.a_lc, p.k)).collect::<ftlocal::Result<_>>()?;
    Ok(AnalyticView { a_lc: p.a_lc, k: p.k, r: rs, gamma_crit })
}

fn to_js<T: Serialize>(v: ftlocal::Result<T>) -> Result<String, JsValue> {
    let v = v.map_err(|e| JsValue::from_str(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen(js_name = nonlocalFlow)]
pub fn nonlocal_flow_js(scale: f64, w_ratio: f64) -> Result<String, JsValue> {
    to_js(nonlocal_flow(scale, w_ratio))
}

#[wasm_bindgen(js_name = tauCurve)]
pub fn tau_curve_js(r: u32, epsilon: f64, tau_max: u32) -> Result<String, JsValue> {
    to_js(tau_curve(r, epsilon, tau_max))
}

#[wasm_bindgen(js_name = analyticCurve)]
pub fn analytic_curve_js(r_min: u32, r_max: u32, points: u32) -> Result<String, JsValue> {
    to_js(analytic_curve(r_min.into(), r_max.into(), points as usize))
}
