//! Browser bindings for the pilot-training optimizer.
//!
//! Each exported function returns a JSON string so the page can stay plain
//! JavaScript. The `*_json` functions hold the logic and are callable (and
//! tested) natively; the `#[wasm_bindgen]` wrappers only convert errors.

use serde_json::{json, Value};
use uplink_training::{
    db_to_linear, equal_power_rate, evaluate_scheme, optimize, rate_at, solve_fixed_td, Receiver, Scheme, SystemConfig,
};
use wasm_bindgen::prelude::*;

/// Most points a single curve request may ask for.
pub const MAX_POINTS: usize = 10_001;

fn config(m: u32, k: u32, t: u32, rho_db: f64, rho_max_ratio: f64) -> Result<SystemConfig, String> {
    if !rho_db.is_finite() {
        return Err(format!("rho_db must be finite (got {rho_db})"));
    }
    let rho = db_to_linear(rho_db);
    SystemConfig::new(m as usize, k as usize, t as usize, rho, rho_max_ratio * rho).map_err(|e| e.to_string())
}

fn receiver(name: &str) -> Result<Receiver, String> {
    name.parse::<Receiver>().map_err(|e| e.to_string())
}

fn render(v: Value) -> String {
    v.to_string()
}

/// Sum rate against the pilot energy fraction at a fixed data duration,
/// with the optimal fraction and the feasible interval.
#[allow(clippy::too_many_arguments)]
pub fn alpha_curve_json(
    m: u32,
    k: u32,
    t: u32,
    rho_db: f64,
    rho_max_ratio: f64,
    t_d: f64,
    rx: &str,
    points: u32,
) -> Result<String, String> {
    let cfg = config(m, k, t, rho_db, rho_max_ratio)?;
    let rx = receiver(rx)?;
    let points = points as usize;
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be between 2 and {MAX_POINTS} (got {points})"));
    }
    let sol = solve_fixed_td(t_d, &cfg, rx).map_err(|e| e.to_string())?;
    let alpha: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let rate: Vec<f64> = alpha.iter().map(|&a| rate_at(a, t_d, &cfg, rx)).collect();
    Ok(render(json!({
        "alpha": alpha,
        "rate": rate,
        "alpha_star": sol.alpha_star,
        "alpha_unconstrained": sol.unconstrained,
        "rate_star": rate_at(sol.alpha_star, t_d, &cfg, rx),
        "clipped": sol.clipped,
        "interval": [sol.interval.lo, sol.interval.hi],
    })))
}

/// Jointly optimal operating point and the equal-power baseline.
pub fn optimize_point_json(
    m: u32,
    k: u32,
    t: u32,
    rho_db: f64,
    rho_max_ratio: f64,
    rx: &str,
) -> Result<String, String> {
    let cfg = config(m, k, t, rho_db, rho_max_ratio)?;
    let rx = receiver(rx)?;
    let r = optimize(&cfg, rx).map_err(|e| e.to_string())?;
    Ok(render(json!({
        "alpha_star": r.alpha_star,
        "T_tau_star": r.t_tau_star,
        "T_d_star": r.t_d_star,
        "rho_tau": r.rho_tau,
        "rho_d": r.rho_d,
        "rate_bits": r.rate_star,
        "case_label": r.case_label.as_str(),
        "receiver": rx.as_str(),
        "alpha1": r.thresholds.alpha1,
        "alpha2": r.thresholds.alpha2,
        "alpha_dag": r.thresholds.alpha_dag,
        "equal_power_rate": equal_power_rate(&cfg, rx),
    })))
}

/// Rate and energy efficiency of every scheme over an SNR range in dB.
#[allow(clippy::too_many_arguments)]
pub fn ee_curve_json(
    m: u32,
    k: u32,
    t: u32,
    rho_max_ratio: f64,
    db_lo: f64,
    db_hi: f64,
    points: u32,
    rx: &str,
) -> Result<String, String> {
    let rx = receiver(rx)?;
    let points = points as usize;
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be between 2 and {MAX_POINTS} (got {points})"));
    }
    if !(db_lo.is_finite() && db_hi.is_finite() && db_lo < db_hi) {
        return Err(format!("the SNR range must be increasing (got {db_lo} to {db_hi})"));
    }
    let rho_db: Vec<f64> = (0..points)
        .map(|i| db_lo + (db_hi - db_lo) * i as f64 / (points - 1) as f64)
        .collect();
    let mut schemes = serde_json::Map::new();
    for scheme in Scheme::ALL {
        let mut rate = Vec::with_capacity(points);
        let mut ee = Vec::with_capacity(points);
        for &db in &rho_db {
            let p = evaluate_scheme(scheme, &config(m, k, t, db, rho_max_ratio)?, rx).map_err(|e| e.to_string())?;
            rate.push(p.rate);
            ee.push(p.energy_efficiency);
        }
        schemes.insert(
            scheme.as_str().to_string(),
            json!({ "rate": rate, "energy_efficiency": ee }),
        );
    }
    Ok(render(json!({ "rho_db": rho_db, "schemes": schemes })))
}

#[wasm_bindgen(js_name = alphaCurve)]
#[allow(clippy::too_many_arguments)]
pub fn alpha_curve(
    m: u32,
    k: u32,
    t: u32,
    rho_db: f64,
    rho_max_ratio: f64,
    t_d: f64,
    rx: &str,
    points: u32,
) -> Result<String, JsError> {
    alpha_curve_json(m, k, t, rho_db, rho_max_ratio, t_d, rx, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = optimizePoint)]
pub fn optimize_point(m: u32, k: u32, t: u32, rho_db: f64, rho_max_ratio: f64, rx: &str) -> Result<String, JsError> {
    optimize_point_json(m, k, t, rho_db, rho_max_ratio, rx).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = eeCurve)]
#[allow(clippy::too_many_arguments)]
pub fn ee_curve(
    m: u32,
    k: u32,
    t: u32,
    rho_max_ratio: f64,
    db_lo: f64,
    db_hi: f64,
    points: u32,
    rx: &str,
) -> Result<String, JsError> {
    ee_curve_json(m, k, t, rho_max_ratio, db_lo, db_hi, points, rx).map_err(|e| JsError::new(&e))
}
