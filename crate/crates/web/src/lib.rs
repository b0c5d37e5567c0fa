//! Browser bindings for the interactive page in `www/`.
//!
//! Every export wraps a plain function that returns flat `f64` rows, so the
//! numerics can be tested natively. Rows are packed row-major; the page slices
//! them by the width noted on each function.

use ilp_reparam::closed_forms::{
    circulation, curl_2d, curl_area_integral, f1, g_hat_1d, g_hat_2d, grad_phi_hat_2d, phi_hat_1d,
    phi_hat_hat_1d, Planar2DProblem, Scalar1DProblem,
};
use ilp_reparam::dynamics::{sgd_run, EstimatorKind, SgdConfig};
use ilp_reparam::{Error, IlpInstance, PenaltyConfig, RelaxedPoint, Result};
use wasm_bindgen::prelude::*;

const GRID_LO: f64 = 0.001;
const GRID_HI: f64 = 0.999;
const LOOP_POINTS: usize = 2000;

fn grid(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::DomainError(format!("resolution {n} must be at least 2")));
    }
    Ok((0..n).map(|k| GRID_LO + (GRID_HI - GRID_LO) * k as f64 / (n - 1) as f64).collect())
}

/// Width 5: `x, f1, phi_hat, phi_hat_hat, g_hat`.
pub fn curves_rows(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    let p = Scalar1DProblem::new(a, b)?;
    let mut out = Vec::with_capacity(5 * n);
    for x in grid(n)? {
        out.extend([x, f1(x)?, phi_hat_1d(&p, x)?, phi_hat_hat_1d(&p, x)?, g_hat_1d(&p, x)?]);
    }
    Ok(out)
}

/// Width 5: `x1, x2, g1, g2, curl` over an `n × n` grid, x2 fastest.
pub fn field_rows(a1: f64, a2: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    let p = Planar2DProblem::new(a1, a2, b)?;
    let axis = grid(n)?;
    let mut out = Vec::with_capacity(5 * n * n);
    for &x1 in &axis {
        for &x2 in &axis {
            let g = g_hat_2d(&p, [x1, x2])?;
            out.extend([x1, x2, g[0], g[1], curl_2d(&p, [x1, x2])?]);
        }
    }
    Ok(out)
}

/// `[loop of g_hat, loop of grad phi_hat, area integral of curl]` for a square.
pub fn loop_report(a1: f64, a2: f64, b: f64, cx: f64, cy: f64, radius: f64) -> Result<Vec<f64>> {
    let p = Planar2DProblem::new(a1, a2, b)?;
    let c = [cx, cy];
    Ok(vec![
        circulation(|x| g_hat_2d(&p, x), c, radius, LOOP_POINTS)?,
        circulation(|x| grad_phi_hat_2d(&p, x), c, radius, LOOP_POINTS)?,
        curl_area_integral(&p, c, radius)?,
    ])
}

/// Width `d`: iterates `x̂⁽⁰⁾ .. x̂⁽ˢᵗᵉᵖˢ⁾` of projected SGD with unit penalty weight.
pub fn sgd_rows(instance_json: &str, x0: &[f64], steps: usize, step_size: f64, seed: u64, estimator: &str) -> Result<Vec<f64>> {
    let inst = IlpInstance::from_json_str(instance_json)?;
    let estimator: EstimatorKind = estimator.parse()?;
    let s = SgdConfig { steps, step_size, seed, estimator, ..SgdConfig::default() };
    let t = sgd_run(&inst, PenaltyConfig::new(1.0)?, &RelaxedPoint::new(x0.to_vec())?, &s)?;
    Ok(t.records.into_iter().flat_map(|r| r.point).collect())
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn curves_1d(a: f64, b: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    curves_rows(a, b, n).map_err(js)
}

#[wasm_bindgen]
pub fn field_2d(a1: f64, a2: f64, b: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    field_rows(a1, a2, b, n).map_err(js)
}

#[wasm_bindgen]
pub fn square_loop(a1: f64, a2: f64, b: f64, cx: f64, cy: f64, radius: f64) -> std::result::Result<Vec<f64>, JsError> {
    loop_report(a1, a2, b, cx, cy, radius).map_err(js)
}

#[wasm_bindgen]
pub fn sgd_trajectory(
    instance_json: &str,
    x0: Vec<f64>,
    steps: usize,
    step_size: f64,
    seed: u64,
    estimator: &str,
) -> std::result::Result<Vec<f64>, JsError> {
    sgd_rows(instance_json, &x0, steps, step_size, seed, estimator).map_err(js)
}
