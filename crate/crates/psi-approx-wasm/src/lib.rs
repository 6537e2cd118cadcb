//! Browser bindings: a small surface of the library for the interactive
//! demo page. Weight families are addressed by name plus up to two numeric
//! parameters so no file IO is needed.
//!
//! The computation lives in plain functions returning `Result<_, String>`
//! so it can be unit-tested on the host; the exported wrappers only convert
//! errors to `JsValue`, which can't be constructed outside a wasm target.

use psi_approx::asymptotics;
use psi_approx::oracle::DeviationKernel;
use psi_approx::psi_class::ClassParams;
use psi_approx::summation::{build_multipliers, Method};
use psi_approx::PsiSpec;
use std::f64::consts::PI;
use wasm_bindgen::prelude::*;

fn weight(family: &str, a: f64, b: f64) -> Result<PsiSpec, String> {
    let spec = match family {
        "power" => PsiSpec::power(a),
        "powerlog" => PsiSpec::power_log(a, b),
        "exp" => PsiSpec::exp(a, b),
        "log" => Ok(PsiSpec::log()),
        other => Err(psi_approx::Error::InvalidSpec(format!("unknown family '{other}'"))),
    };
    spec.map_err(|e| e.to_string())
}

fn characteristics_impl(family: &str, a: f64, b: f64, t: f64) -> Result<Vec<f64>, String> {
    let psi = weight(family, a, b)?;
    let c = psi.characteristics(t).map_err(|e| e.to_string())?;
    Ok(vec![c.psi, c.eta, c.period, c.mu])
}

fn multiplier_table_impl(
    family: &str,
    a: f64,
    b: f64,
    n: u32,
    p: u32,
) -> Result<Vec<f64>, String> {
    let psi = weight(family, a, b)?;
    let mult = build_multipliers(Method::UPsi(psi), n as usize, p as usize)
        .map_err(|e| e.to_string())?;
    Ok(mult.lambda().to_vec())
}

fn kernel_curve_impl(
    family: &str,
    a: f64,
    b: f64,
    beta: f64,
    n: u32,
    p: u32,
    count: u32,
) -> Result<Vec<f64>, String> {
    if count == 0 || count > 100_000 {
        return Err("count must be in 1..=100000".to_string());
    }
    let psi = weight(family, a, b)?;
    let params = ClassParams::new(psi.clone(), beta);
    let mult = build_multipliers(Method::UPsi(psi.clone()), n as usize, p as usize)
        .map_err(|e| e.to_string())?;
    let psi_n = psi.eval(n as f64).map_err(|e| e.to_string())?;
    let eps_tail = 1e-6 * psi_n;
    let kernel = DeviationKernel::new(&params, &mult, eps_tail).map_err(|e| e.to_string())?;
    // the tail cost scales with 1/|t|, so relax the tolerance near t = 0
    let t0 = PI / n as f64;
    let mut out = Vec::with_capacity(count as usize);
    for j in 0..count {
        let t = -PI + 2.0 * PI * j as f64 / count as f64;
        let eps = eps_tail * (t0 / t.abs().max(1e-8)).max(1.0);
        let (value, _) = kernel.eval_with_tol(t, eps).map_err(|e| e.to_string())?;
        out.push(value);
    }
    Ok(out)
}

fn leading_term_impl(family: &str, a: f64, b: f64, n: u32, p: u32) -> Result<Vec<f64>, String> {
    let psi = weight(family, a, b)?;
    let est = asymptotics::estimate(&psi, n as usize, p as usize).map_err(|e| e.to_string())?;
    Ok(vec![est.a_value, est.main_term, est.period])
}

/// Half-decay characteristics at `t`: returns `[psi, eta, T, mu]`.
#[wasm_bindgen]
pub fn characteristics(family: &str, a: f64, b: f64, t: f64) -> Result<Vec<f64>, JsValue> {
    characteristics_impl(family, a, b, t).map_err(|e| JsValue::from_str(&e))
}

/// Multiplier table of the weight-adapted ramp operator, `lambda(k)` for
/// `k = 0..n-1`.
#[wasm_bindgen]
pub fn multiplier_table(
    family: &str,
    a: f64,
    b: f64,
    n: u32,
    p: u32,
) -> Result<Vec<f64>, JsValue> {
    multiplier_table_impl(family, a, b, n, p).map_err(|e| JsValue::from_str(&e))
}

/// Deviation kernel sampled at `count` uniform points over `[-pi, pi)`.
#[wasm_bindgen]
pub fn kernel_curve(
    family: &str,
    a: f64,
    b: f64,
    beta: f64,
    n: u32,
    p: u32,
    count: u32,
) -> Result<Vec<f64>, JsValue> {
    kernel_curve_impl(family, a, b, beta, n, p, count).map_err(|e| JsValue::from_str(&e))
}

/// Leading error term at `(n, p)`: returns `[A, main_term, T]`.
#[wasm_bindgen]
pub fn leading_term(family: &str, a: f64, b: f64, n: u32, p: u32) -> Result<Vec<f64>, JsValue> {
    leading_term_impl(family, a, b, n, p).map_err(|e| JsValue::from_str(&e))
}
