//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each export returns a JSON string. The `*_json` functions hold the logic and
//! are usable (and tested) on native targets.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;
use wasm_bindgen::prelude::*;

use modpois::arithmetic::omega_sieve;
use modpois::dist::DiscreteDist;
use modpois::limiting::{phi_c_closed, phi_c_trunc, LimitEvaluator};
use modpois::model::{dist_omega_dprime, dist_omega_indep, dist_omega_prime, mod_poisson_ratio};
use modpois::primes::{sieve, ModelParams};

/// Largest `n` the page accepts; keeps the sieves under a second or so.
pub const MAX_N: u64 = 10_000_000;
pub const MAX_POINTS: usize = 2001;

#[derive(Debug, Serialize)]
pub struct RatioCurves {
    pub n: u64,
    pub gamma: f64,
    pub k: u64,
    pub xs: Vec<f64>,
    pub independent: Vec<f64>,
    pub penalised: Vec<f64>,
    pub truncated: Vec<f64>,
    pub arithmetic: Vec<f64>,
    pub phi_big_omega: Vec<f64>,
    pub phi_omega: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Laws {
    pub n: u64,
    pub gamma: f64,
    pub arithmetic: Vec<f64>,
    pub independent: Vec<f64>,
    pub truncated: Vec<f64>,
    pub poisson: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct TruncationCurves {
    pub k: u64,
    pub xs: Vec<f64>,
    pub truncated: Vec<f64>,
    pub closed: Vec<f64>,
    pub max_gap: f64,
}

fn check_n(n: u64) -> Result<(), String> {
    if !(5..=MAX_N).contains(&n) {
        return Err(format!("n must lie between 5 and {MAX_N}"));
    }
    Ok(())
}

fn grid(x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(0.0 <= x_min && x_min < x_max && x_max.is_finite()) {
        return Err("need 0 <= x_min < x_max".into());
    }
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie between 2 and {MAX_POINTS}"));
    }
    Ok(modpois::numeric::linspace(x_min, x_max, points))
}

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Mod-Poisson ratios at speed `γ_n` of `Ω_n`, `Ω'_n`, `Ω''_n` and `ω(U_n)`,
/// with the limits `Φ_Ω` and `Φ_ω`. `x_max` is capped at 3.
pub fn ratio_curves_json(n: u64, x_min: f64, x_max: f64, points: usize) -> Result<String, String> {
    check_n(n)?;
    if x_max > 3.0 {
        return Err("x_max must be at most 3".into());
    }
    let xs = grid(x_min, x_max, points)?;
    let err = |e: modpois::Error| e.to_string();
    let table = sieve(n).map_err(err)?;
    let params = ModelParams::from_table(&table).map_err(err)?;
    let limits = LimitEvaluator::new(2.0, 1e-5).map_err(err)?;
    let g = params.gamma_n;
    let ratios = |law: &DiscreteDist| -> Result<Vec<f64>, String> {
        xs.iter().map(|&x| mod_poisson_ratio(law.pgf(x), g, x).map_err(err)).collect()
    };
    let curves = RatioCurves {
        n,
        gamma: g,
        k: params.k_n,
        independent: ratios(&dist_omega_indep(&params, &table).map_err(err)?)?,
        penalised: ratios(&dist_omega_prime(&params, &table).map_err(err)?)?,
        truncated: ratios(&dist_omega_dprime(&params, &table).map_err(err)?)?,
        arithmetic: ratios(&omega_sieve(n).map_err(err)?.dist())?,
        phi_big_omega: xs.iter().map(|&x| limits.phi_big_omega(x).map_err(err)).collect::<Result<_, _>>()?,
        phi_omega: xs.iter().map(|&x| limits.phi_omega(x).map_err(err)).collect::<Result<_, _>>()?,
        xs,
    };
    json(&curves)
}

/// Probabilities `P(X = k)`, `k <= k_max`, for `ω(U_n)`, `Ω_n`, `Ω''_n` and Poisson(`γ_n`).
pub fn laws_json(n: u64, k_max: usize) -> Result<String, String> {
    check_n(n)?;
    let err = |e: modpois::Error| e.to_string();
    let table = sieve(n).map_err(err)?;
    let params = ModelParams::from_table(&table).map_err(err)?;
    let head = |d: &DiscreteDist| (0..=k_max).map(|k| d.prob(k)).collect::<Vec<_>>();
    let laws = Laws {
        n,
        gamma: params.gamma_n,
        arithmetic: head(&omega_sieve(n).map_err(err)?.dist()),
        independent: head(&dist_omega_indep(&params, &table).map_err(err)?),
        truncated: head(&dist_omega_dprime(&params, &table).map_err(err)?),
        poisson: head(&DiscreteDist::poisson_truncated(params.gamma_n, 1e-14).map_err(err)?),
    };
    json(&laws)
}

/// `φ_k` against `Φ_C = e^{-γ(x-1)}/Γ(x)` on `[0, x_max]`.
pub fn truncation_json(k: u64, x_max: f64, points: usize) -> Result<String, String> {
    if !(1..=10_000_000).contains(&k) {
        return Err("k must lie between 1 and 10^7".into());
    }
    let xs = grid(0.0, x_max, points)?;
    let truncated: Vec<f64> = xs.iter().map(|&x| phi_c_trunc(k, x)).collect();
    let closed: Vec<f64> = xs
        .iter()
        .map(|&x| phi_c_closed(x).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let max_gap = truncated.iter().zip(&closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    json(&TruncationCurves {
        k,
        xs,
        truncated,
        closed,
        max_gap,
    })
}

#[wasm_bindgen]
pub fn ratio_curves(n: u32, x_min: f64, x_max: f64, points: u32) -> Result<String, JsError> {
    ratio_curves_json(n as u64, x_min, x_max, points as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn laws(n: u32, k_max: u32) -> Result<String, JsError> {
    laws_json(n as u64, k_max as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn truncation(k: u32, x_max: f64, points: u32) -> Result<String, JsError> {
    truncation_json(k as u64, x_max, points as usize).map_err(|e| JsError::new(&e))
}
