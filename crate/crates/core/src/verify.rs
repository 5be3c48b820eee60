//! Oracle checks shared by the command line `verify` command and the tests.

use serde::{Deserialize, Serialize};

use crate::dist::{total_variation, DiscreteDist};
use crate::error::Result;
use crate::limiting::{phi_c_closed, phi_c_trunc};
use crate::model::{
    brute_force_conditioned, brute_force_omega_dprime, paintbox_blocks_uniform,
    size_bias_coupling_law, Coupling, IndexConvention, PenalisedModel,
};
use crate::numeric::linspace;

/// Prime sets of the tiny instances.
pub const TINY_PRIME_SETS: [&[u32]; 3] = [&[2, 3], &[2, 3, 5], &[2, 3, 5, 7]];
pub const TINY_K: [u64; 3] = [1, 2, 3];
pub const TINY_V: [f64; 3] = [0.3, 0.7, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Measured and printed, but never counted as a failure.
    pub report_only: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, value: f64, tolerance: f64, report_only: bool, detail: String) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            value,
            tolerance,
            passed: value <= tolerance,
            report_only,
            detail,
        }
    }

    pub fn is_failure(&self) -> bool {
        !self.passed && !self.report_only
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub convention: IndexConvention,
    pub coupling: Coupling,
    /// Replaces every tolerance when set.
    pub tolerance_override: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            convention: IndexConvention::LemmaWeights,
            coupling: Coupling::IteratedSizeBias,
            tolerance_override: None,
        }
    }
}

/// A tiny model with `γ` equal to the sum of `1/p` over its primes.
pub fn tiny_model(primes: &[u32], k: u64, v: f64, convention: IndexConvention) -> Result<PenalisedModel> {
    let gamma: f64 = primes.iter().map(|&p| 1.0 / p as f64).sum();
    PenalisedModel::custom(primes, k, gamma, v, convention)
}

fn tiny_instances(convention: IndexConvention) -> Result<Vec<(String, PenalisedModel)>> {
    let mut out = Vec::new();
    for primes in TINY_PRIME_SETS {
        for k in TINY_K {
            for v in TINY_V {
                out.push((
                    format!("primes {primes:?}, k = {k}, v = {v}"),
                    tiny_model(primes, k, v, convention)?,
                ));
            }
        }
    }
    Ok(out)
}

/// Largest TV over the tiny instances between the enumerated construction and
/// the law from the generating-function identity.
pub fn max_oracle_tv(convention: IndexConvention, coupling: Coupling) -> Result<(f64, String)> {
    let mut worst = (0.0, String::new());
    for (label, model) in tiny_instances(convention)? {
        let tv = total_variation(&brute_force_omega_dprime(&model, coupling)?, &model.identity_law()?);
        if tv >= worst.0 {
            worst = (tv, label);
        }
    }
    Ok(worst)
}

/// Largest TV between the conditioning enumeration and the identity law.
pub fn max_conditioning_tv(convention: IndexConvention, coupling: Coupling) -> Result<(f64, String)> {
    let mut worst = (0.0, String::new());
    for (label, model) in tiny_instances(convention)? {
        let tv = total_variation(&brute_force_conditioned(&model, coupling)?, &model.identity_law()?);
        if tv >= worst.0 {
            worst = (tv, label);
        }
    }
    Ok(worst)
}

/// Largest TV between `size_bias(Ω̃)` and its one-index coupling, with `P(I = k) ∝ v/(p_k + v - 1)`.
pub fn max_size_bias_tv() -> Result<(f64, String)> {
    let mut worst = (0.0, String::new());
    for primes in TINY_PRIME_SETS {
        for v in TINY_V {
            let model = tiny_model(primes, 1, v, IndexConvention::LemmaWeights)?;
            let tv = total_variation(&model.tilted_law()?.size_bias()?, &size_bias_coupling_law(&model)?);
            if tv >= worst.0 {
                worst = (tv, format!("primes {primes:?}, v = {v}"));
            }
        }
    }
    Ok(worst)
}

/// Grid measurements of the truncated product `φ_k` against `Φ_C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductBounds {
    pub k: u64,
    /// `√k · max |φ_k - Φ_C|` on 2001 points of `[0, 5]`.
    pub sqrt_k_sup: f64,
    /// `k · max |φ_k - Φ_C|` on 2001 points of `[0, 1]`.
    pub k_sup_unit: f64,
    /// Largest finite-difference slope of `φ_k` on 2001 points of `[0, 10]`.
    pub max_slope: f64,
}

pub fn product_bounds(k: u64) -> Result<ProductBounds> {
    let sup = |a: f64, b: f64| -> Result<f64> {
        linspace(a, b, 2001)
            .into_iter()
            .map(|x| Ok((phi_c_trunc(k, x) - phi_c_closed(x)?).abs()))
            .try_fold(0.0f64, |m, d: Result<f64>| Ok(m.max(d?)))
    };
    let grid = linspace(0.0, 10.0, 2001);
    let values: Vec<f64> = grid.iter().map(|&x| phi_c_trunc(k, x)).collect();
    let max_slope = grid
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
        .fold(0.0, f64::max);
    Ok(ProductBounds {
        k,
        sqrt_k_sup: (k as f64).sqrt() * sup(0.0, 5.0)?,
        k_sup_unit: k as f64 * sup(0.0, 1.0)?,
        max_slope,
    })
}

/// `max |φ_k(x) - Φ_C(x)|` over `points` equispaced points of `[0, 4]`.
pub fn gamma_identity_gap(k: u64, points: usize) -> Result<f64> {
    linspace(0.0, 4.0, points)
        .into_iter()
        .map(|x| Ok((phi_c_trunc(k, x) - phi_c_closed(x)?).abs()))
        .try_fold(0.0f64, |m, d: Result<f64>| Ok(m.max(d?)))
}

/// TV between the law of the number of distinct values among `N` uniform draws
/// from `N` symbols and the number of cycles of a uniform permutation of `N`.
pub fn paintbox_cycle_tv(n: usize) -> Result<f64> {
    let probs: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
    Ok(total_variation(
        &paintbox_blocks_uniform(n, n)?,
        &DiscreteDist::bernoulli_sum(&probs)?,
    ))
}

/// Runs every check. Exact identities use tolerance `1e-12`.
pub fn run_checks(config: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let tol = |t: f64| config.tolerance_override.unwrap_or(t);
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for gamma in [0.5, 1.0, 5.0, 20.0] {
        for x in [0.25, 0.5, 2.0, 4.0] {
            let base = DiscreteDist::poisson_truncated(gamma, 1e-14)?;
            let wide = DiscreteDist::poisson_truncated(x * gamma, 1e-14)?;
            let target = DiscreteDist::from_weights((0..=base.support_max()).map(|k| wide.prob(k)).collect())?;
            worst = worst.max(total_variation(&base.tilt(x)?, &target));
        }
    }
    out.push(CheckResult::new(
        "tilt_poisson",
        worst,
        tol(1e-10),
        false,
        "tilted truncated Poisson(γ) against Poisson(xγ) on the same support".into(),
    ));

    let report_only = config.convention == IndexConvention::PaperLiteral
        || config.coupling == Coupling::IidPaintbox;
    let (tv, label) = max_oracle_tv(config.convention, config.coupling)?;
    out.push(CheckResult::new("construction_oracle", tv, tol(1e-12), report_only, format!("worst: {label}")));
    let (tv, label) = max_conditioning_tv(config.convention, config.coupling)?;
    out.push(CheckResult::new("conditioning", tv, tol(1e-12), report_only, format!("worst: {label}")));
    let (tv, label) = max_size_bias_tv()?;
    out.push(CheckResult::new("size_bias_coupling", tv, tol(1e-12), false, format!("worst: {label}")));

    let d = DiscreteDist::from_weights(vec![0.1, 0.2, 0.3, 0.15, 0.25])?;
    let ab = d.tilt(1.7)?.size_bias_iter(2)?;
    let ba = d.size_bias_iter(2)?.tilt(1.7)?;
    let direct = d.penalise(|k| (k as f64).powi(2) * 1.7f64.powi(k as i32))?;
    out.push(CheckResult::new(
        "tilt_size_bias_commute",
        total_variation(&ab, &ba).max(total_variation(&ab, &direct)),
        tol(1e-12),
        false,
        "x = 1.7, two size-bias steps".into(),
    ));

    for k in [100, 1000] {
        let b = product_bounds(k)?;
        out.push(CheckResult::new(&format!("product_sqrt_k_{k}"), b.sqrt_k_sup, tol(3.0), false, "on [0, 5]".into()));
        out.push(CheckResult::new(&format!("product_k_{k}"), b.k_sup_unit, tol(2.0), false, "on [0, 1]".into()));
        out.push(CheckResult::new(
            &format!("product_slope_{k}"),
            b.max_slope,
            tol(std::f64::consts::E + 0.01),
            false,
            "on [0, 10]".into(),
        ));
    }
    out.push(CheckResult::new(
        "gamma_identity",
        gamma_identity_gap(1_000_000, 41)?,
        tol(1e-2),
        false,
        "k = 10^6 on 41 points of [0, 4]".into(),
    ));

    let worst_cycles = (2..=6).map(paintbox_cycle_tv).try_fold(0.0f64, |m, t| Ok::<f64, crate::Error>(m.max(t?)))?;
    out.push(CheckResult::new(
        "paintbox_cycles",
        worst_cycles,
        tol(1e-12),
        true,
        "distinct values of N uniform draws on N symbols against cycle counts, N = 2..6".into(),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let results = run_checks(&VerifyConfig::default()).unwrap();
        for r in &results {
            assert!(!r.is_failure(), "{r:?}");
        }
    }

    #[test]
    fn literal_index_weights_are_reported() {
        let config = VerifyConfig {
            convention: IndexConvention::PaperLiteral,
            ..VerifyConfig::default()
        };
        let results = run_checks(&config).unwrap();
        let oracle = results.iter().find(|r| r.name == "construction_oracle").unwrap();
        assert!(oracle.report_only);
        assert!(oracle.value > 1e-6);
        assert!(results.iter().all(|r| !r.is_failure()));
    }

    #[test]
    fn zero_tolerance_fails() {
        let config = VerifyConfig {
            tolerance_override: Some(0.0),
            ..VerifyConfig::default()
        };
        let results = run_checks(&config).unwrap();
        assert!(results.iter().any(CheckResult::is_failure));
    }
}
