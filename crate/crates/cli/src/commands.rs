use anyhow::{anyhow, Result};
use serde::Serialize;

use modpois::arithmetic::dist_omega_uniform;
use modpois::dist::{total_variation, DiscreteDist};
use modpois::limiting::LimitEvaluator;
use modpois::model::{
    dist_hybrid, dist_omega_dprime, dist_omega_indep, dist_omega_prime, dist_q, mod_poisson_ratio,
    Empirical, PenalisedModel, SampleMode, Sampler,
};
use modpois::primes::{sieve, ModelParams};
use modpois::verify::{run_checks, CheckResult, VerifyConfig};

use crate::config::{Cli, CommandKind, RunConfig, UsageError};
use crate::report::{emit, render, RatioRow, RatioTable, SampleReport, SampleRow};

/// Why a run did not succeed, with its exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verification(String),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Verification(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
            Failure::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<UsageError>() {
            Ok(u) => Failure::Usage(u.0),
            Err(e) => Failure::Runtime(e),
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let config = cli.config()?;
    match config.command {
        CommandKind::Ratios => {
            let table = cmd_ratios(&config)?;
            emit(&config, &render(&table, RatioTable::to_csv, config.format)?)?;
        }
        CommandKind::Sample => {
            let report = cmd_sample(&config)?;
            emit(&config, &render(&report, SampleReport::to_csv, config.format)?)?;
        }
        CommandKind::Verify => {
            let report = cmd_verify(&config)?;
            emit(&config, &(serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)? + "\n"))?;
            if !report.passed {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| c.is_failure())
                    .map(|c| c.name.as_str())
                    .collect();
                return Err(Failure::Verification(failed.join(", ")));
            }
        }
    }
    Ok(())
}

fn limits_for(xs: &[f64], error_target: f64) -> Result<LimitEvaluator> {
    let span = xs.iter().map(|x| (x - 1.0).abs()).fold(1.0, f64::max);
    Ok(LimitEvaluator::new(span, error_target)?)
}

/// Sizes of the hybrid comparison model: `A' = k_n` cycle terms and the
/// primes up to `n^{1/A'}`.
pub fn hybrid_sizes(params: &ModelParams, table: &modpois::PrimeTable) -> (usize, usize) {
    let a_prime = params.k_n.max(1) as usize;
    let bound = (params.n as f64).powf(1.0 / a_prime as f64).floor() as u64;
    (table.count_upto(bound), a_prime)
}

/// Exact mod-Poisson ratios for every model at every grid point.
pub fn cmd_ratios(config: &RunConfig) -> Result<RatioTable> {
    if config.x_grid.is_empty() {
        return Err(UsageError("the x grid is empty".into()).into());
    }
    let n = config.n;
    let table = sieve(n)?;
    let params = ModelParams::from_table(&table)?;
    let g = params.gamma_n;
    let limits = limits_for(&config.x_grid, 1e-6)?;
    let phi_omega = |x: f64| limits.phi_omega(x);

    let mut rows = Vec::new();
    let mut push = |model: &str, law: &DiscreteDist, speed: f64, big_omega_ref: bool| -> Result<()> {
        for &x in &config.x_grid {
            let reference = if big_omega_ref { limits.phi_big_omega(x)? } else { phi_omega(x)? };
            rows.push(RatioRow::exact(n, x, model, mod_poisson_ratio(law.pgf(x), speed, x)?, reference));
        }
        Ok(())
    };

    push("indep", &dist_omega_indep(&params, &table)?, g, true)?;
    let (a, a_prime) = hybrid_sizes(&params, &table);
    let hybrid = dist_hybrid(a, a_prime, &table)?;
    push("hybrid", &hybrid, hybrid.mean(), false)?;
    push("prime", &dist_omega_prime(&params, &table)?, g, false)?;
    push("dprime", &dist_omega_dprime(&params, &table)?, g, false)?;

    let poisson = DiscreteDist::poisson_truncated(g, config.eps)?;
    let q_limits = LimitEvaluator::new((poisson.support_max() as f64 / g - 1.0).max(1.0), 1e-5)?;
    let q = dist_q(|t| q_limits.phi_omega(t).unwrap_or(0.0), g, config.eps)?;
    push("q_phi_omega", &q, g, false)?;

    push("arithmetic", &dist_omega_uniform(n)?, g, false)?;
    Ok(RatioTable {
        config: config.clone(),
        rows,
    })
}

/// Empirical generating functions of both pathwise descriptions, drawn from
/// the same seed, against the exact law.
pub fn cmd_sample(config: &RunConfig) -> Result<SampleReport> {
    if config.x_grid.is_empty() {
        return Err(UsageError("the x grid is empty".into()).into());
    }
    if config.samples < 1000 {
        return Err(UsageError(format!("sampling needs at least 1000 draws, got {}", config.samples)).into());
    }
    let table = sieve(config.n)?;
    let params = ModelParams::from_table(&table)?;
    let exact = dist_omega_dprime(&params, &table)?;
    let model = PenalisedModel::new(&params, &table, config.convention)?;
    let sampler = Sampler::new(&model, config.coupling);
    let pathwise = Empirical::from_counts(sampler.sample_counts(SampleMode::Pathwise, config.samples, config.seed));
    let conditioned =
        Empirical::from_counts(sampler.sample_counts(SampleMode::Conditioned, config.samples, config.seed));
    let rows = config
        .x_grid
        .iter()
        .map(|&x| {
            let (p, ph) = pathwise.pgf_estimate(x);
            let (c, ch) = conditioned.pgf_estimate(x);
            SampleRow {
                x,
                exact: exact.pgf(x),
                pathwise: p,
                pathwise_halfwidth: ph,
                conditioned: c,
                conditioned_halfwidth: ch,
            }
        })
        .collect();
    Ok(SampleReport {
        config: config.clone(),
        tv_pathwise: total_variation(&pathwise.dist()?, &exact),
        tv_conditioned: total_variation(&conditioned.dist()?, &exact),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

pub fn cmd_verify(config: &RunConfig) -> Result<VerifyReport> {
    let checks = run_checks(&VerifyConfig {
        convention: config.convention,
        coupling: config.coupling,
        tolerance_override: config.tolerance_override,
    })
    .map_err(|e| anyhow!(e))?;
    Ok(VerifyReport {
        config: config.clone(),
        passed: checks.iter().all(|c| !c.is_failure()),
        checks,
    })
}
