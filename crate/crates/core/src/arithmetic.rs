//! Exact statistics of ω(U_n) for U_n uniform on {1, ..., n}.

use serde::{Deserialize, Serialize};

use crate::dist::DiscreteDist;
use crate::error::{domain, Error, Result};
use crate::limiting::LimitEvaluator;
use crate::model::{dist_q_with_normaliser, mod_poisson_ratio};
use crate::numeric::CompensatedSum;
use crate::primes::{sieve, DEFAULT_SIEVE_BUDGET};

/// ω(m) for `1 <= m <= limit`; index 0 is unused and holds 0.
///
/// Eight bits suffice: the product of the first nine primes exceeds 10⁸.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaTable {
    limit: u64,
    omega: Vec<u8>,
}

impl OmegaTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn omega(&self, m: u64) -> u8 {
        self.omega[m as usize]
    }

    /// `omega[m]` for `m` in `0..=limit`.
    pub fn values(&self) -> &[u8] {
        &self.omega
    }

    /// `#{m <= n : ω(m) = k} / n`.
    pub fn dist(&self) -> DiscreteDist {
        let mut counts = vec![0u64; 1];
        for &w in &self.omega[1..] {
            let w = w as usize;
            if w >= counts.len() {
                counts.resize(w + 1, 0);
            }
            counts[w] += 1;
        }
        let n = self.limit as f64;
        DiscreteDist::from_weights(counts.iter().map(|&c| c as f64 / n).collect())
            .expect("a nonempty histogram")
    }

    /// `(1/n) Σ_{m <= n} x^{ω(m)}`, accumulated term by term.
    pub fn pgf_direct(&self, x: f64) -> f64 {
        let powers: Vec<f64> = (0..16).map(|k| x.powi(k)).collect();
        let sum: CompensatedSum = self.omega[1..].iter().map(|&w| powers[w as usize]).collect();
        sum.value() / self.limit as f64
    }

    /// `Σ_{m <= n} ω(m)`.
    pub fn total(&self) -> u64 {
        self.omega.iter().map(|&w| w as u64).sum()
    }
}

pub fn omega_sieve(n: u64) -> Result<OmegaTable> {
    omega_sieve_with_budget(n, DEFAULT_SIEVE_BUDGET)
}

pub fn omega_sieve_with_budget(n: u64, budget: u64) -> Result<OmegaTable> {
    if n > budget {
        return Err(Error::Capacity {
            requested: n,
            budget,
        });
    }
    if n == 0 {
        return Err(domain("omega table needs n >= 1"));
    }
    let primes = sieve(n)?;
    let mut omega = vec![0u8; n as usize + 1];
    for &p in primes.primes() {
        let p = p as usize;
        for m in (p..=n as usize).step_by(p) {
            omega[m] += 1;
        }
    }
    Ok(OmegaTable { limit: n, omega })
}

pub fn dist_omega_uniform(n: u64) -> Result<DiscreteDist> {
    Ok(omega_sieve(n)?.dist())
}

/// ω(m) by trial division.
pub fn omega_trial(mut m: u64) -> u8 {
    let mut count = 0;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            count += 1;
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        count += 1;
    }
    count
}

/// `E[x^{ω(U_n)}] / e^{γ(x-1)}`.
pub fn sathe_selberg_ratio(law: &DiscreteDist, gamma: f64, x: f64) -> Result<f64> {
    mod_poisson_ratio(law.pgf(x), gamma, x)
}

/// Default abscissae for the exponential fit.
pub const FIT_GRID: [f64; 7] = [0.25, 0.5, 0.75, 1.25, 1.5, 1.75, 2.0];

/// Mod-Poisson ratios after removing the best exponential factor `e^{c(x-1)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub c: f64,
    pub xs: Vec<f64>,
    pub ratios: Vec<f64>,
    pub fitted: Vec<f64>,
    pub reference: Vec<f64>,
}

impl ExponentialFit {
    pub fn deviation_at(&self, x: f64) -> Option<f64> {
        self.xs
            .iter()
            .position(|&g| (g - x).abs() < 1e-12)
            .map(|i| (self.fitted[i] - self.reference[i]).abs())
    }
}

/// Least squares fit of `ln ratio(x) - ln Φ(x) ≈ c (x - 1)` over `xs`.
pub fn fit_exponential(xs: &[f64], ratios: &[f64], reference: &[f64]) -> Result<ExponentialFit> {
    if xs.len() != ratios.len() || xs.len() != reference.len() {
        return Err(domain("fit inputs differ in length"));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for ((&x, &r), &f) in xs.iter().zip(ratios).zip(reference) {
        if !(r > 0.0 && f > 0.0) {
            return Err(domain(format!("fit needs positive values, got {r} and {f} at x = {x}")));
        }
        num += (x - 1.0) * (r.ln() - f.ln());
        den += (x - 1.0) * (x - 1.0);
    }
    if den == 0.0 {
        return Err(domain("fit grid has no point away from x = 1"));
    }
    let c = num / den;
    Ok(ExponentialFit {
        c,
        xs: xs.to_vec(),
        ratios: ratios.to_vec(),
        fitted: xs.iter().zip(ratios).map(|(&x, &r)| r * (-c * (x - 1.0)).exp()).collect(),
        reference: reference.to_vec(),
    })
}

/// Mod-Poisson ratios of `law` at speed `gamma`, fitted against `Φ_ω`.
pub fn sathe_selberg_fit(
    law: &DiscreteDist,
    gamma: f64,
    xs: &[f64],
    limits: &LimitEvaluator,
) -> Result<ExponentialFit> {
    let ratios: Vec<f64> = xs
        .iter()
        .map(|&x| sathe_selberg_ratio(law, gamma, x))
        .collect::<Result<_>>()?;
    let reference: Vec<f64> = xs.iter().map(|&x| limits.phi_omega(x)).collect::<Result<_>>()?;
    fit_exponential(xs, &ratios, &reference)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalLimitRow {
    pub k: usize,
    /// `P(ω(U_n) = k)`.
    pub exact: f64,
    /// `P(P_L = k) Φ_ω(k / L)` with `L = log log n`.
    pub poisson_corrected: f64,
    /// `P(Q_L(Φ_ω) = k)`.
    pub penalised_poisson: f64,
}

/// Local limit comparison for `k` in `0..=⌈2 log log n⌉`.
pub fn local_limit_report(law: &DiscreteDist, n: u64) -> Result<Vec<LocalLimitRow>> {
    if n < 1000 {
        return Err(domain(format!("local limit report needs n >= 1000, got {n}")));
    }
    let l = (n as f64).ln().ln();
    let q_base = DiscreteDist::poisson_truncated(l, 1e-12)?;
    let span = (q_base.support_max() as f64 / l - 1.0).max(1.0);
    let limits = LimitEvaluator::new(span, 1e-4)?;
    let phi = |x: f64| limits.phi_omega(x).unwrap_or(0.0);
    let (q, _) = dist_q_with_normaliser(phi, l, 1e-12)?;
    let k_max = (2.0 * l).ceil() as usize;
    (0..=k_max)
        .map(|k| {
            let ln_poisson = -l + k as f64 * l.ln() - crate::special::ln_gamma(k as f64 + 1.0);
            Ok(LocalLimitRow {
                k,
                exact: law.prob(k),
                poisson_corrected: ln_poisson.exp() * limits.phi_omega(k as f64 / l)?,
                penalised_poisson: q.prob(k),
            })
        })
        .collect()
}

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Kolmogorov distance between `(X - γ)/√γ` and the standard normal law.
///
/// At each atom both the left and right limits of the lattice distribution
/// function are compared with the normal one.
pub fn erdos_kac_stat(law: &DiscreteDist, gamma: f64) -> Result<f64> {
    if !(gamma > 1.0) {
        return Err(domain(format!("Erdős–Kac statistic needs gamma > 1, got {gamma}")));
    }
    let scale = gamma.sqrt();
    let mut below = 0.0;
    let mut stat: f64 = 0.0;
    for (k, &p) in law.pmf().iter().enumerate() {
        let f = normal_cdf((k as f64 - gamma) / scale);
        stat = stat.max((below - f).abs());
        below += p;
        stat = stat.max((below - f).abs());
    }
    Ok(stat)
}

/// Empirical counterpart of [`erdos_kac_stat`].
pub fn erdos_kac_stat_samples(samples: &[usize], gamma: f64) -> Result<f64> {
    let mut counts = Vec::new();
    for &x in samples {
        if x >= counts.len() {
            counts.resize(x + 1, 0.0);
        }
        counts[x] += 1.0;
    }
    erdos_kac_stat(&DiscreteDist::from_weights(counts)?, gamma)
}
