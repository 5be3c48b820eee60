//! Prime sieve, prime harmonic sums and the constants every model is built from.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::CompensatedSum;

/// Largest sieve limit accepted by [`sieve`]. The odd-only bit array at this
/// limit takes 6.25 MB; the prime list and its reciprocal prefix sums about 70 MB.
pub const DEFAULT_SIEVE_BUDGET: u64 = 100_000_000;

/// Ascending primes up to `limit` together with running sums of their reciprocals.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
    recip_prefix: Vec<f64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// `recip_prefix()[i]` is `1/p_1 + ... + 1/p_{i+1}`.
    pub fn recip_prefix(&self) -> &[f64] {
        &self.recip_prefix
    }

    /// π(limit).
    pub fn count(&self) -> usize {
        self.primes.len()
    }

    /// Number of primes `<= x`, for any `x <= limit`.
    pub fn count_upto(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p as u64 <= x)
    }

    /// Prime harmonic sum over the whole table.
    pub fn prime_harmonic(&self) -> f64 {
        self.recip_prefix.last().copied().unwrap_or(0.0)
    }

    /// Prime harmonic sum over primes `<= x`.
    pub fn prime_harmonic_upto(&self, x: u64) -> f64 {
        match self.count_upto(x) {
            0 => 0.0,
            c => self.recip_prefix[c - 1],
        }
    }

    /// Restriction of the table to primes `<= x`.
    pub fn truncated(&self, x: u64) -> PrimeTable {
        let c = self.count_upto(x);
        PrimeTable {
            limit: x.min(self.limit),
            primes: self.primes[..c].to_vec(),
            recip_prefix: self.recip_prefix[..c].to_vec(),
        }
    }

    /// Builds a table from an explicit ascending list of primes. Used for the
    /// tiny brute-force instances; primality is checked by trial division.
    pub fn from_primes(primes: &[u32]) -> Result<PrimeTable> {
        if primes.is_empty() {
            return Err(Error::EmptyTable(0));
        }
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain("primes must be strictly ascending"));
        }
        if let Some(&p) = primes.iter().find(|&&p| !is_prime_trial(p as u64)) {
            return Err(domain(format!("{p} is not prime")));
        }
        Ok(PrimeTable {
            limit: *primes.last().unwrap() as u64,
            primes: primes.to_vec(),
            recip_prefix: recip_prefix(primes),
        })
    }
}

fn recip_prefix(primes: &[u32]) -> Vec<f64> {
    let mut acc = CompensatedSum::new();
    primes
        .iter()
        .map(|&p| {
            acc.add(1.0 / p as f64);
            acc.value()
        })
        .collect()
}

/// Sieve of Eratosthenes up to `n` with the default memory budget.
pub fn sieve(n: u64) -> Result<PrimeTable> {
    sieve_with_budget(n, DEFAULT_SIEVE_BUDGET)
}

pub fn sieve_with_budget(n: u64, budget: u64) -> Result<PrimeTable> {
    if n < 2 {
        return Err(Error::EmptyTable(n));
    }
    if n > budget {
        return Err(Error::Capacity {
            requested: n,
            budget,
        });
    }
    // Bit i stands for the odd number 2i + 1.
    let odd_count = (n as usize).div_ceil(2);
    let mut composite = vec![0u64; odd_count.div_ceil(64)];
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= n as usize {
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < odd_count {
                composite[j / 64] |= 1 << (j % 64);
                j += p;
            }
        }
        i += 1;
    }

    let estimate = (n as f64 / (n as f64).ln() * 1.3) as usize + 8;
    let mut primes = Vec::with_capacity(estimate);
    primes.push(2u32);
    for (w, &word) in composite.iter().enumerate() {
        let mut free = !word;
        while free != 0 {
            let b = free.trailing_zeros() as usize;
            let idx = w * 64 + b;
            if idx >= odd_count {
                break;
            }
            if idx > 0 {
                primes.push((2 * idx + 1) as u32);
            }
            free &= free - 1;
        }
    }

    let recip_prefix = recip_prefix(&primes);
    Ok(PrimeTable {
        limit: n,
        primes,
        recip_prefix,
    })
}

pub fn is_prime_trial(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m.is_multiple_of(2) {
        return m == 2;
    }
    let mut d = 3;
    while d * d <= m {
        if m.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Harmonic number `1 + 1/2 + ... + 1/k`.
pub fn harmonic(k: u64) -> Result<f64> {
    if k == 0 {
        return Err(domain("harmonic(0) is undefined"));
    }
    Ok((1..=k).map(|j| 1.0 / j as f64).collect::<CompensatedSum>().value())
}

/// Which denominator enters the tilt parameter `v_n = exp(-H_{k_n} / d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiltConvention {
    /// `d = gamma_n`. Makes `x^Ω e^{-H_k Ω/γ} = (x v)^Ω` exact.
    #[default]
    GammaDenominator,
    /// `d = k_n`.
    KDenominator,
}

/// Frozen model constants for a given `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u64,
    /// Prime harmonic sum over `p <= n`.
    pub gamma_n: f64,
    /// `floor(gamma_n)`.
    pub k_n: u64,
    pub v_n: f64,
    /// π(n).
    pub pi_n: u64,
}

impl ModelParams {
    pub fn from_table(table: &PrimeTable) -> Result<ModelParams> {
        Self::from_table_with(table, TiltConvention::default())
    }

    pub fn from_table_with(table: &PrimeTable, convention: TiltConvention) -> Result<ModelParams> {
        let gamma_n = table.prime_harmonic();
        let k_n = gamma_n.floor() as u64;
        if k_n == 0 {
            return Err(Error::ModelUndefined { n: table.limit() });
        }
        let h = harmonic(k_n)?;
        let denom = match convention {
            TiltConvention::GammaDenominator => gamma_n,
            TiltConvention::KDenominator => k_n as f64,
        };
        Ok(ModelParams {
            n: table.limit(),
            gamma_n,
            k_n,
            v_n: (-h / denom).exp(),
            pi_n: table.count() as u64,
        })
    }
}

/// Sieves up to `n` and derives the model constants.
pub fn params(n: u64) -> Result<ModelParams> {
    ModelParams::from_table(&sieve(n)?)
}
