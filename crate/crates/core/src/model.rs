//! The penalised model of ω(U_n) and its pathwise realisations.
//!
//! Three exact laws are built from the independent Bernoulli model
//! `Ω_n = Σ_{p <= n} B_p`, `P(B_p = 1) = 1/p`:
//!
//! * `Ω'_n`: `Ω_n` penalised by `Φ_C(Ω_n / γ_n)`;
//! * `Ω''_n`: `Ω_n` penalised by the truncated product `Φ_C^{(k_n)}(Ω_n / γ_n)`;
//! * the tilted sum `Σ B_p(v_n)` with `P(B_p(v) = 1) = v / (p + v - 1)`.
//!
//! Up to normalisation `Φ_C^{(k)}(s/γ) ∝ v^s E[s^{C'}]` with `v = exp(-H_k/γ)` and
//! `C' = Σ_{l <= k} B'_l(1/γ)`, so `Ω''_n` is the tilted sum size-biased a random
//! number of times. [`Sampler`] realises this pathwise: a random set of primes
//! is forced to divide and the remaining tilted Bernoulli variables are drawn
//! independently.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::DiscreteDist;
use crate::error::{domain, Error, Result};
use crate::limiting::{phi_c_closed, phi_c_trunc};
use crate::primes::{harmonic, ModelParams, PrimeTable};

/// Mass beyond the support cap of the independent model is below this bound.
const SUPPORT_TAIL: f64 = 1e-30;

/// Largest instance accepted by the brute-force enumerations.
pub const BRUTE_FORCE_MAX_PRIMES: usize = 8;
pub const BRUTE_FORCE_MAX_K: u64 = 4;

/// Weights of the random prime index `I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexConvention {
    /// `P(I = k) ∝ E[B_{p_k}(v)] = v / (p_k + v - 1)`, as the size-bias coupling requires.
    #[default]
    LemmaWeights,
    /// `P(I = k) ∝ 1 / (p_k + v + 1)`.
    PaperLiteral,
}

/// How the forced indices are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// Exact iterated size-bias. The number of size-bias steps follows `C'`
    /// reweighted by `E[Ω̃^l]`, and an index tuple is drawn with probability
    /// proportional to the product of `μ P(I = k)` over its *distinct* entries.
    #[default]
    IteratedSizeBias,
    /// `C'` drawn from its own law and `I_1, ..., I_{C'}` i.i.d.
    IidPaintbox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexLaw {
    weights: Vec<f64>,
    cdf: Vec<f64>,
    convention: IndexConvention,
}

impl IndexLaw {
    pub fn new(primes: &[u32], v: f64, convention: IndexConvention) -> Result<IndexLaw> {
        if primes.is_empty() {
            return Err(Error::EmptyTable(0));
        }
        if !(v > 0.0) {
            return Err(domain(format!("tilt parameter must be positive, got {v}")));
        }
        let raw: Vec<f64> = primes
            .iter()
            .map(|&p| {
                let p = p as f64;
                match convention {
                    IndexConvention::LemmaWeights => v / (p + v - 1.0),
                    IndexConvention::PaperLiteral => 1.0 / (p + v + 1.0),
                }
            })
            .collect();
        let total = crate::numeric::compensated_sum(raw.iter().copied());
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mut acc = crate::numeric::CompensatedSum::new();
        let cdf = weights
            .iter()
            .map(|&w| {
                acc.add(w);
                acc.value()
            })
            .collect();
        Ok(IndexLaw {
            weights,
            cdf,
            convention,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn convention(&self) -> IndexConvention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Zero-based index, by inversion of the cumulative weights.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }

    pub fn as_dist(&self) -> DiscreteDist {
        DiscreteDist::from_weights(self.weights.clone()).expect("index law is normalised")
    }
}

pub fn index_law(
    params: &ModelParams,
    table: &PrimeTable,
    convention: IndexConvention,
) -> Result<IndexLaw> {
    IndexLaw::new(model_primes(params, table)?, params.v_n, convention)
}

/// Indices drawn for one realisation, with the number of distinct values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaintboxDraw {
    pub indices: Vec<usize>,
    pub block_count: usize,
}

impl PaintboxDraw {
    pub fn new(indices: Vec<usize>) -> PaintboxDraw {
        let block_count = paintbox_delta(&indices);
        PaintboxDraw {
            indices,
            block_count,
        }
    }

    /// Distinct indices, ascending.
    pub fn blocks(&self) -> Vec<usize> {
        let mut b = self.indices.clone();
        b.sort_unstable();
        b.dedup();
        b
    }
}

/// Number of blocks of the partition `i ~ j <=> I_i = I_j`.
pub fn paintbox_delta(indices: &[usize]) -> usize {
    let mut v = indices.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// A reproducible random stream: ChaCha8 keyed by `seed`, stream `stream_id`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> RngStream {
        RngStream { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

fn model_primes<'t>(params: &ModelParams, table: &'t PrimeTable) -> Result<&'t [u32]> {
    if table.limit() < params.n {
        return Err(domain(format!(
            "prime table stops at {} but the model needs n = {}",
            table.limit(),
            params.n
        )));
    }
    Ok(&table.primes()[..table.count_upto(params.n)])
}

/// Smallest `K` with Chernoff bound `e^{-μ}(eμ/K)^K` on `P(S >= K)` below `tail`.
pub fn support_cap(mean: f64, tail: f64) -> usize {
    let mut k = (mean.ceil() as usize).max(1) * 2;
    loop {
        let kf = k as f64;
        let ln_bound = -mean + kf * (std::f64::consts::E * mean / kf).ln();
        if ln_bound < tail.ln() {
            return k;
        }
        k += 1;
    }
}

fn capped_bernoulli_sum(probs: &[f64]) -> Result<DiscreteDist> {
    let mean: f64 = probs.iter().sum();
    let cap = support_cap(mean, SUPPORT_TAIL).min(probs.len());
    Ok(DiscreteDist::bernoulli_sum_capped(probs, cap)?.0)
}

/// `Ω_n`: independent Bernoulli variables of parameter `1/p`, `p <= n`.
///
/// Values whose probability is below `1e-30` are cut off, so the support stays
/// small even when π(n) is in the millions.
pub fn dist_omega_indep(params: &ModelParams, table: &PrimeTable) -> Result<DiscreteDist> {
    let probs: Vec<f64> = model_primes(params, table)?
        .iter()
        .map(|&p| 1.0 / p as f64)
        .collect();
    capped_bernoulli_sum(&probs)
}

pub fn tilted_probability(p: u32, v: f64) -> f64 {
    v / (p as f64 + v - 1.0)
}

/// `Ω̃_n = Σ B_p(v_n)`.
pub fn dist_omega_tilted(params: &ModelParams, table: &PrimeTable) -> Result<DiscreteDist> {
    let probs: Vec<f64> = model_primes(params, table)?
        .iter()
        .map(|&p| tilted_probability(p, params.v_n))
        .collect();
    capped_bernoulli_sum(&probs)
}

/// `Ω'_n`: `Ω_n` penalised by `Φ_C(Ω_n/γ_n)`.
pub fn dist_omega_prime(params: &ModelParams, table: &PrimeTable) -> Result<DiscreteDist> {
    Ok(omega_prime_with_normaliser(params, table)?.0)
}

/// `Ω'_n` together with `E[Φ_C(Ω_n/γ_n)]`.
pub fn omega_prime_with_normaliser(
    params: &ModelParams,
    table: &PrimeTable,
) -> Result<(DiscreteDist, f64)> {
    let base = dist_omega_indep(params, table)?;
    let g = params.gamma_n;
    let weights: Vec<f64> = (0..=base.support_max())
        .map(|s| phi_c_closed(s as f64 / g))
        .collect::<Result<_>>()?;
    let normaliser = crate::numeric::compensated_sum(
        weights.iter().zip(base.pmf()).map(|(w, p)| w * p),
    );
    Ok((base.penalise(|s| weights[s])?, normaliser))
}

/// `Ω''_n`: `Ω_n` penalised by `Φ_C^{(k_n)}(Ω_n/γ_n)`.
pub fn dist_omega_dprime(params: &ModelParams, table: &PrimeTable) -> Result<DiscreteDist> {
    dist_omega_dprime_k(params, table, params.k_n)
}

/// As [`dist_omega_dprime`] with the truncation order overridden.
pub fn dist_omega_dprime_k(params: &ModelParams, table: &PrimeTable, k: u64) -> Result<DiscreteDist> {
    if k == 0 {
        return Err(Error::ModelUndefined { n: params.n });
    }
    let base = dist_omega_indep(params, table)?;
    let g = params.gamma_n;
    base.penalise(|s| phi_c_trunc(k, s as f64 / g))
}

/// `C' = Σ_{l=1..k} B'_l(1/γ)` with `P(B'_l(1/γ) = 1) = 1 / (1 + γ(l - 1))`.
pub fn dist_cprime(k: u64, gamma: f64) -> Result<DiscreteDist> {
    if k == 0 {
        return Err(domain("C' needs k >= 1"));
    }
    if !(gamma > 0.0) {
        return Err(domain(format!("gamma must be positive, got {gamma}")));
    }
    DiscreteDist::bernoulli_sum(&cprime_probs(k, gamma))
}

fn cprime_probs(k: u64, gamma: f64) -> Vec<f64> {
    (1..=k)
        .map(|l| 1.0 / (1.0 + gamma * (l as f64 - 1.0)))
        .collect()
}

/// Hybrid sum `Σ_{k <= A} B_{p_k} + Σ_{k <= A'} B'_k` with `P(B'_k = 1) = 1/k`.
pub fn dist_hybrid(a: usize, a_prime: usize, table: &PrimeTable) -> Result<DiscreteDist> {
    if a > table.count() {
        return Err(domain(format!(
            "A = {a} exceeds the {} primes in the table",
            table.count()
        )));
    }
    let probs = hybrid_probs(a, a_prime, table);
    capped_bernoulli_sum(&probs)
}

/// Success probabilities of the hybrid sum, primes first.
pub fn hybrid_probs(a: usize, a_prime: usize, table: &PrimeTable) -> Vec<f64> {
    table.primes()[..a.min(table.count())]
        .iter()
        .map(|&p| 1.0 / p as f64)
        .chain((1..=a_prime).map(|k| 1.0 / k as f64))
        .collect()
}

/// Poisson(γ) penalised by `φ(P_γ / γ)`.
pub fn dist_q<F: Fn(f64) -> f64>(phi: F, gamma: f64, eps: f64) -> Result<DiscreteDist> {
    Ok(dist_q_with_normaliser(phi, gamma, eps)?.0)
}

pub fn dist_q_with_normaliser<F: Fn(f64) -> f64>(
    phi: F,
    gamma: f64,
    eps: f64,
) -> Result<(DiscreteDist, f64)> {
    let base = DiscreteDist::poisson_truncated(gamma, eps)?;
    let weights: Vec<f64> = (0..=base.support_max())
        .map(|k| phi(k as f64 / gamma))
        .collect();
    let normaliser =
        crate::numeric::compensated_sum(weights.iter().zip(base.pmf()).map(|(w, p)| w * p));
    Ok((base.penalise(|k| weights[k])?, normaliser))
}

/// `E[x^Z] / E[x^{P_γ}]`.
pub fn mod_poisson_ratio(pgf_value: f64, gamma: f64, x: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(domain(format!("gamma must be positive, got {gamma}")));
    }
    Ok(pgf_value / (gamma * (x - 1.0)).exp())
}

/// Law of `δ(I_1, ..., I_len)` for `I` uniform on `n_symbols` values, by
/// enumerating all `n_symbols^len` tuples.
pub fn paintbox_blocks_uniform(n_symbols: usize, len: usize) -> Result<DiscreteDist> {
    let total = (n_symbols as u64)
        .checked_pow(len as u32)
        .filter(|&t| t <= 50_000_000)
        .ok_or(Error::Capacity {
            requested: n_symbols as u64,
            budget: 50_000_000,
        })?;
    let mut counts = vec![0u64; len + 1];
    let mut tuple = vec![0usize; len];
    for code in 0..total {
        let mut c = code;
        for slot in tuple.iter_mut() {
            *slot = (c % n_symbols as u64) as usize;
            c /= n_symbols as u64;
        }
        counts[paintbox_delta(&tuple)] += 1;
    }
    DiscreteDist::from_weights(counts.into_iter().map(|c| c as f64).collect())
}

/// Every ingredient of `Ω''_n` for one instance: primes, `γ`, `k`, `v`, the
/// law of `C'` and the index law. Tiny instances with overridden constants are
/// built with [`PenalisedModel::custom`].
#[derive(Debug, Clone)]
pub struct PenalisedModel {
    primes: Vec<u32>,
    gamma: f64,
    k: u64,
    v: f64,
    tilted: Vec<f64>,
    cprime: DiscreteDist,
    law: IndexLaw,
}

impl PenalisedModel {
    pub fn new(
        params: &ModelParams,
        table: &PrimeTable,
        convention: IndexConvention,
    ) -> Result<PenalisedModel> {
        Self::custom(
            model_primes(params, table)?,
            params.k_n,
            params.gamma_n,
            params.v_n,
            convention,
        )
    }

    pub fn custom(
        primes: &[u32],
        k: u64,
        gamma: f64,
        v: f64,
        convention: IndexConvention,
    ) -> Result<PenalisedModel> {
        let law = IndexLaw::new(primes, v, convention)?;
        Ok(PenalisedModel {
            primes: primes.to_vec(),
            gamma,
            k,
            v,
            tilted: primes.iter().map(|&p| tilted_probability(p, v)).collect(),
            cprime: dist_cprime(k, gamma)?,
            law,
        })
    }

    /// Same instance with `v = exp(-H_k / γ)`, the value that makes the
    /// pathwise model equal `Ω''`.
    pub fn matched_tilt(primes: &[u32], k: u64, gamma: f64, convention: IndexConvention) -> Result<PenalisedModel> {
        let v = (-harmonic(k)? / gamma).exp();
        Self::custom(primes, k, gamma, v, convention)
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// `P(B_{p_k}(v) = 1)` for each prime.
    pub fn tilted_probs(&self) -> &[f64] {
        &self.tilted
    }

    pub fn cprime(&self) -> &DiscreteDist {
        &self.cprime
    }

    pub fn index_law(&self) -> &IndexLaw {
        &self.law
    }

    /// `Σ B_p(v)`.
    pub fn tilted_law(&self) -> Result<DiscreteDist> {
        capped_bernoulli_sum(&self.tilted)
    }

    /// Law of `Ω''` from the generating-function identity
    /// `E[x^{Ω''}] ∝ E[(x v)^Ω Ω^{C'}]`, i.e. `P(Ω'' = s) ∝ P(Ω = s) v^s E[s^{C'}]`,
    /// where `Ω` uses the untilted probabilities `1/p`.
    pub fn identity_law(&self) -> Result<DiscreteDist> {
        let probs: Vec<f64> = self.primes.iter().map(|&p| 1.0 / p as f64).collect();
        let base = capped_bernoulli_sum(&probs)?;
        let ln_v = self.v.ln();
        let cprime = &self.cprime;
        base.penalise_log(|s| {
            if s == 0 {
                // E[0^{C'}] = P(C' = 0)
                cprime.prob(0).ln()
            } else {
                s as f64 * ln_v + cprime.ln_pgf(s as f64)
            }
        })
    }
}

/// Draws `Ω''` realisations for one model.
#[derive(Debug, Clone)]
pub struct Sampler<'m> {
    model: &'m PenalisedModel,
    coupling: Coupling,
    thresholds: Vec<u64>,
    plan: IndexPlan,
}

#[derive(Debug, Clone)]
enum IndexPlan {
    Iid {
        cprime_cdf: Vec<f64>,
    },
    SizeBias {
        /// Weights `a_k = μ P(I = k)`.
        weights: Vec<f64>,
        /// `suffix[i * (kmax + 1) + r] = e_r(a_i, ..., a_{m-1})`, elementary symmetric sums.
        suffix: Vec<f64>,
        kmax: usize,
        /// Cumulative weights over `(l, j)` pairs, `l` steps covering `j` distinct indices.
        joint_cdf: Vec<(f64, usize, usize)>,
    },
}

/// Which of the two pathwise descriptions to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// Skip the drawn indices and add the number of blocks.
    Pathwise,
    /// Draw every Bernoulli variable and force the drawn indices to 1.
    Conditioned,
}

fn bernoulli_threshold(p: f64) -> u64 {
    if p >= 1.0 {
        u64::MAX
    } else {
        (p * 18_446_744_073_709_551_616.0) as u64
    }
}

/// Number of surjections from an `l`-set onto a `j`-set, `j! S(l, j)`.
fn surjections(l: usize, j: usize) -> f64 {
    // surj(l, j) = j * (surj(l-1, j) + surj(l-1, j-1))
    let mut row = vec![0.0f64; j + 1];
    row[0] = 1.0;
    for _ in 0..l {
        for jj in (0..=j).rev() {
            row[jj] = if jj == 0 { 0.0 } else { jj as f64 * (row[jj] + row[jj - 1]) };
        }
    }
    row[j]
}

impl<'m> Sampler<'m> {
    pub fn new(model: &'m PenalisedModel, coupling: Coupling) -> Sampler<'m> {
        let thresholds = model.tilted.iter().map(|&p| bernoulli_threshold(p)).collect();
        let plan = match coupling {
            Coupling::IidPaintbox => IndexPlan::Iid {
                cprime_cdf: model.cprime.cdf(),
            },
            Coupling::IteratedSizeBias => {
                let mu: f64 = crate::numeric::compensated_sum(model.tilted.iter().copied());
                let weights: Vec<f64> = model.law.weights().iter().map(|w| w * mu).collect();
                let kmax = model.cprime.support_max();
                let m = weights.len();
                let width = kmax + 1;
                let mut suffix = vec![0.0; (m + 1) * width];
                suffix[m * width] = 1.0;
                for i in (0..m).rev() {
                    for r in 0..width {
                        let skip = suffix[(i + 1) * width + r];
                        let take = if r > 0 { weights[i] * suffix[(i + 1) * width + r - 1] } else { 0.0 };
                        suffix[i * width + r] = skip + take;
                    }
                }
                let mut joint_cdf = Vec::new();
                let mut acc = 0.0;
                for (l, &pc) in model.cprime.pmf().iter().enumerate() {
                    for (j, &e_j) in suffix.iter().enumerate().take(l.min(m) + 1) {
                        let w = pc * surjections(l, j) * e_j;
                        if w > 0.0 {
                            acc += w;
                            joint_cdf.push((acc, l, j));
                        }
                    }
                }
                IndexPlan::SizeBias {
                    weights,
                    suffix,
                    kmax,
                    joint_cdf,
                }
            }
        };
        Sampler {
            model,
            coupling,
            thresholds,
            plan,
        }
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn model(&self) -> &PenalisedModel {
        self.model
    }

    /// Draws the number of size-bias steps and the forced indices.
    pub fn draw_indices<R: RngCore + ?Sized>(&self, rng: &mut R) -> PaintboxDraw {
        match &self.plan {
            IndexPlan::Iid { cprime_cdf } => {
                let u: f64 = rng.random::<f64>() * cprime_cdf[cprime_cdf.len() - 1];
                let l = cprime_cdf.partition_point(|&c| c <= u).min(cprime_cdf.len() - 1);
                PaintboxDraw::new((0..l).map(|_| self.model.law.sample(rng)).collect())
            }
            IndexPlan::SizeBias {
                weights,
                suffix,
                kmax,
                joint_cdf,
            } => {
                let total = joint_cdf.last().map(|c| c.0).unwrap_or(1.0);
                let u: f64 = rng.random::<f64>() * total;
                let pos = joint_cdf.partition_point(|c| c.0 <= u).min(joint_cdf.len() - 1);
                let (_, l, j) = joint_cdf[pos];
                let width = kmax + 1;
                let mut blocks = Vec::with_capacity(j);
                let mut r = j;
                let mut i = 0;
                while r > 0 {
                    let here = suffix[i * width + r];
                    let take = weights[i] * suffix[(i + 1) * width + r - 1];
                    if rng.random::<f64>() * here < take {
                        blocks.push(i);
                        r -= 1;
                    }
                    i += 1;
                }
                PaintboxDraw::new(uniform_surjection(&blocks, l, rng))
            }
        }
    }

    /// One draw of `Ω''` from the given index draw.
    pub fn realise<R: RngCore + ?Sized>(
        &self,
        draw: &PaintboxDraw,
        mode: SampleMode,
        rng: &mut R,
    ) -> usize {
        let forced = draw.blocks();
        let mut next_forced = forced.iter().copied().peekable();
        let mut count = 0usize;
        for (k, &thr) in self.thresholds.iter().enumerate() {
            let u = rng.next_u64();
            let is_forced = next_forced.peek() == Some(&k);
            if is_forced {
                next_forced.next();
            }
            match mode {
                SampleMode::Pathwise => {
                    if !is_forced && u < thr {
                        count += 1;
                    }
                }
                SampleMode::Conditioned => {
                    if is_forced || u < thr {
                        count += 1;
                    }
                }
            }
        }
        match mode {
            SampleMode::Pathwise => count + draw.block_count,
            SampleMode::Conditioned => count,
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, mode: SampleMode, rng: &mut R) -> usize {
        let draw = self.draw_indices(rng);
        self.realise(&draw, mode, rng)
    }

    /// Histogram of `draws` samples. Work is split into fixed batches, batch
    /// `b` using stream `b` of `seed`, so the result does not depend on the
    /// number of worker threads.
    pub fn sample_counts(&self, mode: SampleMode, draws: u64, seed: u64) -> Vec<u64> {
        const BATCH: u64 = 10_000;
        let batches = draws.div_ceil(BATCH);
        let partials: Vec<Vec<u64>> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut rng = RngStream::new(seed, b).rng();
                let size = BATCH.min(draws - b * BATCH);
                let mut counts = Vec::new();
                for _ in 0..size {
                    let x = self.sample(mode, &mut rng);
                    if x >= counts.len() {
                        counts.resize(x + 1, 0);
                    }
                    counts[x] += 1;
                }
                counts
            })
            .collect();
        let len = partials.iter().map(Vec::len).max().unwrap_or(0);
        let mut total = vec![0u64; len];
        for part in partials {
            for (t, c) in total.iter_mut().zip(part) {
                *t += c;
            }
        }
        total
    }
}

impl Sampler<'_> {
    /// Histogram of the number of distinct forced indices over `draws` index draws.
    pub fn block_count_counts(&self, draws: u64, seed: u64) -> Vec<u64> {
        let mut rng = RngStream::new(seed, 0).rng();
        let mut counts = Vec::new();
        for _ in 0..draws {
            let b = self.draw_indices(&mut rng).block_count;
            if b >= counts.len() {
                counts.resize(b + 1, 0);
            }
            counts[b] += 1;
        }
        counts
    }
}

/// Uniformly random map from `0..len` onto `blocks` (every block hit), by rejection.
fn uniform_surjection<R: RngCore + ?Sized>(blocks: &[usize], len: usize, rng: &mut R) -> Vec<usize> {
    if blocks.is_empty() {
        return Vec::new();
    }
    loop {
        let picks: Vec<usize> = (0..len)
            .map(|_| blocks[rng.random_range(0..blocks.len())])
            .collect();
        if paintbox_delta(&picks) == blocks.len() {
            return picks;
        }
    }
}

/// One pathwise draw of `Ω''`.
pub fn sample_omega_dprime<R: RngCore + ?Sized>(
    model: &PenalisedModel,
    coupling: Coupling,
    rng: &mut R,
) -> usize {
    Sampler::new(model, coupling).sample(SampleMode::Pathwise, rng)
}

/// One draw of `Ω''` by forcing the indexed Bernoulli variables to 1.
pub fn sample_conditioned<R: RngCore + ?Sized>(
    model: &PenalisedModel,
    coupling: Coupling,
    rng: &mut R,
) -> usize {
    Sampler::new(model, coupling).sample(SampleMode::Conditioned, rng)
}

/// Empirical law of a batch of samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Empirical {
    pub fn from_counts(counts: Vec<u64>) -> Empirical {
        let total = counts.iter().sum();
        Empirical { counts, total }
    }

    pub fn from_samples(samples: &[usize]) -> Empirical {
        let mut counts = Vec::new();
        for &x in samples {
            if x >= counts.len() {
                counts.resize(x + 1, 0);
            }
            counts[x] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn dist(&self) -> Result<DiscreteDist> {
        DiscreteDist::from_weights(self.counts.iter().map(|&c| c as f64).collect())
    }

    /// Sample mean of `x^X` and the half-width `3 σ̂ / √N`.
    pub fn pgf_estimate(&self, x: f64) -> (f64, f64) {
        let n = self.total as f64;
        let (mut m1, mut m2) = (0.0, 0.0);
        for (k, &c) in self.counts.iter().enumerate() {
            let v = x.powi(k as i32);
            m1 += c as f64 * v;
            m2 += c as f64 * v * v;
        }
        m1 /= n;
        m2 /= n;
        let var = (m2 - m1 * m1).max(0.0) * n / (n - 1.0).max(1.0);
        (m1, 3.0 * var.sqrt() / n.sqrt())
    }
}

fn check_brute_force_size(model: &PenalisedModel) -> Result<()> {
    if model.primes.len() > BRUTE_FORCE_MAX_PRIMES {
        return Err(Error::Capacity {
            requested: model.primes.len() as u64,
            budget: BRUTE_FORCE_MAX_PRIMES as u64,
        });
    }
    if model.k > BRUTE_FORCE_MAX_K {
        return Err(Error::Capacity {
            requested: model.k,
            budget: BRUTE_FORCE_MAX_K,
        });
    }
    Ok(())
}

/// Every index tuple of the construction with its (unnormalised) weight.
/// Enumerates the `2^k` configurations of the `B'` variables and all tuples of
/// length `C'`.
fn enumerate_index_tuples(model: &PenalisedModel, coupling: Coupling) -> Vec<(Vec<usize>, f64)> {
    let m = model.primes.len();
    let k = model.k as usize;
    let b_probs = cprime_probs(model.k, model.gamma);
    let mu: f64 = model.primes.iter().map(|&p| tilted_probability(p, model.v)).sum();
    let w = model.law.weights();

    let mut out = Vec::new();
    for config in 0u32..(1 << k) {
        let mut p_config = 1.0;
        for (l, &q) in b_probs.iter().enumerate() {
            p_config *= if config >> l & 1 == 1 { q } else { 1.0 - q };
        }
        if p_config == 0.0 {
            continue;
        }
        let len = config.count_ones() as usize;
        let n_tuples = m.pow(len as u32);
        let mut tuple = vec![0usize; len];
        for code in 0..n_tuples {
            let mut c = code;
            for slot in tuple.iter_mut() {
                *slot = c % m;
                c /= m;
            }
            let weight = match coupling {
                Coupling::IidPaintbox => tuple.iter().map(|&i| w[i]).product::<f64>(),
                Coupling::IteratedSizeBias => {
                    let mut distinct = tuple.clone();
                    distinct.sort_unstable();
                    distinct.dedup();
                    distinct.iter().map(|&i| mu * w[i]).product::<f64>()
                }
            };
            out.push((tuple.clone(), p_config * weight));
        }
    }
    out
}

/// Exact law of the pathwise construction, by full enumeration of the `B'`
/// variables, the index tuples and the Bernoulli variables at non-drawn indices.
///
/// Limited to 8 primes and `k <= 4`.
pub fn brute_force_omega_dprime(model: &PenalisedModel, coupling: Coupling) -> Result<DiscreteDist> {
    check_brute_force_size(model)?;
    let m = model.primes.len();
    let p: Vec<f64> = model.primes.iter().map(|&q| tilted_probability(q, model.v)).collect();
    let mut pmf = vec![0.0; m + 1];
    for (tuple, weight) in enumerate_index_tuples(model, coupling) {
        let delta = paintbox_delta(&tuple);
        let forced: u32 = tuple.iter().fold(0, |acc, &i| acc | 1 << i);
        for mask in 0u32..(1 << m) {
            if mask & forced != 0 {
                continue;
            }
            let mut pr = weight;
            for (i, &pi) in p.iter().enumerate() {
                if forced >> i & 1 == 1 {
                    continue;
                }
                pr *= if mask >> i & 1 == 1 { pi } else { 1.0 - pi };
            }
            pmf[mask.count_ones() as usize + delta] += pr;
        }
    }
    DiscreteDist::from_weights(pmf)
}

/// Exact law of the conditioning description: all Bernoulli variables are
/// drawn and those at drawn indices are then set to 1.
pub fn brute_force_conditioned(model: &PenalisedModel, coupling: Coupling) -> Result<DiscreteDist> {
    check_brute_force_size(model)?;
    let m = model.primes.len();
    let p: Vec<f64> = model.primes.iter().map(|&q| tilted_probability(q, model.v)).collect();
    let mut pmf = vec![0.0; m + 1];
    for (tuple, weight) in enumerate_index_tuples(model, coupling) {
        let forced: u32 = tuple.iter().fold(0, |acc, &i| acc | 1 << i);
        for mask in 0u32..(1 << m) {
            let mut pr = weight;
            for (i, &pi) in p.iter().enumerate() {
                pr *= if mask >> i & 1 == 1 { pi } else { 1.0 - pi };
            }
            pmf[(mask | forced).count_ones() as usize] += pr;
        }
    }
    DiscreteDist::from_weights(pmf)
}

/// `Σ_k P(I = k) law(Σ_{j != k} B_{p_j}(v) + 1)`: the one-step size-bias
/// coupling of the tilted sum.
pub fn size_bias_coupling_law(model: &PenalisedModel) -> Result<DiscreteDist> {
    let m = model.primes.len();
    let mut pmf = vec![0.0; m + 1];
    for (k, &wk) in model.law.weights().iter().enumerate() {
        let others: Vec<f64> = model
            .tilted
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &p)| p)
            .collect();
        let rest = DiscreteDist::bernoulli_sum(&others)?.shift(1);
        for (s, &pr) in rest.pmf().iter().enumerate() {
            pmf[s] += wk * pr;
        }
    }
    DiscreteDist::from_weights(pmf)
}
