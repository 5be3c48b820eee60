//! Finite discrete laws on `{0, ..., K}` and the measure transforms applied to
//! them: exponential tilt, size-bias and general penalisation.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::{compensated_sum, log_sum_exp};

/// Above this value of `support_max * ln x` the generating function is
/// evaluated in log space.
const PGF_LOG_SPACE_THRESHOLD: f64 = 600.0;

/// Probability mass function on `0..=support_max`, normalised to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDist {
    pmf: Vec<f64>,
}

/// One evaluation `E[x^X]` of a probability generating function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PgfValue {
    pub x: f64,
    pub value: f64,
}

impl DiscreteDist {
    /// Validates and normalises a vector of nonnegative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<DiscreteDist> {
        if weights.is_empty() {
            return Err(Error::Degenerate("empty pmf".into()));
        }
        if let Some((k, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(domain(format!("weight {w} at {k} is negative or not finite")));
        }
        let total = compensated_sum(weights.iter().copied());
        if total <= 0.0 {
            return Err(Error::Degenerate("total mass is zero".into()));
        }
        Ok(DiscreteDist {
            pmf: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn point_mass(m: usize) -> DiscreteDist {
        let mut pmf = vec![0.0; m + 1];
        pmf[m] = 1.0;
        DiscreteDist { pmf }
    }

    pub fn bernoulli(p: f64) -> Result<DiscreteDist> {
        check_probability(p)?;
        Ok(DiscreteDist {
            pmf: vec![1.0 - p, p],
        })
    }

    /// Law of a sum of independent Bernoulli variables, by exact convolution.
    /// The support is `0..=probs.len()`.
    pub fn bernoulli_sum(probs: &[f64]) -> Result<DiscreteDist> {
        let (dist, _) = Self::bernoulli_sum_capped(probs, probs.len())?;
        Ok(dist)
    }

    /// Same as [`bernoulli_sum`](Self::bernoulli_sum) but keeps only values
    /// `<= cap`. Returns the law renormalised on `0..=cap` together with the
    /// mass that was dropped. Costs `O(m * cap)`.
    pub fn bernoulli_sum_capped(probs: &[f64], cap: usize) -> Result<(DiscreteDist, f64)> {
        for &p in probs {
            check_probability(p)?;
        }
        let cap = cap.min(probs.len());
        let mut pmf = vec![0.0; cap + 1];
        pmf[0] = 1.0;
        let mut dropped = 0.0;
        let mut top = 0usize;
        for &p in probs {
            let q = 1.0 - p;
            if top == cap {
                dropped += pmf[cap] * p;
            } else {
                top += 1;
            }
            for k in (1..=top).rev() {
                pmf[k] = pmf[k] * q + pmf[k - 1] * p;
            }
            pmf[0] *= q;
        }
        if dropped > 0.0 {
            let kept = compensated_sum(pmf.iter().copied());
            for v in &mut pmf {
                *v /= kept;
            }
        }
        Ok((DiscreteDist { pmf }, dropped))
    }

    /// Poisson law of parameter `gamma`, cut at the smallest `K` whose tail
    /// mass `P(P_gamma > K)` is below `eps`, then renormalised.
    pub fn poisson_truncated(gamma: f64, eps: f64) -> Result<DiscreteDist> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(domain(format!("poisson parameter must be positive, got {gamma}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(domain(format!("eps must lie in (0, 1), got {eps}")));
        }
        let ln_gamma = gamma.ln();
        let mut terms = Vec::new();
        let mut ln_fact = 0.0;
        let mut k = 0usize;
        loop {
            if k > 0 {
                ln_fact += (k as f64).ln();
            }
            let t = (k as f64 * ln_gamma - gamma - ln_fact).exp();
            terms.push(t);
            if k as f64 > gamma && t < eps * 1e-6 {
                break;
            }
            k += 1;
        }
        // Geometric bound on what lies past the last computed term.
        let last = terms.len() - 1;
        let ratio = gamma / (last + 1) as f64;
        let mut tail = terms[last] * ratio / (1.0 - ratio);
        let mut cut = last;
        for j in (0..=last).rev() {
            // tail == P(P_gamma > j)
            if tail >= eps {
                break;
            }
            cut = j;
            tail += terms[j];
        }
        terms.truncate(cut + 1);
        Self::from_weights(terms)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn support_max(&self) -> usize {
        self.pmf.len() - 1
    }

    /// `P(X = k)`, zero outside the stored support.
    pub fn prob(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.pmf.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn moment(&self, order: u32) -> f64 {
        compensated_sum(
            self.pmf
                .iter()
                .enumerate()
                .map(|(k, p)| p * (k as f64).powi(order as i32)),
        )
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        compensated_sum(
            self.pmf
                .iter()
                .enumerate()
                .map(|(k, p)| p * (k as f64 - m).powi(2)),
        )
    }

    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.pmf
            .iter()
            .map(|p| {
                acc += p;
                acc.min(1.0)
            })
            .collect()
    }

    /// `E[x^X]` by Horner's rule, switching to log space when `x^K` could overflow.
    pub fn pgf(&self, x: f64) -> f64 {
        if x > 1.0 && self.support_max() as f64 * x.ln() > PGF_LOG_SPACE_THRESHOLD {
            return self.ln_pgf(x).exp();
        }
        self.pmf.iter().rev().fold(0.0, |acc, &p| acc * x + p)
    }

    pub fn pgf_value(&self, x: f64) -> PgfValue {
        PgfValue {
            x,
            value: self.pgf(x),
        }
    }

    /// `ln E[x^X]` for `x > 0`.
    pub fn ln_pgf(&self, x: f64) -> f64 {
        let lx = x.ln();
        let terms: Vec<f64> = self
            .pmf
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(k, p)| p.ln() + k as f64 * lx)
            .collect();
        log_sum_exp(&terms)
    }

    /// Reweights by `w(k)` and renormalises.
    pub fn penalise<F: Fn(usize) -> f64>(&self, w: F) -> Result<DiscreteDist> {
        let mut weights = Vec::with_capacity(self.pmf.len());
        for (k, &p) in self.pmf.iter().enumerate() {
            let wk = w(k);
            if !wk.is_finite() || wk < 0.0 {
                return Err(domain(format!("penalisation weight {wk} at {k}")));
            }
            weights.push(wk * p);
        }
        normalise(weights)
    }

    /// Reweights by `exp(log_w(k))`, computing the normaliser in log space.
    /// `log_w` may return `-inf` for a zero weight.
    pub fn penalise_log<F: Fn(usize) -> f64>(&self, log_w: F) -> Result<DiscreteDist> {
        let mut logs = Vec::with_capacity(self.pmf.len());
        for (k, &p) in self.pmf.iter().enumerate() {
            let lw = log_w(k);
            if lw.is_nan() || lw == f64::INFINITY {
                return Err(domain(format!("log-weight {lw} at {k}")));
            }
            logs.push(if p > 0.0 { p.ln() + lw } else { f64::NEG_INFINITY });
        }
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::Degenerate("penalisation has zero normaliser".into()));
        }
        normalise(logs.into_iter().map(|l| (l - max).exp()).collect())
    }

    /// Exponential tilt: `pmf[k] * x^k / E[x^X]`.
    pub fn tilt(&self, x: f64) -> Result<DiscreteDist> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(domain(format!("tilt parameter must be positive, got {x}")));
        }
        if x == 1.0 {
            return Ok(self.clone());
        }
        let lx = x.ln();
        self.penalise_log(|k| k as f64 * lx)
    }

    /// Size-bias transform: `k * pmf[k] / E[X]`.
    pub fn size_bias(&self) -> Result<DiscreteDist> {
        self.size_bias_iter(1)
    }

    /// `ell`-fold size-bias, i.e. penalisation by `k^ell`.
    pub fn size_bias_iter(&self, ell: u32) -> Result<DiscreteDist> {
        if ell == 0 {
            return Ok(self.clone());
        }
        if self.pmf.iter().skip(1).all(|&p| p == 0.0) {
            return Err(Error::Degenerate("size-bias of a law concentrated at 0".into()));
        }
        let e = ell as f64;
        self.penalise_log(|k| if k == 0 { f64::NEG_INFINITY } else { e * (k as f64).ln() })
    }

    /// Law of the sum of two independent variables.
    pub fn convolve(&self, other: &DiscreteDist) -> DiscreteDist {
        let mut pmf = vec![0.0; self.pmf.len() + other.pmf.len() - 1];
        for (i, &a) in self.pmf.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.pmf.iter().enumerate() {
                pmf[i + j] += a * b;
            }
        }
        DiscreteDist { pmf }
    }

    /// Law of `X + m`.
    pub fn shift(&self, m: usize) -> DiscreteDist {
        let mut pmf = vec![0.0; m];
        pmf.extend_from_slice(&self.pmf);
        DiscreteDist { pmf }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(domain(format!("probability {p} outside [0, 1]")))
    }
}

fn normalise(weights: Vec<f64>) -> Result<DiscreteDist> {
    let total = compensated_sum(weights.iter().copied());
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Degenerate(format!("penalisation normaliser is {total}")));
    }
    Ok(DiscreteDist {
        pmf: weights.into_iter().map(|w| w / total).collect(),
    })
}

/// `½ Σ |p(k) - q(k)|` over the union of the supports.
pub fn total_variation(a: &DiscreteDist, b: &DiscreteDist) -> f64 {
    let len = a.pmf.len().max(b.pmf.len());
    0.5 * compensated_sum((0..len).map(|k| (a.prob(k) - b.prob(k)).abs()))
}
