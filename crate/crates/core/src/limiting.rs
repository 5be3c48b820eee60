//! Limiting functions of mod-Poisson convergence: the cycle factor Φ_C, the
//! independent-prime factor Φ_Ω, their product Φ_ω, and the generic Bernoulli
//! limit. Everything is restricted to real `x >= 0`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::primes::{self, PrimeTable, DEFAULT_SIEVE_BUDGET};
use crate::special::recip_gamma;

#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

/// Products longer than this are accumulated in log space.
const LOG_SPACE_TERMS: u64 = 1000;

/// `(1 + u) e^{-u}` accumulated as a sign and a log-magnitude.
#[derive(Debug, Clone, Copy)]
struct LogProduct {
    ln_abs: f64,
    negative: bool,
    zero: bool,
}

impl LogProduct {
    fn new() -> Self {
        LogProduct {
            ln_abs: 0.0,
            negative: false,
            zero: false,
        }
    }

    fn mul_factor(&mut self, u: f64) {
        let f = 1.0 + u;
        if f == 0.0 {
            self.zero = true;
            return;
        }
        if f < 0.0 {
            self.negative = !self.negative;
        }
        self.ln_abs += u.ln_1p_abs() - u;
    }

    fn value(&self) -> f64 {
        if self.zero {
            0.0
        } else if self.negative {
            -self.ln_abs.exp()
        } else {
            self.ln_abs.exp()
        }
    }
}

trait Ln1pAbs {
    fn ln_1p_abs(self) -> f64;
}

impl Ln1pAbs for f64 {
    fn ln_1p_abs(self) -> f64 {
        if self > -1.0 {
            self.ln_1p()
        } else {
            (1.0 + self).abs().ln()
        }
    }
}

/// Truncated cycle factor `Π_{l=1..k} (1 + (x-1)/l) e^{-(x-1)/l}`.
///
/// Lies in `[0, 1]` for `x >= 0` and vanishes at `x = 0`.
pub fn phi_c_trunc(k: u64, x: f64) -> f64 {
    let u = x - 1.0;
    if k <= LOG_SPACE_TERMS {
        (1..=k)
            .map(|l| {
                let v = u / l as f64;
                (1.0 + v) * (-v).exp()
            })
            .product()
    } else {
        let mut acc = LogProduct::new();
        for l in 1..=k {
            acc.mul_factor(u / l as f64);
            if acc.zero {
                return 0.0;
            }
        }
        acc.value()
    }
}

/// `Φ_C(x) = e^{-(x-1) γ_EM} / Γ(x)`, the limit of [`phi_c_trunc`].
pub fn phi_c_closed(x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(domain(format!("phi_C is evaluated on x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((-(x - 1.0) * EULER_GAMMA).exp() * recip_gamma(x))
}

/// `Π_{p in table} (1 + (x-1)/p) e^{-(x-1)/p}`.
pub fn phi_big_omega_trunc(table: &PrimeTable, x: f64) -> f64 {
    phi_big_omega_over(table.primes(), x)
}

fn phi_big_omega_over(primes: &[u32], x: f64) -> f64 {
    let u = x - 1.0;
    let mut acc = LogProduct::new();
    for &p in primes {
        acc.mul_factor(u / p as f64);
        if acc.zero {
            return 0.0;
        }
    }
    acc.value()
}

/// Generic Bernoulli limit `Π (1 + p_k (x-1)) e^{-p_k (x-1)}`.
pub fn phi_generic(probs: &[f64], x: f64) -> f64 {
    let u = x - 1.0;
    let mut acc = LogProduct::new();
    for &p in probs {
        acc.mul_factor(p * u);
        if acc.zero {
            return 0.0;
        }
    }
    acc.value()
}

/// Prime cutoff `P` such that the omitted factors `p > P` of Φ_Ω change its
/// logarithm by at most `log_tol`, for every `|x - 1| <= span`.
///
/// With `u = (x-1)/p` and `p >= 2|x-1|`, `|ln((1+u)e^{-u})| <= u²/(2(1-|u|)) <= u²`,
/// and the sum of `1/m²` over odd `m > P` is at most `1/(2(P-1))`.
pub fn big_omega_cutoff(span: f64, log_tol: f64) -> u64 {
    let span = span.abs();
    let by_tail = (span * span / (2.0 * log_tol)).ceil() + 1.0;
    let by_validity = (2.0 * span).ceil();
    by_tail.max(by_validity).max(3.0) as u64
}

/// Evaluates Φ_Ω and Φ_ω with a certified truncation error, for all `x` with
/// `|x - 1| <= span`.
#[derive(Debug, Clone)]
pub struct LimitEvaluator {
    table: PrimeTable,
    span: f64,
    error_target: f64,
}

impl LimitEvaluator {
    pub fn new(span: f64, error_target: f64) -> Result<LimitEvaluator> {
        if !(error_target > 0.0) {
            return Err(domain("error target must be positive"));
        }
        if !(span >= 0.0 && span.is_finite()) {
            return Err(domain("span must be finite and nonnegative"));
        }
        // Φ_Ω <= 1, so a log error t costs at most e^t - 1 <= 2t in value for t <= 1.
        let cutoff = big_omega_cutoff(span, error_target / 2.0);
        if cutoff > DEFAULT_SIEVE_BUDGET {
            return Err(domain(format!(
                "span {span} with error target {error_target} needs primes up to {cutoff}"
            )));
        }
        Ok(LimitEvaluator {
            table: primes::sieve(cutoff)?,
            span,
            error_target,
        })
    }

    /// Evaluator covering `x` in `[0, 2]` at error `1e-6`.
    pub fn standard() -> LimitEvaluator {
        LimitEvaluator::new(1.0, 1e-6).expect("standard evaluator")
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn error_target(&self) -> f64 {
        self.error_target
    }

    pub fn cutoff(&self) -> u64 {
        self.table.limit()
    }

    fn check(&self, x: f64) -> Result<()> {
        if x < 0.0 || (x - 1.0).abs() > self.span + 1e-12 {
            return Err(domain(format!(
                "x = {x} outside the evaluator range |x - 1| <= {}",
                self.span
            )));
        }
        Ok(())
    }

    pub fn phi_big_omega(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(phi_big_omega_trunc(&self.table, x))
    }

    pub fn phi_omega(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(phi_c_closed(x)? * phi_big_omega_trunc(&self.table, x))
    }
}

/// `Φ_ω(x) = Φ_C(x) Φ_Ω(x)` to within `error_target`.
pub fn phi_omega(x: f64, error_target: f64) -> Result<f64> {
    LimitEvaluator::new((x - 1.0).abs(), error_target)?.phi_omega(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    C,
    BigOmega,
    Omega,
    Generic,
}

/// Declarative description of one limiting function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitFunctionSpec {
    pub kind: LimitKind,
    /// Number of product terms: `l` for Φ_C, primes for Φ_Ω, probabilities for
    /// the generic case. Ignored for Φ_ω, whose truncation follows `error_target`.
    pub truncation: usize,
    pub probs: Option<Vec<f64>>,
    pub error_target: f64,
}

impl LimitFunctionSpec {
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if self.truncation == 0 {
            return Err(domain("truncation must be at least 1"));
        }
        if !(self.error_target > 0.0) {
            return Err(domain("error target must be positive"));
        }
        match self.kind {
            LimitKind::C => Ok(phi_c_trunc(self.truncation as u64, x)),
            LimitKind::BigOmega => {
                let mut limit = 16u64;
                let table = loop {
                    let t = primes::sieve(limit)?;
                    if t.count() >= self.truncation {
                        break t;
                    }
                    limit *= 2;
                };
                Ok(phi_big_omega_over(&table.primes()[..self.truncation], x))
            }
            LimitKind::Omega => phi_omega(x, self.error_target),
            LimitKind::Generic => {
                let probs = self
                    .probs
                    .as_deref()
                    .ok_or_else(|| domain("generic limit needs probabilities"))?;
                let m = self.truncation.min(probs.len());
                Ok(phi_generic(&probs[..m], x))
            }
        }
    }
}
