//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with a
//! failure status if any criterion fails.

use std::time::Instant;

use modpois::arithmetic::{
    dist_omega_uniform, erdos_kac_stat, omega_sieve, omega_trial, sathe_selberg_fit, FIT_GRID,
};
use modpois::dist::{total_variation, DiscreteDist};
use modpois::limiting::LimitEvaluator;
use modpois::model::{
    dist_omega_dprime, mod_poisson_ratio, Coupling, Empirical, IndexConvention, PenalisedModel,
    SampleMode, Sampler,
};
use modpois::arithmetic::local_limit_report;
use modpois::model::{dist_omega_tilted, omega_prime_with_normaliser};
use modpois::primes::{sieve, ModelParams, TiltConvention};
use modpois::verify::{gamma_identity_gap, product_bounds, max_conditioning_tv, max_oracle_tv, max_size_bias_tv, paintbox_cycle_tv};

struct Outcome {
    passed: bool,
    detail: String,
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>().join(", ")
}

fn tilted_poisson() -> Outcome {
    let mut worst = (0.0f64, 0.0, 0.0);
    let mut lines = Vec::new();
    for gamma in [0.5, 1.0, 5.0, 20.0] {
        for x in [0.25, 0.5, 2.0, 4.0] {
            let a = DiscreteDist::poisson_truncated(gamma, 1e-14).unwrap().tilt(x).unwrap();
            let b = DiscreteDist::poisson_truncated(x * gamma, 1e-14).unwrap();
            let tv = total_variation(&a, &b);
            if tv > 1e-10 {
                lines.push(format!("(γ={gamma}, x={x}): {tv:.3e}"));
            }
            if tv > worst.0 {
                worst = (tv, gamma, x);
            }
        }
    }
    Outcome {
        passed: worst.0 <= 1e-10,
        detail: format!(
            "max TV {:.3e} at γ={}, x={} (tol 1e-10); over tolerance: [{}]",
            worst.0,
            worst.1,
            worst.2,
            lines.join("; ")
        ),
    }
}

fn construction_oracle() -> Outcome {
    let (tv, label) = max_oracle_tv(IndexConvention::LemmaWeights, Coupling::IteratedSizeBias).unwrap();
    let (iid, iid_label) = max_oracle_tv(IndexConvention::LemmaWeights, Coupling::IidPaintbox).unwrap();
    let (paper, _) = max_oracle_tv(IndexConvention::PaperLiteral, Coupling::IteratedSizeBias).unwrap();
    Outcome {
        passed: tv <= 1e-12,
        detail: format!(
            "max TV {tv:.3e} ({label}, tol 1e-12); reported: i.i.d. index tuples {iid:.3e} ({iid_label}), paper-literal weights {paper:.3e}"
        ),
    }
}

fn conditioning() -> Outcome {
    let (tv, label) = max_conditioning_tv(IndexConvention::LemmaWeights, Coupling::IteratedSizeBias).unwrap();
    Outcome {
        passed: tv <= 1e-12,
        detail: format!("max TV {tv:.3e} ({label}, tol 1e-12)"),
    }
}

fn size_bias_coupling() -> Outcome {
    let (tv, label) = max_size_bias_tv().unwrap();
    Outcome {
        passed: tv <= 1e-12,
        detail: format!("max TV {tv:.3e} ({label}, tol 1e-12)"),
    }
}

fn paintbox_cycles() -> Outcome {
    let tvs: Vec<f64> = (2..=6).map(|n| paintbox_cycle_tv(n).unwrap()).collect();
    Outcome {
        passed: tvs.iter().all(|&t| t <= 1e-12),
        detail: format!("TV for N = 2..6: [{}] (tol 1e-12)", tvs.iter().map(|t| format!("{t:.3e}")).collect::<Vec<_>>().join(", ")),
    }
}

fn product_measurements() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for k in [100, 1000, 10_000] {
        let b = product_bounds(k).unwrap();
        passed &= b.sqrt_k_sup <= 3.0 && b.k_sup_unit <= 2.0 && b.max_slope <= std::f64::consts::E + 0.01;
        parts.push(format!(
            "k={k}: √k·sup {:.4}, k·sup[0,1] {:.4}, slope {:.4}",
            b.sqrt_k_sup, b.k_sup_unit, b.max_slope
        ));
    }
    Outcome {
        passed,
        detail: format!("{} (bounds 3, 2, e+0.01)", parts.join("; ")),
    }
}

fn gamma_identity() -> Outcome {
    let gap = gamma_identity_gap(1_000_000, 401).unwrap();
    Outcome {
        passed: gap <= 1e-2,
        detail: format!("max |φ_k - 1/Γ form| = {gap:.3e} at k = 10^6 (tol 1e-2)"),
    }
}

fn sampler_fidelity() -> Outcome {
    let table = sieve(10_000).unwrap();
    let params = ModelParams::from_table(&table).unwrap();
    let exact = dist_omega_dprime(&params, &table).unwrap();
    let model = PenalisedModel::new(&params, &table, IndexConvention::LemmaWeights).unwrap();
    let sampler = Sampler::new(&model, Coupling::IteratedSizeBias);
    let draws = 1_000_000;
    let emp = Empirical::from_counts(sampler.sample_counts(SampleMode::Pathwise, draws, 20_240_601));
    let tv = total_variation(&emp.dist().unwrap(), &exact);
    let mut passed = tv <= 4e-3;
    let mut parts = vec![format!("TV {tv:.3e} (tol 4e-3)")];
    for x in [0.5, 1.5, 2.0] {
        let (est, hw) = emp.pgf_estimate(x);
        let err = (est - exact.pgf(x)).abs();
        passed &= err <= hw;
        parts.push(format!("x={x}: |err| {err:.2e} vs 3σ {hw:.2e}"));
    }
    let cond = Empirical::from_counts(sampler.sample_counts(SampleMode::Conditioned, draws, 20_240_601));
    parts.push(format!("conditioned run identical: {}", cond == emp));

    let iid = Sampler::new(&model, Coupling::IidPaintbox);
    let iid_emp = Empirical::from_counts(iid.sample_counts(SampleMode::Pathwise, draws, 20_240_601));
    parts.push(format!(
        "reported: i.i.d. index tuples TV {:.3e}",
        total_variation(&iid_emp.dist().unwrap(), &exact)
    ));
    Outcome {
        passed,
        detail: parts.join("; "),
    }
}

fn mod_poisson_trend() -> Outcome {
    let limits = LimitEvaluator::standard();
    let table = sieve(1_000_000).unwrap();
    let xs = [0.5, 1.5, 2.0];
    let mut devs = vec![Vec::new(); xs.len()];
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let sub = table.truncated(n);
        let params = ModelParams::from_table(&sub).unwrap();
        let law = dist_omega_dprime(&params, &sub).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            let r = mod_poisson_ratio(law.pgf(x), params.gamma_n, x).unwrap();
            devs[i].push((r - limits.phi_omega(x).unwrap()).abs());
        }
    }
    let passed = devs.iter().all(|d| strictly_decreasing(d));
    let detail = xs
        .iter()
        .zip(&devs)
        .map(|(x, d)| format!("x={x}: [{}]{}", fmt_list(d), if strictly_decreasing(d) { "" } else { " not decreasing" }))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome {
        passed,
        detail: format!("|ratio - Φ_ω| for n = 10^3..10^6: {detail}"),
    }
}

fn arithmetic_ground_truth() -> Outcome {
    let small = omega_sieve(100_000).unwrap();
    let mismatches = (1..=100_000u64).filter(|&m| small.omega(m) != omega_trial(m)).count();

    let n = 1_000_000u64;
    let big = omega_sieve(n).unwrap();
    let expected: u64 = sieve(n).unwrap().primes().iter().map(|&p| n / p as u64).sum();
    let total = big.total();

    let ten = dist_omega_uniform(10).unwrap();
    let ten_ok = ten.pmf().len() == 3
        && ten.pmf().iter().zip([0.1, 0.7, 0.2]).all(|(a, b)| (a - b).abs() < 1e-15);
    Outcome {
        passed: mismatches == 0 && total == expected && ten_ok,
        detail: format!(
            "trial-division mismatches {mismatches}; Σω(m) = {total} vs Σ⌊n/p⌋ = {expected}; n = 10 pmf {:?}",
            ten.pmf()
        ),
    }
}

fn erdos_kac_trend() -> Outcome {
    let decades = [1_000u64, 10_000, 100_000, 1_000_000, 10_000_000];
    let table = sieve(*decades.last().unwrap()).unwrap();
    let limits = LimitEvaluator::standard();
    let omega = omega_sieve(*decades.last().unwrap()).unwrap();
    let mut ks = Vec::new();
    let xs = [0.5, 1.5, 2.0];
    let mut ss = vec![Vec::new(); xs.len()];
    for &n in &decades {
        let sub = table.truncated(n);
        let params = ModelParams::from_table(&sub).unwrap();
        let law = dist_omega_dprime(&params, &sub).unwrap();
        ks.push(erdos_kac_stat(&law, (n as f64).ln().ln()).unwrap());

        let uniform = hist(&omega, n);
        let fit = sathe_selberg_fit(&uniform, params.gamma_n, &FIT_GRID, &limits).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            ss[i].push(fit.deviation_at(x).unwrap());
        }
    }
    let passed = strictly_decreasing(&ks) && ss.iter().all(|d| strictly_decreasing(d));
    let ss_detail = xs
        .iter()
        .zip(&ss)
        .map(|(x, d)| format!("x={x}: [{}]", fmt_list(d)))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome {
        passed,
        detail: format!(
            "KS of Ω'' at n = 10^3..10^7: [{}]; fitted ω(U_n) deviation: {ss_detail}",
            fmt_list(&ks)
        ),
    }
}

/// Diagnostics printed after the criteria; never counted as failures.
fn reports() {
    let table = sieve(1_000_000).unwrap();
    let z: Vec<f64> = [1_000u64, 10_000, 100_000, 1_000_000]
        .iter()
        .map(|&n| {
            let sub = table.truncated(n);
            omega_prime_with_normaliser(&ModelParams::from_table(&sub).unwrap(), &sub).unwrap().1
        })
        .collect();
    println!("REPORT E[Φ_C(Ω_n/γ_n)] for n = 10^3..10^6: [{}]", fmt_list(&z));

    let sub = table.truncated(10_000);
    let gamma_den = ModelParams::from_table_with(&sub, TiltConvention::GammaDenominator).unwrap();
    let k_den = ModelParams::from_table_with(&sub, TiltConvention::KDenominator).unwrap();
    let tv = total_variation(
        &dist_omega_tilted(&gamma_den, &sub).unwrap(),
        &dist_omega_tilted(&k_den, &sub).unwrap(),
    );
    println!(
        "REPORT tilted sums at n = 10^4 with v = exp(-H_k/γ) = {:.5} and v = exp(-H_k/k) = {:.5}: TV {tv:.4e}",
        gamma_den.v_n, k_den.v_n
    );

    let params = ModelParams::from_table(&sub).unwrap();
    let model = PenalisedModel::new(&params, &sub, IndexConvention::LemmaWeights).unwrap();
    let counts = Sampler::new(&model, Coupling::IteratedSizeBias).block_count_counts(200_000, 5);
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / 200_000.0).collect();
    println!("REPORT distinct forced primes at n = 10^4 (k = {}), frequencies of 0, 1, ...: [{}]", params.k_n, fmt_list(&freq));

    let top = 100_000_000u64;
    let omega = omega_sieve(top).unwrap();
    let primes = sieve(top).unwrap();
    let limits = LimitEvaluator::standard();
    let mut means = Vec::new();
    for n in [1_000u64, 10_000, 100_000, 1_000_000, 10_000_000, 100_000_000] {
        let law = hist(&omega, n);
        means.push(law.mean() - (n as f64).ln().ln());
        if n == top {
            let rows = local_limit_report(&law, n).unwrap();
            let worst = rows
                .iter()
                .filter(|r| r.k >= 1)
                .map(|r| (r.poisson_corrected / r.exact - 1.0).abs())
                .fold(0.0, f64::max);
            println!("REPORT local limit at n = 10^8: max relative error of P(P_L = k)Φ_ω(k/L) over k = 1..{}: {worst:.4}", rows.len() - 1);
            let g = primes.prime_harmonic_upto(n);
            let fit = sathe_selberg_fit(&law, g, &FIT_GRID, &limits).unwrap();
            println!("REPORT fitted exponential constant c at n = 10^8: {:.5}", fit.c);
            let ek = erdos_kac_stat(&law, (n as f64).ln().ln()).unwrap();
            println!("REPORT KS of ω(U_n) at n = 10^8: {ek:.5}");
        }
    }
    println!("REPORT E[ω(U_n)] - log log n for n = 10^3..10^8: [{}] (Mertens constant 0.26150)", fmt_list(&means));
}

fn hist(omega: &modpois::arithmetic::OmegaTable, n: u64) -> DiscreteDist {
    let counts = omega.values()[1..=n as usize].iter().fold(vec![0.0; 16], |mut c, &w| {
        c[w as usize] += 1.0;
        c
    });
    DiscreteDist::from_weights(counts).unwrap()
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("tilted truncated Poisson is Poisson", tilted_poisson),
        ("pathwise construction equals identity law", construction_oracle),
        ("conditioning description equals identity law", conditioning),
        ("size-bias coupling", size_bias_coupling),
        ("distinct uniform indices follow cycle counts", paintbox_cycles),
        ("truncated product bounds", product_measurements),
        ("truncated product tends to 1/Γ form", gamma_identity),
        ("sampler fidelity at n = 10^4", sampler_fidelity),
        ("Ω'' ratio approaches Φ_ω", mod_poisson_trend),
        ("ω sieve ground truth", arithmetic_ground_truth),
        ("Erdős–Kac and Sathé–Selberg trends", erdos_kac_trend),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} {name} [{secs:.1}s]: {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail
        );
        failed += usize::from(!outcome.passed);
    }
    reports();
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
