//! Gamma function via the Lanczos approximation (g = 7, 9 terms), accurate to
//! about 15 significant digits on the positive axis.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln |Γ(x)|`, using reflection below one half.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x)Γ(1-x) = π / sin(πx)
        (PI / (PI * x).sin().abs()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS_COEFFS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
}

pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        ln_gamma(x).exp()
    }
}

/// `1/Γ(x)`, which is entire: zero at `0, -1, -2, ...`.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    1.0 / gamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_values() {
        let mut fact = 1.0;
        for n in 1..20 {
            assert!((gamma(n as f64) / fact - 1.0).abs() < 1e-13, "n = {n}");
            fact *= n as f64;
        }
    }

    #[test]
    fn half_integer() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(1.5) - 0.5 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn agrees_with_statrs() {
        for i in 1..=500 {
            let x = i as f64 * 0.1;
            let ours = ln_gamma(x);
            let theirs = statrs::function::gamma::ln_gamma(x);
            assert!((ours - theirs).abs() <= 1e-12 * theirs.abs().max(1.0), "x = {x}");
        }
    }

    #[test]
    fn recip_at_poles() {
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-3.0), 0.0);
        assert!((recip_gamma(1e-9) - 1e-9).abs() < 1e-17);
    }
}
