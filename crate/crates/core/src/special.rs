//! Complex Gamma function (Lanczos, g = 7, nine coefficients) and the Gauss
//! hypergeometric series.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
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

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Distance below which an argument is treated as sitting exactly on a pole.
pub const POLE_TOL: f64 = 1e-12;

/// If `z` is (numerically) a pole of Γ, returns `n` with `z = -n`.
pub fn gamma_pole(z: Complex64) -> Option<u64> {
    if z.im.abs() > POLE_TOL || z.re > 0.5 {
        return None;
    }
    let n = (-z.re).round();
    if (z.re + n).abs() < POLE_TOL {
        Some(n as u64)
    } else {
        None
    }
}

fn lanczos_sum(z: Complex64) -> Complex64 {
    // z already shifted by -1
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    x
}

/// Γ(z) for complex `z`. Returns a non-finite value at the poles.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (PI * z).sin();
        PI / (s * gamma(1.0 - z))
    } else {
        let z = z - 1.0;
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * lanczos_sum(z)
    }
}

/// 1/Γ(z), an entire function; exactly zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Complex64 {
    if gamma_pole(z).is_some() {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        (PI * z).sin() * gamma(1.0 - z) / PI
    } else {
        1.0 / gamma(z)
    }
}

/// log of sin(πz), stable for large |Im z| (branch is irrelevant, callers exponentiate).
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im >= 0.0 {
        // sin(πz) = (i/2) e^{-iπz} (1 - e^{2iπz})
        -i * PI * z + (1.0 - (2.0 * i * PI * z).exp()).ln() + Complex64::new(0.5f64.ln(), PI / 2.0)
    } else {
        ln_sin_pi(z.conj()).conj()
    }
}

/// A branch of log Γ(z); `exp(ln_gamma(z)) == gamma(z)` without overflow.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(1.0 - z)
    } else {
        let z = z - 1.0;
        let t = z + LANCZOS_G + 0.5;
        LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
    }
}

/// Residue of Γ at `-n`: (-1)^n / n!.
pub(crate) fn gamma_residue(n: u64) -> f64 {
    let mut r = 1.0;
    for k in 1..=n {
        r /= -(k as f64);
    }
    r
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) by its power series, |z| < 1.
pub fn hyp2f1(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    hyp2f1_terms(a, b, c, z).map(|(v, _)| v)
}

/// ₂F₁ together with the cancellation ratio `max|term| / |sum|`, which bounds
/// the relative rounding error by roughly `ratio · 1e-16`.
pub(crate) fn hyp2f1_terms(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<(Complex64, f64)> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("2F1 series needs |z| < 1, got {}", z.norm())));
    }
    if gamma_pole(c).is_some() {
        return Err(Error::InvalidInput("2F1 lower parameter is a pole".into()));
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut biggest = 1.0f64;
    let mut quiet = 0;
    for n in 0..20_000u32 {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        biggest = biggest.max(term.norm());
        if term.norm() <= 1e-17 * sum.norm().max(1e-300) {
            quiet += 1;
            if quiet >= 3 {
                return Ok((sum, biggest / sum.norm()));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::TruncationNotConverged { cap: 20_000, last_shell: term.norm() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_known_values() {
        assert!((gamma(c(0.5, 0.0)).re - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(c(5.0, 0.0)).re - 24.0).abs() < 1e-12);
        // Γ(1+i)
        let g = gamma(c(1.0, 1.0));
        assert!((g - c(0.498_015_668_118_356_04, -0.154_949_828_301_810_69)).norm() < 1e-14);
        // Γ(-1/2) = -2√π
        assert!((gamma(c(-0.5, 0.0)).re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for z in [c(0.3, 0.2), c(4.2, -3.0), c(-2.7, 1.1), c(0.5, 40.0), c(1.5, -25.0)] {
            let a = ln_gamma(z).exp();
            let b = gamma(z);
            assert!((a - b).norm() <= 1e-12 * b.norm(), "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn ln_gamma_far_up_the_imaginary_axis() {
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        let y = 300.0;
        let lg = ln_gamma(c(0.5, y));
        let expected = 0.5 * (PI.ln() - (PI * y - 2f64.ln()));
        assert!((lg.re - expected).abs() < 1e-10);
    }

    #[test]
    fn rgamma_vanishes_at_poles() {
        for n in 0..5 {
            assert_eq!(rgamma(c(-(n as f64), 0.0)), c(0.0, 0.0));
            assert_eq!(gamma_pole(c(-(n as f64), 0.0)), Some(n));
        }
        assert!(gamma_pole(c(0.0, 1e-3)).is_none());
        assert!((rgamma(c(3.0, 0.0)).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn residues() {
        assert_eq!(gamma_residue(0), 1.0);
        assert_eq!(gamma_residue(3), -1.0 / 6.0);
        // numerical check of the residue at -2
        let eps = 1e-7;
        let r = gamma(c(-2.0 + eps, 0.0)).re * eps;
        assert!((r - gamma_residue(2)).abs() < 1e-6);
    }

    #[test]
    fn hyp2f1_elementary() {
        // 2F1(1,1;2;z) = -ln(1-z)/z
        let z = c(0.3, 0.2);
        let v = hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), z).unwrap();
        let expected = -(1.0 - z).ln() / z;
        assert!((v - expected).norm() < 1e-14);
        // 2F1((1+a)/2,(1-a)/2;3/2;-sinh²t) = sinh(at)/(a sinh t)
        let (a, t) = (c(0.7, 0.4), 0.5f64);
        let z = c(-t.sinh().powi(2), 0.0);
        let v = hyp2f1((1.0 + a) / 2.0, (1.0 - a) / 2.0, c(1.5, 0.0), z).unwrap();
        let expected = (a * t).sinh() / (a * t.sinh());
        assert!((v - expected).norm() < 1e-14);
        assert!(hyp2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(1.2, 0.0)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn recurrence(re in -6.0f64..6.0, im in -6.0f64..6.0) {
                let z = c(re, im);
                prop_assume!(gamma_pole(z).is_none() && (z + 1.0).norm() > 1e-3 && z.norm() > 1e-3);
                let lhs = gamma(z + 1.0);
                let rhs = z * gamma(z);
                prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1e-300));
            }

            #[test]
            fn duplication(re in 0.05f64..6.0, im in -8.0f64..8.0) {
                // Γ(z)Γ(z+1/2) = 2^{1-2z} √π Γ(2z)
                let z = c(re, im);
                let lhs = gamma(z) * gamma(z + 0.5);
                let rhs = (2f64.ln() * (1.0 - 2.0 * z)).exp() * PI.sqrt() * gamma(2.0 * z);
                prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
            }

            #[test]
            fn reflection_with_rgamma(re in -5.0f64..5.0, im in -3.0f64..3.0) {
                let z = c(re, im);
                prop_assume!(gamma_pole(z).is_none() && gamma_pole(1.0 - z).is_none());
                let lhs = gamma(z) * gamma(1.0 - z);
                let rhs = PI / (PI * z).sin();
                prop_assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm());
                prop_assert!((rgamma(z) * gamma(z) - 1.0).norm() < 1e-12);
            }
        }
    }
}
