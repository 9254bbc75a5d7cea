//! Gamma function and friends via the Lanczos approximation.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Lanczos coefficients, g = 7, n = 9.
const LANCZOS: [f64; 9] = [
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

const LANCZOS_G: f64 = 7.0;

/// Gamma(x) for positive arguments, accurate to roughly 1e-14 relative.
///
/// Rejects `x <= 0`; use [`gamma_signed`] or [`rgamma`] where the
/// reflection to the negative axis is wanted.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("gamma requires x > 0, got {x}")));
    }
    Ok(gamma_signed(x))
}

/// Gamma on the whole real axis except the poles at 0, -1, -2, ...
/// where it returns +/- infinity.
pub fn gamma_signed(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let s = (PI * x).sin();
        if s == 0.0 {
            return f64::INFINITY;
        }
        PI / (s * gamma_signed(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
    }
}

/// ln Gamma(x) for x > 0.
pub fn lgamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // ln Gamma(x) = ln pi - ln sin(pi x) - ln Gamma(1 - x)
        return PI.ln() - (PI * x).sin().ln() - lgamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// 1 / Gamma(x), entire: returns 0 at the poles of Gamma.
pub fn rgamma(x: f64) -> f64 {
    if x > 0.5 {
        1.0 / gamma_signed(x)
    } else {
        // 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
        let s = (PI * x).sin();
        if s == 0.0 {
            return 0.0;
        }
        let g = gamma_signed(1.0 - x);
        if g.is_infinite() {
            0.0
        } else {
            s * g / PI
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_goldens() {
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-14);
        // Gamma(3/2) = sqrt(pi)/2
        assert!((gamma(1.5).unwrap() - 0.886_226_925_452_758_0).abs() < 1e-13);
        assert!((gamma(5.0).unwrap() - 24.0).abs() / 24.0 < 1e-13);
        assert!((gamma(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn gamma_recurrence() {
        for &x in &[0.1, 0.51, 1.3, 2.7, 10.2, 42.5, 120.0] {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!((lhs - rhs).abs() / rhs.abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn gamma_domain() {
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.3).is_err());
        assert!(gamma(f64::NAN).is_err());
    }

    #[test]
    fn rgamma_poles_and_values() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        assert!((rgamma(2.5) - 1.0 / gamma(2.5).unwrap()).abs() < 1e-15);
        // Gamma(-0.5) = -2 sqrt(pi)
        assert!((rgamma(-0.5) - 1.0 / (-2.0 * PI.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn lgamma_matches_gamma() {
        for &x in &[0.2, 0.9, 1.5, 8.0, 60.0, 140.0] {
            let a = lgamma(x);
            let b = gamma(x).unwrap().ln();
            assert!((a - b).abs() < 1e-11 * (1.0 + b.abs()), "x={x}");
        }
    }
}
