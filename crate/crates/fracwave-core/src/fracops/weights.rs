//! The monomial rule of the Riemann-Liouville integral and the exact
//! convolution weights of the discrete fractional derivative on a
//! uniform grid.

use super::gamma::gamma;
use crate::error::{Error, Result};

/// Fractional integral of a monomial:
/// D_{0+}^{-gamma} t^mu = Gamma(mu+1)/Gamma(mu+1+gamma) t^{mu+gamma}.
///
/// `gamma_ord = 0` returns t^mu (the identity operator).
pub fn frac_integral_monomial(gamma_ord: f64, mu: f64, t: f64) -> Result<f64> {
    if !(mu > -1.0) {
        return Err(Error::domain(format!(
            "monomial exponent must exceed -1 for integrability, got {mu}"
        )));
    }
    if !(gamma_ord >= 0.0) {
        return Err(Error::domain(format!(
            "integral order must be nonnegative, got {gamma_ord}"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(if mu + gamma_ord == 0.0 { 1.0 } else { 0.0 });
    }
    let ratio = gamma(mu + 1.0)? / gamma(mu + 1.0 + gamma_ord)?;
    Ok(ratio * t.powf(mu + gamma_ord))
}

/// Convolution weights kappa_m of the discrete fractional derivative:
/// the integral of D_{0+}^{nu} chi_{I_j} over the cell m steps later,
///
///   kappa_m = tau^{1-nu}/Gamma(2-nu) [ (m+1)^{1-nu} - 2 m^{1-nu}
///                                      + (m-1)_+^{1-nu} ].
///
/// On a uniform grid the value depends only on the cell offset m.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    nu: f64,
    tau: f64,
    kappa: Vec<f64>,
}

impl KernelWeights {
    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    /// Differences kappa_m - kappa_{m-1} for m = 1..len-1, the scalar
    /// kernel of the block-Toeplitz form of the scheme.
    pub fn differences(&self) -> Vec<f64> {
        self.kappa
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect()
    }
}

/// Offset beyond which the three-point difference of m^{1-nu} is
/// evaluated through its binomial series; the direct form loses about
/// m^2 eps of relative accuracy to cancellation.
const SERIES_SWITCH: u64 = 8;

/// Build the first `j_steps` weights for order `nu` in (0,1) and step `tau`.
pub fn rl_cell_average_weights(nu: f64, tau: f64, j_steps: usize) -> Result<KernelWeights> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::domain(format!(
            "fractional order must lie in (0,1), got {nu}"
        )));
    }
    if !(tau > 0.0) {
        return Err(Error::domain(format!("time step must be positive, got {tau}")));
    }
    if j_steps == 0 {
        return Err(Error::domain("at least one weight is required".to_string()));
    }
    let p = 1.0 - nu;
    let prefactor = tau.powf(p) / gamma(2.0 - nu)?;
    let mut kappa = Vec::with_capacity(j_steps);
    for m in 0..j_steps as u64 {
        kappa.push(prefactor * second_difference_pow(m, p));
    }
    Ok(KernelWeights { nu, tau, kappa })
}

/// (m+1)^p - 2 m^p + (m-1)_+^p, stably for every m. Shared with the
/// spatial load assembly, which differences x^{mu+2} the same way.
pub(crate) fn second_difference_pow(m: u64, p: f64) -> f64 {
    match m {
        0 => 1.0,
        1 => 2f64.powf(p) - 2.0,
        m if m < SERIES_SWITCH => {
            let mf = m as f64;
            (mf + 1.0).powf(p) - 2.0 * mf.powf(p) + (mf - 1.0).powf(p)
        }
        m => {
            // m^p [ (1+d)^p - 2 + (1-d)^p ], d = 1/m, even binomial terms
            let mf = m as f64;
            let d2 = 1.0 / (mf * mf);
            let mut coeff = 0.5 * p * (p - 1.0); // C(p, 2)
            let mut dpow = d2;
            let mut sum = 0.0;
            for k in 1..=60u32 {
                let term = coeff * dpow;
                sum += term;
                if term.abs() <= 1e-22 * sum.abs() {
                    break;
                }
                let two_k = 2.0 * k as f64;
                coeff *= (p - two_k) * (p - two_k - 1.0) / ((two_k + 1.0) * (two_k + 2.0));
                dpow *= d2;
            }
            2.0 * mf.powf(p) * sum
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    #[test]
    fn monomial_goldens() {
        assert!((frac_integral_monomial(1.0, 0.0, 2.0).unwrap() - 2.0).abs() < 1e-14);
        // D^{-1/2} 1 at t=1: 2/sqrt(pi)
        assert!(
            (frac_integral_monomial(0.5, 0.0, 1.0).unwrap() - 1.128_379_167_095_512_6).abs()
                < 1e-12
        );
        // gamma = 0 is the identity
        assert!((frac_integral_monomial(0.0, 0.3, 2.0).unwrap() - 2.0f64.powf(0.3)).abs() < 1e-14);
    }

    #[test]
    fn monomial_vs_convolution_quadrature() {
        // D^{-g} t^mu (t0) = 1/Gamma(g) int_0^t0 (t0-s)^{g-1} s^mu ds
        let cases = [(0.7, 0.3, 1.0), (0.5, -0.49, 0.8), (1.3, 0.0, 2.0), (0.2, 1.7, 1.5)];
        for &(g, mu, t0) in &cases {
            let closed = frac_integral_monomial(g, mu, t0).unwrap();
            let gam = crate::fracops::gamma(g).unwrap();
            // singular at both ends when g<1 and mu<0: split at midpoint
            let f_left = |s: f64| (t0 - s).powf(g - 1.0) * s.powf(mu);
            let left = quad::integrate_power_singularity(&f_left, 0.0, t0 / 2.0, -mu, 1e-13, 1e-12);
            let f_right = |u: f64| u.powf(g - 1.0) * (t0 - u).powf(mu);
            let right =
                quad::integrate_power_singularity(&f_right, 0.0, t0 / 2.0, 1.0 - g, 1e-13, 1e-12);
            let oracle = (left + right) / gam;
            assert!(
                (closed - oracle).abs() <= 1e-10 * closed.abs(),
                "g={g} mu={mu}: closed={closed} oracle={oracle}"
            );
        }
    }

    #[test]
    fn monomial_domain_errors() {
        assert!(frac_integral_monomial(0.5, -1.0, 1.0).is_err());
        assert!(frac_integral_monomial(0.5, -1.3, 1.0).is_err());
        assert!(frac_integral_monomial(-0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn semigroup_on_monomials() {
        // D^{-g} D^{-b} t^mu = D^{-(g+b)} t^mu
        for &g in &[0.3, 0.5, 1.1] {
            for &b in &[0.25, 0.75, 2.0] {
                for &mu in &[-0.49, 0.0, 0.51, 2.0] {
                    for &t in &[0.3, 1.0, 2.5] {
                        // inner integral produces c t^{mu+b} with
                        // c = Gamma(mu+1)/Gamma(mu+1+b)
                        let c = crate::fracops::gamma(mu + 1.0).unwrap()
                            / crate::fracops::gamma(mu + 1.0 + b).unwrap();
                        let composed =
                            c * frac_integral_monomial(g, mu + b, t).unwrap();
                        let direct = frac_integral_monomial(g + b, mu, t).unwrap();
                        assert!(
                            (composed - direct).abs() <= 1e-12 * direct.abs(),
                            "g={g} b={b} mu={mu} t={t}"
                        );
                    }
                }
            }
        }
    }

    /// Quadrature oracle for kappa_m: evaluates the fractional integral
    /// of the cell indicator at the two cell ends by direct quadrature
    /// of (t-s)^{-nu}, then differences. Independent of the closed form.
    fn kappa_oracle(nu: f64, tau: f64, m: u64) -> f64 {
        let gam = crate::fracops::gamma(1.0 - nu).unwrap();
        // (D^{-(1-nu)} chi_{(0,tau)})(t) = 1/Gamma(1-nu) int (t-s)^{-nu} ds over (0,tau)∩(0,t)
        let frac_int = |t: f64| -> f64 {
            if t <= 0.0 {
                return 0.0;
            }
            let upper = t.min(tau);
            let f = |s: f64| (t - s).powf(-nu);
            // singular at s = t only when t <= tau
            if t <= tau + 1e-12 {
                let g = |u: f64| u.powf(-nu); // u = t - s
                quad::integrate_power_singularity(&g, 0.0, t - 0.0_f64.max(t - upper), nu, 1e-14, 1e-13)
                    / gam
            } else {
                quad::adaptive_gk(&f, 0.0, upper, 1e-14, 1e-13) / gam
            }
        };
        let (a, b) = (m as f64 * tau, (m + 1) as f64 * tau);
        frac_int(b) - frac_int(a)
    }

    #[test]
    fn weights_match_quadrature_oracle() {
        for &(nu, tau) in &[(0.5, 1.0), (0.25, 0.125), (0.74, 0.01)] {
            let w = rl_cell_average_weights(nu, tau, 6000).unwrap();
            for &m in &[0u64, 1, 2, 5, 7, 8, 9, 40, 341, 5000] {
                let oracle = kappa_oracle(nu, tau, m);
                let got = w.kappa()[m as usize];
                assert!(
                    (got - oracle).abs() <= 1e-10 * got.abs().max(1e-14),
                    "nu={nu} tau={tau} m={m}: got={got} oracle={oracle}"
                );
            }
        }
    }

    #[test]
    fn weights_frozen_goldens() {
        let w = rl_cell_average_weights(0.5, 1.0, 4).unwrap();
        // kappa_0 = 1/Gamma(1.5)
        assert!((w.kappa()[0] - 1.128_379_167_095_512_6).abs() < 1e-12);
        // kappa_1 = (sqrt 2 - 2)/Gamma(1.5)
        assert!((w.kappa()[1] - (-0.660_990_252_972_385_5)).abs() < 1e-12);
    }

    #[test]
    fn weights_signs_and_telescoping() {
        for &nu in &[0.125, 0.25, 0.5, 0.75, 0.9] {
            for &tau in &[1.0, 0.001] {
                let j = 2000;
                let w = rl_cell_average_weights(nu, tau, j).unwrap();
                let pref = tau.powf(1.0 - nu) / crate::fracops::gamma(2.0 - nu).unwrap();
                assert!(w.kappa()[0] > 0.0);
                let mut partial = 0.0;
                let mut prev_partial = f64::INFINITY;
                for (m, &k) in w.kappa().iter().enumerate() {
                    if m >= 1 {
                        assert!(k < 0.0, "kappa_{m} not negative for nu={nu}");
                    }
                    partial += k;
                    let mf = (m + 1) as f64;
                    let expected = pref * (mf.powf(1.0 - nu) - (mf - 1.0).powf(1.0 - nu));
                    assert!(
                        (partial - expected).abs() <= 1e-12 * expected.abs(),
                        "telescoping failed at m={m}, nu={nu}, tau={tau}"
                    );
                    assert!(partial > 0.0 && partial < prev_partial + 1e-18);
                    prev_partial = partial;
                }
            }
        }
    }

    #[test]
    fn weights_domain_errors() {
        assert!(rl_cell_average_weights(0.0, 1.0, 4).is_err());
        assert!(rl_cell_average_weights(1.0, 1.0, 4).is_err());
        assert!(rl_cell_average_weights(0.5, 0.0, 4).is_err());
        assert!(rl_cell_average_weights(0.5, 1.0, 0).is_err());
    }

    #[test]
    fn series_and_direct_forms_agree_at_switch() {
        // the two evaluation branches must agree where they meet
        for &p in &[0.1, 0.5, 0.875] {
            for m in 2..32u64 {
                let direct = {
                    let mf = m as f64;
                    (mf + 1.0).powf(p) - 2.0 * mf.powf(p) + (mf - 1.0).powf(p)
                };
                let series = super::second_difference_pow(m, p);
                assert!(
                    (direct - series).abs() <= 1e-10 * direct.abs(),
                    "p={p} m={m} direct={direct} series={series}"
                );
            }
        }
    }
}
