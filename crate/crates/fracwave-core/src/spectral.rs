//! Semi-analytic reference solutions by eigenfunction expansion.
//!
//! On (0,1) the Dirichlet Laplacian has eigenpairs
//! lambda_n = (n pi)^2, phi_n = sqrt(2) sin(n pi x). For zero initial
//! data and a separable power source f = scale t^{mu_t} x^{mu_x}, every
//! mode solves the scalar problem D^alpha y + lambda y = t^{mu_t} with
//! zero history, whose closed form is
//!
//!   y(t) = Gamma(mu+1) t^{alpha+mu} E_{alpha, alpha+mu+1}(-lambda t^alpha)
//!
//! (verified term by term: the series integrates the source power by
//! power and telescopes against lambda y). The truncated series is
//! sampled on a grid and cross-validates the fine-grid solver.

use crate::error::{Error, Result};
use crate::field::SolutionField;
use crate::fracops::{gamma, mittag_leffler, MittagLefflerParams};
use crate::mesh::{InitialDatum, SpatialMesh, TemporalGrid};
use crate::quad;
use crate::scheme::{ProblemSpec, SourceTerm};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Fourier-sine coefficients v_n = sqrt(2) int_0^1 x^mu sin(n pi x) dx.
///
/// Small n by singularity-split adaptive quadrature; large n by the
/// endpoint asymptotics of the oscillatory integral (the x = 0 endpoint
/// contributes Gamma(mu+1) sin(pi(mu+1)/2) / c^{mu+1}, the x = 1
/// endpoint an integration-by-parts series in 1/c).
pub fn sine_coefficients(mu_x: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(mu_x > -1.0) {
        return Err(Error::domain(format!(
            "sine coefficients need mu > -1, got {mu_x}"
        )));
    }
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let gam = gamma(mu_x + 1.0)?;
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let c = n as f64 * PI;
            if n <= 32 {
                Ok(sine_coefficient_quadrature(mu_x, n))
            } else {
                Ok(sine_coefficient_asymptotic(mu_x, c, gam))
            }
        })
        .collect()
}

fn sine_coefficient_quadrature(mu: f64, n: usize) -> f64 {
    let c = n as f64 * PI;
    let split = (1.0 / c).min(0.5);
    let f = |x: f64| x.powf(mu) * (c * x).sin();
    let head = if mu < 0.0 {
        quad::integrate_power_singularity(&f, 0.0, split, -mu, 1e-14, 1e-13)
    } else {
        quad::adaptive_gk(&f, 0.0, split, 1e-14, 1e-13)
    };
    let tail = quad::adaptive_gk(&f, split, 1.0, 1e-14, 1e-13);
    2.0f64.sqrt() * (head + tail)
}

fn sine_coefficient_asymptotic(mu: f64, c: f64, gam: f64) -> f64 {
    // int_0^1 x^mu e^{icx} dx = Gamma(mu+1) e^{i pi (mu+1)/2} / c^{mu+1}
    //                           - int_1^infty (regularized),
    // the latter by parts: T(nu) = -e^{ic}/(ic) - (nu/(ic)) T(nu-1)
    let origin = gam / c.powf(mu + 1.0) * (0.5 * PI * (mu + 1.0)).sin();
    let eic = Complex::new(c.cos(), c.sin());
    let ic_inv = Complex::new(0.0, -1.0 / c); // 1/(ic)
    let mut tail = Complex::new(0.0, 0.0);
    let mut coeff = Complex::new(1.0, 0.0);
    let mut nu = mu;
    for _ in 0..24 {
        let term = -eic * ic_inv * coeff;
        tail += term;
        coeff = coeff * ic_inv * (-nu);
        if coeff.norm() < 1e-17 {
            break;
        }
        nu -= 1.0;
    }
    2.0f64.sqrt() * (origin - tail.im)
}

/// Closed-form mode response of D^alpha y + lambda y = t^{mu}, zero
/// history: y(t) = Gamma(mu+1) t^{alpha+mu} E_{alpha,alpha+mu+1}(-lambda t^alpha).
pub fn mode_response(alpha: f64, lambda: f64, mu_t: f64, t: f64) -> Result<f64> {
    if !(mu_t > -1.0) {
        return Err(Error::domain(format!(
            "time exponent must exceed -1, got {mu_t}"
        )));
    }
    if !(lambda >= 0.0) {
        return Err(Error::domain(format!(
            "eigenvalue must be nonnegative, got {lambda}"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let p = MittagLefflerParams::new(alpha, alpha + mu_t + 1.0)?;
    let e = mittag_leffler(&p, -lambda * t.powf(alpha))?;
    Ok(gamma(mu_t + 1.0)? * t.powf(alpha + mu_t) * e)
}

/// A truncated eigenfunction-expansion solution.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    pub alpha: f64,
    pub mu_t: f64,
    /// Source sine coefficients, scale included.
    pub coefficients: Vec<f64>,
    pub modes_used: usize,
    /// Conservative estimate of the H1 norm left in the tail.
    pub tail_estimate: f64,
    pub field: SolutionField,
}

/// Strict variant: errors when the tail estimate misses `tol`.
pub fn reference_solution(
    p: &ProblemSpec,
    time: TemporalGrid,
    space: SpatialMesh,
    n_modes: usize,
    tol: f64,
) -> Result<SpectralSolution> {
    let sol = reference_solution_unchecked(p, time, space, n_modes)?;
    if sol.tail_estimate > tol {
        return Err(Error::Truncation {
            requested: tol,
            achieved: sol.tail_estimate,
            modes: sol.modes_used,
        });
    }
    Ok(sol)
}

/// Truncated spectral reference with its tail estimate, regardless of
/// any tolerance. Requires zero initial data and a separable power
/// source.
pub fn reference_solution_unchecked(
    p: &ProblemSpec,
    time: TemporalGrid,
    space: SpatialMesh,
    n_modes: usize,
) -> Result<SpectralSolution> {
    if p.u0() != &InitialDatum::Zero || p.u1() != &InitialDatum::Zero {
        return Err(Error::config(
            "the spectral reference covers zero initial data only".to_string(),
        ));
    }
    let (mu_t, mu_x, scale) = match p.source() {
        SourceTerm::SeparablePower { mu_t, mu_x, scale } => (*mu_t, *mu_x, *scale),
        _ => {
            return Err(Error::config(
                "the spectral reference needs a separable power source".to_string(),
            ))
        }
    };
    if n_modes == 0 {
        return Err(Error::config("at least one mode is required".to_string()));
    }
    let mut coefficients = sine_coefficients(mu_x, n_modes)?;
    for c in &mut coefficients {
        *c *= scale;
    }
    let sol = solution_from_modes(p.alpha(), mu_t, coefficients, time, space)?;
    let tail = tail_estimate_h1(p.alpha(), mu_t, mu_x, scale, n_modes, time.horizon())?;
    Ok(SpectralSolution {
        tail_estimate: tail,
        ..sol
    })
}

/// Assemble the nodal samples of sum_n c_n y_n(t_j) sqrt(2) sin(n pi x_k)
/// for given mode coefficients. Split out so tests can inject a single
/// mode directly.
pub(crate) fn solution_from_modes(
    alpha: f64,
    mu_t: f64,
    coefficients: Vec<f64>,
    time: TemporalGrid,
    space: SpatialMesh,
) -> Result<SpectralSolution> {
    let j = time.steps();
    let n = space.interior();
    let n_modes = coefficients.len();
    // responses per mode and time node, modes in parallel
    let responses: Vec<Vec<f64>> = (1..=n_modes)
        .into_par_iter()
        .map(|mode| {
            let lambda = (mode as f64 * PI).powi(2);
            (0..=j)
                .map(|row| mode_response(alpha, lambda, mu_t, time.node(row)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    // fold modes above the grid Nyquist back into the N bins
    let period = 2 * (n + 1);
    let mut field = SolutionField::zeros(time, space);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(period);
    let rows: Vec<Vec<f64>> = (0..=j)
        .into_par_iter()
        .map(|row| {
            let mut bins = vec![0.0f64; n + 1];
            for (idx, c) in coefficients.iter().enumerate() {
                let mode = idx + 1;
                let weight = c * responses[idx][row] * 2.0f64.sqrt();
                let m = mode % period;
                if m == 0 || m == n + 1 {
                    continue;
                }
                if m <= n {
                    bins[m] += weight;
                } else {
                    bins[period - m] -= weight;
                }
            }
            // DST-I via the odd extension and one complex FFT
            let mut ext = vec![Complex::new(0.0, 0.0); period];
            for m in 1..=n {
                ext[m] = Complex::new(bins[m], 0.0);
                ext[period - m] = Complex::new(-bins[m], 0.0);
            }
            fft.process(&mut ext);
            (1..=n).map(|k| -0.5 * ext[k].im).collect()
        })
        .collect();
    for (row, vals) in rows.into_iter().enumerate() {
        field.row_mut(row).copy_from_slice(&vals);
    }
    Ok(SpectralSolution {
        alpha,
        mu_t,
        coefficients,
        modes_used: n_modes,
        tail_estimate: f64::NAN,
        field,
    })
}

/// Conservative H1-norm bound on the discarded modes: fitted coefficient
/// decay |v_n| <= C n^{-(mu_x+1)}, the growth envelope of the
/// Mittag-Leffler factor fitted on the first modes, and a factor 10.
fn tail_estimate_h1(
    alpha: f64,
    mu_t: f64,
    mu_x: f64,
    scale: f64,
    n_modes: usize,
    horizon: f64,
) -> Result<f64> {
    // C_v from the exact endpoint asymptotics of the coefficients
    let c_v = scale.abs() * 2.0f64.sqrt() * gamma(mu_x + 1.0)?
        * (0.5 * PI * (mu_x + 1.0)).sin().abs().max(0.3)
        / PI.powf(mu_x + 1.0)
        + 1e-300;
    // C_ml: sup (1+s)|E(-s)| sampled on the first modes
    let p = MittagLefflerParams::new(alpha, alpha + mu_t + 1.0)?;
    let mut c_ml = 0.0f64;
    for mode in 1..=5usize {
        let lambda = (mode as f64 * PI).powi(2);
        for k in 1..=16 {
            let t = horizon * k as f64 / 16.0;
            let s = lambda * t.powf(alpha);
            c_ml = c_ml.max((1.0 + s) * mittag_leffler(&p, -s)?.abs());
        }
    }
    let c_y = gamma(mu_t + 1.0)? * c_ml * horizon.powf(mu_t).max(1.0);
    let r = (1.0 + mu_t / alpha).min(1.0);
    // per-mode H1 magnitude: (n pi) * C_v n^{-(mu_x+1)} * C_y (n pi)^{-2r}
    let decay = 2.0 * (mu_x + 1.0) + 4.0 * r - 2.0;
    if decay <= 1.0 {
        return Ok(f64::INFINITY);
    }
    let amp = c_v * c_y * PI.powf(1.0 - 2.0 * r);
    // sum_{n > N} n^{-decay} <= N^{1-decay}/(decay-1)
    let tail2 = amp * amp * (n_modes as f64).powf(1.0 - decay) / (decay - 1.0);
    Ok(10.0 * tail2.sqrt())
}
