//! Error functionals of the convergence studies.
//!
//! E1 is the node-max of the H1-seminorm distance to a reference on a
//! nested finer grid. E2 is the L2(L2) norm of the fractional
//! derivative (order (alpha-1)/2) of the time derivative of the error,
//! estimated through the exact cell integrals of the discrete kernel:
//! one block-Toeplitz product per field. A Gram-matrix quadrature
//! oracle backs the estimator at small sizes.

use crate::error::{Error, Result};
use crate::field::SolutionField;
use crate::fracops::{gamma, rl_cell_average_weights};
use crate::mesh::{assemble_mass, assemble_stiffness, TridiagonalOperator};
use crate::quad;
use crate::scheme::DiscreteSystem;
use crate::solver::ToeplitzPlan;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Which grid axis a study refines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyAxis {
    Space,
    Time,
}

impl std::fmt::Display for StudyAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StudyAxis::Space => f.write_str("space"),
            StudyAxis::Time => f.write_str("time"),
        }
    }
}

/// Errors of one refinement level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    /// Dyadic exponent of the refined axis (tau or h equals 2^-level).
    pub level: u32,
    pub tau: f64,
    pub h: f64,
    pub e1: f64,
    pub e2: f64,
}

/// Per-alpha refinement series with observed orders between
/// consecutive levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSeries {
    pub alpha: f64,
    pub levels: Vec<LevelResult>,
    pub orders_e1: Vec<f64>,
    pub orders_e2: Vec<f64>,
}

/// Outcome of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Example id (1 or 2) or 0 for a custom source.
    pub example: u8,
    pub vary: StudyAxis,
    pub series: Vec<AlphaSeries>,
}

/// E1: max over the reference time nodes of the H1-seminorm of the
/// difference, after prolonging `u` onto the reference grids.
///
/// The max runs over nodes only; the trial space is piecewise linear in
/// time, so sub-cell maxima are resolved to the reference resolution.
pub fn error_e1(u: &SolutionField, uref: &SolutionField) -> Result<f64> {
    let fine = u.prolong(*uref.time(), *uref.space())?;
    let a_fine = assemble_stiffness(uref.space());
    let n = uref.space().interior();
    let mut diff = vec![0.0; n];
    let mut worst = 0.0f64;
    for j in 0..=uref.time().steps() {
        let (fu, fr) = (fine.row(j), uref.row(j));
        for k in 0..n {
            diff[k] = fu[k] - fr[k];
        }
        worst = worst.max(a_fine.quadratic_form(&diff).sqrt());
    }
    Ok(worst)
}

/// E2: || D^{(alpha-1)/2} (u - uref)' ||_{L2(0,T; L2)} estimated on the
/// reference grid. The time derivative of the prolonged difference is
/// piecewise constant there; the Toeplitz product with the discrete
/// kernel yields the exact cell integrals of its fractional derivative,
/// and a mass-weighted midpoint rule closes the outer norm.
pub fn error_e2(u: &SolutionField, uref: &SolutionField, alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::domain(format!("alpha must lie in (1,2), got {alpha}")));
    }
    let fine = u.prolong(*uref.time(), *uref.space())?;
    let jf = uref.time().steps();
    let n = uref.space().interior();
    let tau = uref.time().dt();
    let mut w = vec![0.0; jf * n];
    for i in 1..=jf {
        let (au, ar) = (fine.row(i), uref.row(i));
        let (bu, br) = (fine.row(i - 1), uref.row(i - 1));
        let row = &mut w[(i - 1) * n..i * n];
        for k in 0..n {
            row[k] = ((au[k] - ar[k]) - (bu[k] - br[k])) / tau;
        }
    }
    let mass = assemble_mass(uref.space());
    seminorm_estimate_blocks(&w, jf, n, 0.5 * (alpha - 1.0), tau, &mass)
}

/// Block form of the seminorm estimator shared by E2 and the stability
/// witness: sqrt( sum_i z_i^T M z_i / tau ) with z the Toeplitz product
/// of the order-gamma kernel with the piecewise-constant blocks.
pub(crate) fn seminorm_estimate_blocks(
    w: &[f64],
    len: usize,
    width: usize,
    gamma_ord: f64,
    tau: f64,
    mass: &TridiagonalOperator,
) -> Result<f64> {
    let kappa = rl_cell_average_weights(gamma_ord, tau, len)?;
    let plan = ToeplitzPlan::new(kappa.kappa(), len)?;
    let z = plan.apply_blocks(w, len, width, len, 0)?;
    let mut total = 0.0;
    for i in 0..len {
        total += mass.quadratic_form(&z[i * width..(i + 1) * width]);
    }
    Ok((total / tau).sqrt())
}

/// Scalar seminorm estimator: || D^gamma w ||_{L2(0, len*tau)} for a
/// piecewise-constant w, by the same cell-integral route.
pub fn frac_seminorm_estimate(w: &[f64], gamma_ord: f64, tau: f64) -> Result<f64> {
    if w.is_empty() {
        return Ok(0.0);
    }
    let kappa = rl_cell_average_weights(gamma_ord, tau, w.len())?;
    let plan = ToeplitzPlan::new(kappa.kappa(), w.len())?;
    let z = plan.convolve_scalar(w, w.len())?;
    Ok((z.iter().map(|v| v * v).sum::<f64>() / tau).sqrt())
}

/// E2-type seminorm of the time derivative of a solution on its own
/// grid; the boundedness witness of the stability statement.
pub fn derivative_seminorm_estimate(
    sys: &DiscreteSystem,
    field: &SolutionField,
) -> Result<f64> {
    let j = sys.time().steps();
    let n = sys.space().interior();
    let tau = sys.time().dt();
    let mut w = vec![0.0; j * n];
    for i in 1..=j {
        let (a, b) = (field.row(i), field.row(i - 1));
        let row = &mut w[(i - 1) * n..i * n];
        for k in 0..n {
            row[k] = (a[k] - b[k]) / tau;
        }
    }
    seminorm_estimate_blocks(
        &w,
        j,
        n,
        0.5 * (sys.alpha() - 1.0),
        tau,
        sys.mass(),
    )
}

/// Exact || D^gamma w ||_{L2(0, J tau)} of a piecewise-constant w
/// through the Gram matrix of the kernel functions
/// k_i(t) = [(t-t_{i-1})_+^{-gamma} - (t-t_i)_+^{-gamma}]/Gamma(1-gamma),
/// every entry by adaptive quadrature with the singular points split
/// off. Oracle-scale only: J <= 256 and gamma < 1/2.
pub fn frac_seminorm_oracle(w: &[f64], gamma_ord: f64, tau: f64) -> Result<f64> {
    let g = gram_matrix(w.len(), gamma_ord, tau)?;
    let j = w.len();
    let mut total = 0.0;
    for a in 0..j {
        for b in 0..j {
            total += w[a] * g[a * j + b] * w[b];
        }
    }
    if total < 0.0 && total > -1e-12 {
        total = 0.0;
    }
    Ok(total.sqrt())
}

/// Dense Gram matrix of the oracle; entries g_{ij} = int k_i k_j.
pub(crate) fn gram_matrix(j: usize, gamma_ord: f64, tau: f64) -> Result<Vec<f64>> {
    if !(gamma_ord > 0.0 && gamma_ord < 0.5) {
        return Err(Error::domain(format!(
            "the Gram integrals require gamma in (0, 1/2), got {gamma_ord}"
        )));
    }
    if j == 0 {
        return Err(Error::domain("empty input".to_string()));
    }
    if j > 256 {
        return Err(Error::Resource(format!(
            "Gram oracle limited to 256 cells, requested {j}"
        )));
    }
    if !(tau > 0.0) {
        return Err(Error::domain("cell width must be positive".to_string()));
    }
    // g_{ij} = [ V(a_i,a_j) - V(a_i,b_j) - V(b_i,a_j) + V(b_i,b_j) ] / Gamma(1-g)^2
    // with V(a,b) = int_{max(a,b)}^{J tau} (t-a)^{-g} (t-b)^{-g} dt,
    // which on the uniform grid depends on (J - max_idx, |i-j|) only.
    let gm = gamma(1.0 - gamma_ord)?;
    let mut cache: HashMap<(usize, usize), f64> = HashMap::new();
    // endpoint indices: a_i -> i-1, b_i -> i (node index times tau)
    let mut g = vec![0.0; j * j];
    for row in 1..=j {
        for col in row..=j {
            let pairs = [
                (row - 1, col - 1, 1.0),
                (row - 1, col, -1.0),
                (row, col - 1, -1.0),
                (row, col, 1.0),
            ];
            let mut entry = 0.0;
            for (p, q, sign) in pairs {
                let hi = p.max(q);
                let lag = p.abs_diff(q);
                // V over (hi*tau, J*tau): len = J - hi cells
                let len = j - hi;
                if len > 0 {
                    let key = (len, lag);
                    let val = if let Some(&x) = cache.get(&key) {
                        x
                    } else {
                        let x = v_integral(len, lag, gamma_ord, tau);
                        cache.insert(key, x);
                        x
                    };
                    entry += sign * val;
                }
            }
            let value = entry / (gm * gm);
            g[(row - 1) * j + (col - 1)] = value;
            g[(col - 1) * j + (row - 1)] = value;
        }
    }
    Ok(g)
}

/// V(len, lag) = int_0^{len tau} s^{-g} (s + lag tau)^{-g} ds.
fn v_integral(len: usize, lag: usize, g: f64, tau: f64) -> f64 {
    let upper = len as f64 * tau;
    if lag == 0 {
        return upper.powf(1.0 - 2.0 * g) / (1.0 - 2.0 * g);
    }
    let delta = lag as f64 * tau;
    let f = |s: f64| s.powf(-g) * (s + delta).powf(-g);
    let split = delta.min(upper);
    let mut total = quad::integrate_power_singularity(&f, 0.0, split, g, 1e-13, 1e-13);
    if upper > split {
        total += quad::adaptive_gk(&f, split, upper, 1e-13, 1e-13);
    }
    total
}

/// Observed convergence orders of a dyadically refined error sequence:
/// order_k = log2(e_k / e_{k+1}).
pub fn observed_order(errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Ok(Vec::new());
    }
    for &e in errors {
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::domain(format!(
                "orders need positive finite errors, got {e}"
            )));
        }
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}
