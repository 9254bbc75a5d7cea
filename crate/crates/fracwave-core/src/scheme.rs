//! Assembly of the Petrov-Galerkin space-time system.
//!
//! Trial functions are piecewise linear in time and P1 in space, test
//! functions piecewise constant in time and P1 in space. Equation i
//! (1-based) of the assembled system reads
//!
//!   sum_{m=0}^{i-1} kappa_m M (U_{i-m} - U_{i-m-1}) / tau
//!     + (tau/2) A (U_{i-1} + U_i)  =  F_i,
//!
//! where kappa are the discrete fractional-derivative weights of order
//! nu = alpha - 1 and the A-term is the exact time integral of the
//! piecewise-linear trial function over the cell.

use crate::error::{Error, Result};
use crate::fracops::{gamma, rl_cell_average_weights, KernelWeights};
use crate::mesh::{
    assemble_mass, assemble_stiffness, project_initial, u1_time_moment, InitialDatum, SpatialMesh,
    TemporalGrid, TridiagonalOperator,
};
use crate::quad::{gauss_legendre, gauss_on};
use std::fmt;
use std::sync::Arc;

/// Right-hand side f of the wave problem.
#[derive(Clone)]
pub enum SourceTerm {
    /// f(x,t) = scale * t^{mu_t} x^{mu_x}, integrable for mu > -1.
    SeparablePower { mu_t: f64, mu_x: f64, scale: f64 },
    /// Arbitrary callable f(x, t); integrated by tensor Gauss rules
    /// with geometric grading toward the t = 0 and x = 0 edges.
    General {
        f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
        degree: usize,
    },
    /// No forcing.
    Zero,
}

impl fmt::Debug for SourceTerm {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceTerm::SeparablePower { mu_t, mu_x, scale } => fm
                .debug_struct("SeparablePower")
                .field("mu_t", mu_t)
                .field("mu_x", mu_x)
                .field("scale", scale)
                .finish(),
            SourceTerm::General { degree, .. } => {
                fm.debug_struct("General").field("degree", degree).finish()
            }
            SourceTerm::Zero => fm.write_str("Zero"),
        }
    }
}

impl SourceTerm {
    pub fn separable_power(mu_t: f64, mu_x: f64, scale: f64) -> Result<Self> {
        if !(mu_t > -1.0 && mu_x > -1.0) {
            return Err(Error::domain(format!(
                "separable power source needs mu_t, mu_x > -1, got ({mu_t}, {mu_x})"
            )));
        }
        Ok(SourceTerm::SeparablePower { mu_t, mu_x, scale })
    }

    pub fn general(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        SourceTerm::General {
            f: Arc::new(f),
            degree: 4,
        }
    }

    pub fn general_with_degree(
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        degree: usize,
    ) -> Self {
        SourceTerm::General {
            f: Arc::new(f),
            degree,
        }
    }
}

/// The continuous problem instance.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    alpha: f64,
    horizon: f64,
    source: SourceTerm,
    u0: InitialDatum,
    u1: InitialDatum,
}

impl ProblemSpec {
    pub fn new(
        alpha: f64,
        horizon: f64,
        source: SourceTerm,
        u0: InitialDatum,
        u1: InitialDatum,
    ) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::domain(format!(
                "fractional order must lie in (1,2), got {alpha}"
            )));
        }
        if !(horizon > 0.0) {
            return Err(Error::domain(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        Ok(Self {
            alpha,
            horizon,
            source,
            u0,
            u1,
        })
    }

    /// The source of the paper-style experiments: example 1 is
    /// f = t^{-0.49} x^{-0.49}, example 2 is f = t^{1.51-alpha} x^{-0.49}.
    pub fn example(id: u8, alpha: f64) -> Result<Self> {
        let source = match id {
            1 => SourceTerm::separable_power(-0.49, -0.49, 1.0)?,
            2 => SourceTerm::separable_power(1.51 - alpha, -0.49, 1.0)?,
            other => {
                return Err(Error::config(format!(
                    "unknown example id {other}; expected 1 or 2"
                )))
            }
        };
        ProblemSpec::new(alpha, 1.0, source, InitialDatum::Zero, InitialDatum::Zero)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn source(&self) -> &SourceTerm {
        &self.source
    }

    pub fn u0(&self) -> &InitialDatum {
        &self.u0
    }

    pub fn u1(&self) -> &InitialDatum {
        &self.u1
    }
}

/// Everything the solvers need: operators, weights, right-hand side and
/// projected initial data.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub(crate) time: TemporalGrid,
    pub(crate) space: SpatialMesh,
    pub(crate) alpha: f64,
    pub(crate) kappa: KernelWeights,
    pub(crate) mass: TridiagonalOperator,
    pub(crate) stiffness: TridiagonalOperator,
    /// J x N array, row i-1 = load of equation i.
    pub(crate) rhs: Vec<f64>,
    pub(crate) u0h: Vec<f64>,
}

impl DiscreteSystem {
    pub fn time(&self) -> &TemporalGrid {
        &self.time
    }

    pub fn space(&self) -> &SpatialMesh {
        &self.space
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kappa(&self) -> &KernelWeights {
        &self.kappa
    }

    pub fn mass(&self) -> &TridiagonalOperator {
        &self.mass
    }

    pub fn stiffness(&self) -> &TridiagonalOperator {
        &self.stiffness
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn rhs_row(&self, i: usize) -> &[f64] {
        debug_assert!((1..=self.time.steps()).contains(&i));
        let n = self.space.interior();
        &self.rhs[(i - 1) * n..i * n]
    }

    pub fn u0h(&self) -> &[f64] {
        &self.u0h
    }
}

/// Assemble operators, weights, right-hand side and initial data.
pub fn assemble_system(
    p: &ProblemSpec,
    time: TemporalGrid,
    space: SpatialMesh,
) -> Result<DiscreteSystem> {
    if (time.horizon() - p.horizon).abs() > 1e-14 * p.horizon {
        return Err(Error::config(format!(
            "grid horizon {} does not match problem horizon {}",
            time.horizon(),
            p.horizon
        )));
    }
    let mass = assemble_mass(&space);
    let stiffness = assemble_stiffness(&space);
    let kappa = rl_cell_average_weights(p.alpha - 1.0, time.dt(), time.steps())?;
    let rhs = assemble_rhs(p, &time, &space, &mass)?;
    let u0h = project_initial(p.u0(), &space, &stiffness, &mass)?;
    Ok(DiscreteSystem {
        time,
        space,
        alpha: p.alpha,
        kappa,
        mass,
        stiffness,
        rhs,
        u0h,
    })
}

/// Right-hand side F_{i,n} = int_{I_i} int f phi_n + <u1, phi_n>
/// (t_i^{2-alpha} - t_{i-1}^{2-alpha}) / Gamma(3-alpha).
pub fn assemble_rhs(
    p: &ProblemSpec,
    time: &TemporalGrid,
    space: &SpatialMesh,
    mass: &TridiagonalOperator,
) -> Result<Vec<f64>> {
    let j = time.steps();
    let n = space.interior();
    let mut rhs = vec![0.0; j * n];

    match p.source() {
        SourceTerm::Zero => {}
        SourceTerm::SeparablePower { mu_t, mu_x, scale } => {
            let b = crate::mesh::power_moment_load(*mu_x, space)?;
            let s = mu_t + 1.0;
            if !(s > 0.0) {
                return Err(Error::domain(format!(
                    "time exponent {mu_t} is not integrable"
                )));
            }
            for i in 1..=j {
                let moment =
                    scale * (time.node(i).powf(s) - time.node(i - 1).powf(s)) / s;
                let row = &mut rhs[(i - 1) * n..i * n];
                for (r, bn) in row.iter_mut().zip(&b) {
                    *r = moment * bn;
                }
            }
        }
        SourceTerm::General { f, degree } => {
            general_rhs(f.as_ref(), *degree, time, space, &mut rhs);
        }
    }

    if p.u1() != &InitialDatum::Zero {
        let load = p.u1().l2_load(space, mass)?;
        for i in 1..=j {
            let moment = u1_time_moment(p.alpha, time.node(i - 1), time.node(i))?;
            let row = &mut rhs[(i - 1) * n..i * n];
            for (r, l) in row.iter_mut().zip(&load) {
                *r += moment * l;
            }
        }
    }

    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(
            "right-hand side is not finite; source not integrable against the test space"
                .to_string(),
        ));
    }
    Ok(rhs)
}

/// Tensor Gauss quadrature of <f, chi_{I_i} phi_n>. Cells touching the
/// t = 0 or x = 0 edge are split geometrically toward the edge so that
/// integrable power singularities converge to quadrature accuracy.
fn general_rhs(
    f: &(dyn Fn(f64, f64) -> f64 + Send + Sync),
    degree: usize,
    time: &TemporalGrid,
    space: &SpatialMesh,
    rhs: &mut [f64],
) {
    let degree = degree.max(2);
    let (gx, gw) = gauss_legendre(degree);
    let j = time.steps();
    let n = space.interior();
    let h = space.h();

    // panels of [a,b], geometrically graded toward a when graded=true
    let panels = |a: f64, b: f64, graded: bool| -> Vec<(f64, f64)> {
        if !graded {
            return vec![(a, b)];
        }
        let mut cuts = vec![b];
        let mut w = b - a;
        for _ in 0..80 {
            w *= 0.5;
            cuts.push(a + w);
            if w < 1e-300 {
                break;
            }
        }
        cuts.push(a);
        cuts.reverse();
        cuts.windows(2).map(|c| (c[0], c[1])).collect()
    };

    for i in 1..=j {
        let (t0, t1) = (time.node(i - 1), time.node(i));
        let t_panels = panels(t0, t1, i == 1);
        for nn in 0..n {
            let xc = space.node(nn);
            let mut total = 0.0;
            for (cell, graded) in [((xc - h, xc), nn == 0), ((xc, xc + h), false)] {
                let x_panels = panels(cell.0, cell.1, graded);
                for &(xa, xb) in &x_panels {
                    for &(ta, tb) in &t_panels {
                        let inner = |t: f64| {
                            gauss_on(
                                &|x: f64| {
                                    let w = 1.0 - ((x - xc) / h).abs();
                                    f(x, t) * w
                                },
                                xa,
                                xb,
                                &gx,
                                &gw,
                            )
                        };
                        total += gauss_on(&inner, ta, tb, &gx, &gw);
                    }
                }
            }
            rhs[(i - 1) * n + nn] = total;
        }
    }
}

/// Per-step operator B = (kappa_0 / tau) M + (tau / 2) A, the diagonal
/// block of the lower-triangular Toeplitz system; constant across steps
/// on a uniform grid.
pub fn step_operator(sys: &DiscreteSystem) -> TridiagonalOperator {
    let tau = sys.time.dt();
    let k0 = sys.kappa.kappa()[0];
    TridiagonalOperator::combine(k0 / tau, &sys.mass, 0.5 * tau, &sys.stiffness)
}

/// Residuals of the block equations for a candidate coefficient field:
/// r_i = sum_m kappa_m M (U_{i-m} - U_{i-m-1})/tau
///       + (tau/2) A (U_{i-1}+U_i) - F_i, returned as max-abs per row.
pub fn residual_norms(sys: &DiscreteSystem, field: &crate::SolutionField) -> Vec<f64> {
    let j = sys.time.steps();
    let n = sys.space.interior();
    let tau = sys.time.dt();
    let kap = sys.kappa.kappa();
    let mut diffs: Vec<Vec<f64>> = Vec::with_capacity(j);
    for i in 1..=j {
        let mut d = vec![0.0; n];
        for k in 0..n {
            d[k] = (field.row(i)[k] - field.row(i - 1)[k]) / tau;
        }
        diffs.push(sys.mass.apply_vec(&d));
    }
    let mut out = Vec::with_capacity(j);
    let mut au = vec![0.0; n];
    for i in 1..=j {
        let mut r = vec![0.0; n];
        for m in 0..i {
            let md = &diffs[i - m - 1];
            for k in 0..n {
                r[k] += kap[m] * md[k];
            }
        }
        let mut sum = vec![0.0; n];
        for k in 0..n {
            sum[k] = field.row(i - 1)[k] + field.row(i)[k];
        }
        sys.stiffness.apply(&sum, &mut au);
        let frow = sys.rhs_row(i);
        let mut worst = 0.0f64;
        for k in 0..n {
            let v = r[k] + 0.5 * tau * au[k] - frow[k];
            worst = worst.max(v.abs());
        }
        out.push(worst);
    }
    out
}
