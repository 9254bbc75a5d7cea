//! Uniform grids on (0,T) and (0,1), P1 finite element operators,
//! singular power-law load vectors and initial-data projections.
//!
//! Only interior degrees of freedom are stored; homogeneous Dirichlet
//! conditions are built into the assembly.

use crate::error::{Error, Result};
use crate::fracops::gamma;

/// Uniform partition 0 = t_0 < t_1 < ... < t_J = T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalGrid {
    steps: usize,
    horizon: f64,
}

impl TemporalGrid {
    pub fn new(steps: usize, horizon: f64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::config("temporal grid needs at least one step"));
        }
        if !(horizon > 0.0) {
            return Err(Error::config(format!(
                "time horizon must be positive, got {horizon}"
            )));
        }
        Ok(Self { steps, horizon })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        debug_assert!(j <= self.steps);
        self.horizon * j as f64 / self.steps as f64
    }
}

/// Uniform mesh of (0,1) with N interior nodes, h = 1/(N+1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialMesh {
    interior: usize,
}

impl SpatialMesh {
    pub fn new(interior: usize) -> Result<Self> {
        if interior == 0 {
            return Err(Error::config("spatial mesh needs at least one interior node"));
        }
        Ok(Self { interior })
    }

    pub fn interior(&self) -> usize {
        self.interior
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.interior as f64 + 1.0)
    }

    /// Interior node x_{i+1} = (i+1) h for 0-based index i.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.interior);
        (i as f64 + 1.0) / (self.interior as f64 + 1.0)
    }
}

/// Symmetric tridiagonal operator on the interior degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl TridiagonalOperator {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(off.len() + 1 == diag.len() || (diag.len() == 1 && off.is_empty()));
        Self { diag, off }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// y = self * x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.diag.len();
        debug_assert!(x.len() == n && y.len() == n);
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.apply(x, &mut y);
        y
    }

    /// a * self + b * other, entrywise.
    pub fn combine(a: f64, first: &Self, b: f64, second: &Self) -> Self {
        assert_eq!(first.n(), second.n());
        Self {
            diag: first
                .diag
                .iter()
                .zip(&second.diag)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            off: first
                .off
                .iter()
                .zip(&second.off)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    /// x^T self x, the quadratic form.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let n = self.diag.len();
        let mut s = 0.0;
        for i in 0..n {
            s += self.diag[i] * x[i] * x[i];
            if i + 1 < n {
                s += 2.0 * self.off[i] * x[i] * x[i + 1];
            }
        }
        s
    }

    /// LDL^T sweep; true when all pivots stay positive (the operator is
    /// symmetric positive definite).
    pub fn is_spd(&self) -> bool {
        let n = self.diag.len();
        let mut d = self.diag[0];
        if !(d > 0.0) {
            return false;
        }
        for i in 1..n {
            let l = self.off[i - 1] / d;
            d = self.diag[i] - l * self.off[i - 1];
            if !(d > 0.0) || !d.is_finite() {
                return false;
            }
        }
        true
    }
}

/// P1 stiffness matrix on the interior nodes: rows (1/h)(-1, 2, -1).
pub fn assemble_stiffness(mesh: &SpatialMesh) -> TridiagonalOperator {
    let n = mesh.interior();
    let h = mesh.h();
    TridiagonalOperator::new(vec![2.0 / h; n], vec![-1.0 / h; n.saturating_sub(1)])
}

/// P1 mass matrix on the interior nodes: rows (h/6)(1, 4, 1).
pub fn assemble_mass(mesh: &SpatialMesh) -> TridiagonalOperator {
    let n = mesh.interior();
    let h = mesh.h();
    TridiagonalOperator::new(vec![4.0 * h / 6.0; n], vec![h / 6.0; n.saturating_sub(1)])
}

use crate::fracops::second_difference_pow;

/// Load vector of the power source: b_n = int_0^1 x^mu phi_n(x) dx.
///
/// Closed form through the second antiderivative of x^mu,
/// b_n = [x_{n+1}^{mu+2} - 2 x_n^{mu+2} + x_{n-1}^{mu+2}]
///       / (h (mu+1)(mu+2)),
/// finite for every n whenever mu > -1.
pub fn power_moment_load(mu: f64, mesh: &SpatialMesh) -> Result<Vec<f64>> {
    if !(mu > -1.0) {
        return Err(Error::domain(format!(
            "power load exponent must exceed -1, got {mu}"
        )));
    }
    let n = mesh.interior();
    let h = mesh.h();
    let q = mu + 2.0;
    let scale = h.powf(mu + 1.0) / ((mu + 1.0) * (mu + 2.0));
    Ok((1..=n as u64)
        .map(|k| scale * second_difference_pow(k, q))
        .collect())
}

/// L2 load of sin(k pi x): exact through the second antiderivative,
/// b_n = 4 sin(k pi x_n) sin^2(k pi h / 2) / (h (k pi)^2).
pub fn sine_moment_load(k: usize, mesh: &SpatialMesh) -> Vec<f64> {
    let n = mesh.interior();
    let h = mesh.h();
    let omega = k as f64 * std::f64::consts::PI;
    let s = (0.5 * omega * h).sin();
    let factor = 4.0 * s * s / (h * omega * omega);
    (0..n).map(|i| factor * (omega * mesh.node(i)).sin()).collect()
}

/// H1 load of sin(k pi x): <(sin k pi x)', phi_n'> in closed form.
pub fn sine_ritz_load(k: usize, mesh: &SpatialMesh) -> Vec<f64> {
    let n = mesh.interior();
    let h = mesh.h();
    let omega = k as f64 * std::f64::consts::PI;
    let s = (0.5 * omega * h).sin();
    let factor = 4.0 * s * s / h;
    (0..n).map(|i| factor * (omega * mesh.node(i)).sin()).collect()
}

/// Initial-datum descriptors supported by the projections; enough for
/// every experiment the harness runs.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialDatum {
    Zero,
    /// Coefficients of a function already in the P1 space.
    Nodal(Vec<f64>),
    /// sin(k pi x); lives in H^1_0, projected in the Ritz sense.
    Sine(usize),
    /// x^mu with mu > -1; generally not H^1_0-conforming, projected in L2.
    Power(f64),
}

impl InitialDatum {
    /// L2 pairing <datum, phi_n> against every interior hat function.
    pub fn l2_load(&self, mesh: &SpatialMesh, mass: &TridiagonalOperator) -> Result<Vec<f64>> {
        match self {
            InitialDatum::Zero => Ok(vec![0.0; mesh.interior()]),
            InitialDatum::Nodal(c) => {
                if c.len() != mesh.interior() {
                    return Err(Error::config(format!(
                        "nodal datum has length {} but the mesh has {} interior nodes",
                        c.len(),
                        mesh.interior()
                    )));
                }
                Ok(mass.apply_vec(c))
            }
            InitialDatum::Sine(k) => Ok(sine_moment_load(*k, mesh)),
            InitialDatum::Power(mu) => power_moment_load(*mu, mesh),
        }
    }
}

/// Project an initial datum onto the P1 space: Ritz projection through
/// the stiffness form for H^1_0 data, L2 projection otherwise. Both
/// reduce to the identity for data already in the space.
pub fn project_initial(
    datum: &InitialDatum,
    mesh: &SpatialMesh,
    stiffness: &TridiagonalOperator,
    mass: &TridiagonalOperator,
) -> Result<Vec<f64>> {
    match datum {
        InitialDatum::Zero => Ok(vec![0.0; mesh.interior()]),
        InitialDatum::Nodal(c) => {
            if c.len() != mesh.interior() {
                return Err(Error::config(format!(
                    "nodal datum has length {} but the mesh has {} interior nodes",
                    c.len(),
                    mesh.interior()
                )));
            }
            Ok(c.clone())
        }
        InitialDatum::Sine(k) => {
            let load = sine_ritz_load(*k, mesh);
            crate::solver::thomas_solve(stiffness, &load)
        }
        InitialDatum::Power(mu) => {
            let load = power_moment_load(*mu, mesh)?;
            crate::solver::thomas_solve(mass, &load)
        }
    }
}

/// Time moment of the u1 correction: the integral of D_{0+}^alpha t
/// over the cell (t_{i-1}, t_i), namely
/// (t_i^{2-alpha} - t_{i-1}^{2-alpha}) / Gamma(3-alpha).
pub fn u1_time_moment(alpha: f64, t_left: f64, t_right: f64) -> Result<f64> {
    let e = 2.0 - alpha;
    Ok((t_right.powf(e) - t_left.powf(e)) / gamma(3.0 - alpha)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use crate::solver::thomas_solve;

    #[test]
    fn stiffness_golden() {
        let mesh = SpatialMesh::new(3).unwrap();
        let a = assemble_stiffness(&mesh);
        assert_eq!(a.diag(), &[8.0, 8.0, 8.0]);
        assert_eq!(a.off(), &[-4.0, -4.0]);
    }

    #[test]
    fn mass_golden_and_row_sums() {
        let mesh = SpatialMesh::new(3).unwrap();
        let m = assemble_mass(&mesh);
        assert!((m.diag()[0] - 1.0 / 6.0).abs() < 1e-15);
        assert!((m.off()[0] - 1.0 / 24.0).abs() < 1e-15);

        let mesh = SpatialMesh::new(17).unwrap();
        let h = mesh.h();
        let m = assemble_mass(&mesh);
        let ones = vec![1.0; 17];
        let rows = m.apply_vec(&ones);
        for (i, r) in rows.iter().enumerate() {
            let expected = if i == 0 || i == 16 { 5.0 * h / 6.0 } else { h };
            assert!((r - expected).abs() < 1e-15, "row {i}");
        }
        // total interior hat mass: sum_n int phi_n = N h = 1 - h
        let load = power_moment_load(0.0, &mesh).unwrap();
        let total: f64 = load.iter().sum();
        assert!((total - (1.0 - h)).abs() < 1e-13);
    }

    #[test]
    fn mass_matches_elementwise_gauss_assembly() {
        // reassemble with 2-point Gauss per element (exact for quadratics)
        let mesh = SpatialMesh::new(9).unwrap();
        let n = mesh.interior();
        let h = mesh.h();
        let g = 1.0 / 3.0f64.sqrt();
        let pts = [0.5 * (1.0 - g), 0.5 * (1.0 + g)];
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n - 1];
        for e in 0..=n {
            // element (x_e, x_{e+1}) with nodes e and e+1 (0 = boundary)
            for &p in &pts {
                let w = 0.5 * h;
                let left = 1.0 - p;
                let right = p;
                if e >= 1 {
                    diag[e - 1] += w * left * left;
                }
                if e < n {
                    diag[e] += w * right * right;
                }
                if e >= 1 && e < n {
                    off[e - 1] += w * left * right;
                }
            }
        }
        let m = assemble_mass(&mesh);
        for i in 0..n {
            assert!((m.diag()[i] - diag[i]).abs() < 1e-15);
        }
        for i in 0..n - 1 {
            assert!((m.off()[i] - off[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn stiffness_kills_linears_inside() {
        let mesh = SpatialMesh::new(12).unwrap();
        let a = assemble_stiffness(&mesh);
        let x: Vec<f64> = (0..12).map(|i| mesh.node(i)).collect();
        let y = a.apply_vec(&x);
        for i in 1..11 {
            assert!(y[i].abs() < 1e-13, "interior row {i}: {}", y[i]);
        }
    }

    #[test]
    fn operators_are_spd() {
        use rand::{Rng, SeedableRng};
        let mesh = SpatialMesh::new(24).unwrap();
        let a = assemble_stiffness(&mesh);
        let m = assemble_mass(&mesh);
        assert!(a.is_spd());
        assert!(m.is_spd());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x: Vec<f64> = (0..24).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if x.iter().any(|v| *v != 0.0) {
                assert!(a.quadratic_form(&x) > 0.0);
                assert!(m.quadratic_form(&x) > 0.0);
            }
        }
    }

    #[test]
    fn smallest_generalized_eigenvalue_near_pi_squared() {
        // inverse power iteration on A x = lambda M x at N = 15
        let mesh = SpatialMesh::new(15).unwrap();
        let a = assemble_stiffness(&mesh);
        let m = assemble_mass(&mesh);
        let mut x = vec![1.0; 15];
        let mut lambda = 0.0;
        for _ in 0..200 {
            let rhs = m.apply_vec(&x);
            let y = thomas_solve(&a, &rhs).unwrap();
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            x = y.iter().map(|v| v / norm).collect();
            lambda = a.quadratic_form(&x) / m.quadratic_form(&x);
        }
        let pi2 = std::f64::consts::PI.powi(2);
        assert!(
            (lambda - pi2).abs() < 0.02 * pi2,
            "lambda = {lambda}, pi^2 = {pi2}"
        );
    }

    #[test]
    fn power_load_goldens() {
        let mesh = SpatialMesh::new(7).unwrap();
        let h = mesh.h();
        let b0 = power_moment_load(0.0, &mesh).unwrap();
        for &v in &b0 {
            assert!((v - h).abs() < 1e-15);
        }
        let b1 = power_moment_load(1.0, &mesh).unwrap();
        for (i, &v) in b1.iter().enumerate() {
            assert!((v - h * mesh.node(i)).abs() < 1e-15);
        }
        assert!(power_moment_load(-1.0, &mesh).is_err());
    }

    /// Quadrature oracle for the hat moments of x^mu, with the
    /// singularity at x = 0 split off.
    fn power_load_oracle(mu: f64, mesh: &SpatialMesh, i: usize) -> f64 {
        let h = mesh.h();
        let xc = mesh.node(i);
        let (xl, xr) = (xc - h, xc + h);
        let hat = move |x: f64| {
            if x <= xl || x >= xr {
                0.0
            } else if x <= xc {
                (x - xl) / h
            } else {
                (xr - x) / h
            }
        };
        if i == 0 && mu < 0.0 {
            let f = |x: f64| x.powf(mu) * hat(x);
            quad::integrate_power_singularity(&f, 0.0, xc, -mu, 1e-14, 1e-13)
                + quad::adaptive_gk(&f, xc, xr, 1e-14, 1e-13)
        } else {
            let f = |x: f64| x.powf(mu) * hat(x);
            quad::adaptive_gk(&f, xl, xc, 1e-14, 1e-13) + quad::adaptive_gk(&f, xc, xr, 1e-14, 1e-13)
        }
    }

    #[test]
    fn power_load_matches_quadrature() {
        for &mu in &[-0.49, -0.2, 0.0, 0.7, 1.0, 2.0] {
            for &n in &[7usize, 100] {
                let mesh = SpatialMesh::new(n).unwrap();
                let b = power_moment_load(mu, &mesh).unwrap();
                for &i in &[0usize, 1, n / 2, n - 1] {
                    let oracle = power_load_oracle(mu, &mesh, i);
                    assert!(
                        (b[i] - oracle).abs() <= 1e-11 * oracle.abs(),
                        "mu={mu} n={n} i={i}: {} vs {oracle}",
                        b[i]
                    );
                }
            }
        }
    }

    #[test]
    fn singular_power_load_frozen_value() {
        // b_1 for mu = -0.49 on N = 7, frozen from the quadrature oracle
        let mesh = SpatialMesh::new(7).unwrap();
        let b = power_moment_load(-0.49, &mesh).unwrap();
        let oracle = power_load_oracle(-0.49, &mesh, 0);
        assert!((b[0] - oracle).abs() < 1e-11 * oracle);
        assert!((b[0] - 0.381_350_435_577_063_8).abs() < 1e-11 * b[0]);
    }

    #[test]
    fn sine_loads_match_quadrature() {
        let mesh = SpatialMesh::new(9).unwrap();
        let h = mesh.h();
        for &k in &[1usize, 2, 5] {
            let omega = k as f64 * std::f64::consts::PI;
            let l2 = sine_moment_load(k, &mesh);
            let ritz = sine_ritz_load(k, &mesh);
            for i in [0usize, 4, 8] {
                let xc = mesh.node(i);
                let f = |x: f64| {
                    let w = 1.0 - ((x - xc) / h).abs();
                    (omega * x).sin() * w.max(0.0)
                };
                let oracle =
                    quad::adaptive_gk(&f, xc - h, xc, 1e-14, 1e-13) + quad::adaptive_gk(&f, xc, xc + h, 1e-14, 1e-13);
                assert!((l2[i] - oracle).abs() < 1e-12, "k={k} i={i}");
                // H1 load: omega * int cos(omega x) phi_n'(x)
                let df = |x: f64| {
                    let s = if x < xc { 1.0 } else { -1.0 };
                    omega * (omega * x).cos() * s / h
                };
                let oracle_h1 = quad::adaptive_gk(&df, xc - h, xc, 1e-13, 1e-12)
                    + quad::adaptive_gk(&df, xc, xc + h, 1e-13, 1e-12);
                assert!(
                    (ritz[i] - oracle_h1).abs() < 1e-10 * (1.0 + oracle_h1.abs()),
                    "k={k} i={i}: {} vs {oracle_h1}",
                    ritz[i]
                );
            }
        }
    }

    #[test]
    fn projections_are_identity_on_the_space() {
        let mesh = SpatialMesh::new(11).unwrap();
        let a = assemble_stiffness(&mesh);
        let m = assemble_mass(&mesh);
        let mut coeff = vec![0.0; 11];
        coeff[4] = 1.0;
        let nodal = InitialDatum::Nodal(coeff.clone());
        let proj = project_initial(&nodal, &mesh, &a, &m).unwrap();
        assert_eq!(proj, coeff);
        // explicit Ritz solve of a nodal function reproduces it too
        let load = a.apply_vec(&coeff);
        let ritz = thomas_solve(&a, &load).unwrap();
        for i in 0..11 {
            assert!((ritz[i] - coeff[i]).abs() < 1e-12);
        }
        let zero = project_initial(&InitialDatum::Zero, &mesh, &a, &m).unwrap();
        assert!(zero.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn ritz_projection_of_sine_is_first_order_in_h1() {
        // || sin(pi x) ||_{H1}^2 = pi^2/2; Pythagoras for the Ritz projection
        let pi2_half = 0.5 * std::f64::consts::PI.powi(2);
        let mut errs = Vec::new();
        for &n in &[15usize, 31, 63] {
            let mesh = SpatialMesh::new(n).unwrap();
            let a = assemble_stiffness(&mesh);
            let m = assemble_mass(&mesh);
            let u = project_initial(&InitialDatum::Sine(1), &mesh, &a, &m).unwrap();
            let err2 = pi2_half - a.quadratic_form(&u);
            assert!(err2 > 0.0);
            errs.push(err2.sqrt());
        }
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        assert!((order1 - 1.0).abs() < 0.1, "order {order1}");
        assert!((order2 - 1.0).abs() < 0.05, "order {order2}");
    }

    #[test]
    fn u1_moment_matches_monomial_rule() {
        // the cell integral of D^alpha t = t^{1-alpha}/Gamma(2-alpha)
        let alpha = 1.5f64;
        let quad_val = quad::integrate_power_singularity(
            &|t: f64| t.powf(1.0 - alpha) / gamma(2.0 - alpha).unwrap(),
            0.0,
            0.25,
            alpha - 1.0,
            1e-14,
            1e-13,
        );
        let closed = u1_time_moment(alpha, 0.0, 0.25).unwrap();
        assert!((closed - quad_val).abs() < 1e-12 * closed);
    }
}
