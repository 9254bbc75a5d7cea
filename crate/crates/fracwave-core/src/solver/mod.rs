//! Solvers for the block lower-triangular Toeplitz system: sequential
//! time stepping as the reference path and a divide-and-conquer fast
//! solver with FFT history products.

mod toeplitz;

pub use toeplitz::{toeplitz_matvec, ToeplitzPlan};

use crate::error::{Error, Result};
use crate::field::SolutionField;
use crate::mesh::TridiagonalOperator;
use crate::scheme::{step_operator, DiscreteSystem};
use std::collections::HashMap;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Solve B x = rhs for a tridiagonal B by the Thomas algorithm.
pub fn thomas_solve(b: &TridiagonalOperator, rhs: &[f64]) -> Result<Vec<f64>> {
    TridiagFactor::new(b)?.solve(rhs)
}

/// LU factors of a tridiagonal operator, reusable across many solves.
pub struct TridiagFactor {
    c_prime: Vec<f64>,
    inv_denom: Vec<f64>,
    sub: Vec<f64>,
}

impl TridiagFactor {
    pub fn new(b: &TridiagonalOperator) -> Result<Self> {
        let n = b.n();
        let diag = b.diag();
        let off = b.off();
        let mut c_prime = vec![0.0; n.saturating_sub(1)];
        let mut inv_denom = vec![0.0; n];
        let mut denom = diag[0];
        if !denom.is_finite() || denom.abs() < 1e-300 {
            return Err(Error::Singular("zero pivot at row 0".to_string()));
        }
        inv_denom[0] = 1.0 / denom;
        if n > 1 {
            c_prime[0] = off[0] / denom;
        }
        for i in 1..n {
            denom = diag[i] - off[i - 1] * c_prime[i - 1];
            if !denom.is_finite() || denom.abs() < 1e-300 {
                return Err(Error::Singular(format!("zero pivot at row {i}")));
            }
            inv_denom[i] = 1.0 / denom;
            if i + 1 < n {
                c_prime[i] = off[i] / denom;
            }
        }
        Ok(Self {
            c_prime,
            inv_denom,
            sub: off.to_vec(),
        })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [f64]) -> Result<()> {
        let n = self.inv_denom.len();
        if x.len() != n {
            return Err(Error::config("rhs length mismatch".to_string()));
        }
        x[0] *= self.inv_denom[0];
        for i in 1..n {
            x[i] = (x[i] - self.sub[i - 1] * x[i - 1]) * self.inv_denom[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.c_prime[i] * x[i + 1];
        }
        Ok(())
    }
}

/// Sequential time stepping: for i = 1..J solve
/// B U_i = F_i + (kappa_0/tau) M U_{i-1} - (tau/2) A U_{i-1}
///         - sum_{m=1}^{i-1} kappa_m M (U_{i-m} - U_{i-m-1}) / tau.
/// Cost O(J^2 N); the reference for the fast path.
pub fn solve_stepping(sys: &DiscreteSystem) -> Result<SolutionField> {
    let j = sys.time().steps();
    let n = sys.space().interior();
    let tau = sys.time().dt();
    let kappa = sys.kappa().kappa();
    let b = step_operator(sys);
    let factor = TridiagFactor::new(&b)?;

    let mut field = SolutionField::zeros(*sys.time(), *sys.space());
    field.row_mut(0).copy_from_slice(sys.u0h());

    // mass-weighted increments M (U_j - U_{j-1}) / tau, built as we go
    let mut diffs: Vec<f64> = Vec::with_capacity(j * n);
    let mut scratch = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 1..=j {
        rhs.copy_from_slice(sys.rhs_row(i));
        let prev = field.row(i - 1).to_vec();
        // + (kappa_0/tau) M U_{i-1}
        sys.mass().apply(&prev, &mut scratch);
        for (r, s) in rhs.iter_mut().zip(&scratch) {
            *r += kappa[0] / tau * s;
        }
        // - (tau/2) A U_{i-1}
        sys.stiffness().apply(&prev, &mut scratch);
        for (r, s) in rhs.iter_mut().zip(&scratch) {
            *r -= 0.5 * tau * s;
        }
        // - history
        for m in 1..i {
            let d = &diffs[(i - m - 1) * n..(i - m) * n];
            let km = kappa[m];
            for (r, dv) in rhs.iter_mut().zip(d) {
                *r -= km * dv;
            }
        }
        factor.solve_in_place(&mut rhs)?;
        field.row_mut(i).copy_from_slice(&rhs);
        // record M (U_i - U_{i-1}) / tau
        for (s, (ui, up)) in scratch.iter_mut().zip(rhs.iter().zip(&prev)) {
            *s = (ui - up) / tau;
        }
        let md = sys.mass().apply_vec(&scratch);
        diffs.extend_from_slice(&md);
    }
    if field.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("time stepping produced non-finite values".to_string()));
    }
    Ok(field)
}

/// Recursion floor of the divide-and-conquer solver; below this the
/// FFT overhead outweighs direct summation.
const DNC_FLOOR: usize = 32;

/// Divide-and-conquer fast solver, O(N J log^2 J).
///
/// Solves the same block lower-triangular Toeplitz system as
/// [`solve_stepping`]: solve the first half, push its influence onto
/// the second half's right-hand sides with one FFT block convolution,
/// recurse. The block kernel is G_0 = B, G_1 = (c_1/tau) M + (tau/2) A,
/// G_m = (c_m/tau) M with c_m = kappa_m - kappa_{m-1}.
pub fn solve_fast_dnc(sys: &DiscreteSystem) -> Result<SolutionField> {
    let j = sys.time().steps();
    let n = sys.space().interior();
    let tau = sys.time().dt();
    let kappa = sys.kappa().kappa();
    let b = step_operator(sys);
    let factor = TridiagFactor::new(&b)?;

    // c_m = kappa_m - kappa_{m-1}, index 1..J-1; c[0] unused (zero)
    let mut c = vec![0.0; j];
    for m in 1..j {
        c[m] = kappa[m] - kappa[m - 1];
    }

    let mut field = SolutionField::zeros(*sys.time(), *sys.space());
    field.row_mut(0).copy_from_slice(sys.u0h());

    // working right-hand sides R_i = F_i + (kappa_{i-1}/tau) M U_0
    //                               - [i == 1] (tau/2) A U_0
    let mut work = sys.rhs().to_vec();
    if sys.u0h().iter().any(|v| *v != 0.0) {
        let mu0 = sys.mass().apply_vec(sys.u0h());
        for i in 1..=j {
            let row = &mut work[(i - 1) * n..i * n];
            let w = kappa[i - 1] / tau;
            for (r, m) in row.iter_mut().zip(&mu0) {
                *r += w * m;
            }
        }
        let au0 = sys.stiffness().apply_vec(sys.u0h());
        for (r, a) in work[..n].iter_mut().zip(&au0) {
            *r -= 0.5 * tau * a;
        }
    }

    let mut ctx = DncContext {
        sys,
        factor: &factor,
        c: &c,
        tau,
        n,
        plans: HashMap::new(),
    };
    dnc_solve(&mut ctx, &mut field, &mut work, 1, j)?;
    if field.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("fast solver produced non-finite values".to_string()));
    }
    Ok(field)
}

struct DncContext<'a> {
    sys: &'a DiscreteSystem,
    factor: &'a TridiagFactor,
    c: &'a [f64],
    tau: f64,
    n: usize,
    plans: HashMap<usize, ToeplitzPlan>,
}

/// Solve rows lo..=hi given that `work` already carries every
/// contribution of rows < lo.
fn dnc_solve(
    ctx: &mut DncContext,
    field: &mut SolutionField,
    work: &mut [f64],
    lo: usize,
    hi: usize,
) -> Result<()> {
    let span = hi - lo + 1;
    let n = ctx.n;
    if span <= DNC_FLOOR {
        // direct in-range stepping on the G-form
        let mut mu: Vec<f64> = Vec::with_capacity(span * n);
        for i in lo..=hi {
            let mut rhs = work[(i - 1) * n..i * n].to_vec();
            for jj in lo..i {
                let m = i - jj;
                let w = ctx.c[m] / ctx.tau;
                let muj = &mu[(jj - lo) * n..(jj - lo + 1) * n];
                for (r, v) in rhs.iter_mut().zip(muj) {
                    *r -= w * v;
                }
            }
            if i > lo {
                let au = ctx.sys.stiffness().apply_vec(field.row(i - 1));
                for (r, a) in rhs.iter_mut().zip(&au) {
                    *r -= 0.5 * ctx.tau * a;
                }
            }
            ctx.factor.solve_in_place(&mut rhs)?;
            field.row_mut(i).copy_from_slice(&rhs);
            mu.extend_from_slice(&ctx.sys.mass().apply_vec(&rhs));
        }
        return Ok(());
    }

    let mid = lo + span / 2 - 1;
    dnc_solve(ctx, field, work, lo, mid)?;

    // cross-history: R_i -= (1/tau) M sum_{j=lo..mid} c_{i-j} U_j
    //                      + (tau/2) A U_mid at i = mid+1
    let n1 = mid - lo + 1;
    let n2 = hi - mid;
    if !ctx.plans.contains_key(&span) {
        // kernel slot m holds c_m; the m = 0 slot stays zero
        let mut kernel = vec![0.0; span];
        kernel[1..span].copy_from_slice(&ctx.c[1..span]);
        let plan = ToeplitzPlan::new(&kernel, span)?;
        ctx.plans.insert(span, plan);
    }
    let plan = &ctx.plans[&span];
    let blocks = &field.values()[lo * n..(mid + 1) * n];
    let cross = plan.apply_blocks(blocks, n1, n, n2, n1)?;
    for i in (mid + 1)..=hi {
        let k = i - mid - 1;
        let m_cross = ctx.sys.mass().apply_vec(&cross[k * n..(k + 1) * n]);
        let row = &mut work[(i - 1) * n..i * n];
        for (r, v) in row.iter_mut().zip(&m_cross) {
            *r -= v / ctx.tau;
        }
    }
    let a_mid = ctx.sys.stiffness().apply_vec(field.row(mid));
    for (r, a) in work[mid * n..(mid + 1) * n].iter_mut().zip(&a_mid) {
        *r -= 0.5 * ctx.tau * a;
    }

    dnc_solve(ctx, field, work, mid + 1, hi)
}

/// Dump format of a solution field: text header `J N alpha T`, then
/// (J+1)*N values, row-major by time node, as little-endian f64 or CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpFormat {
    Csv,
    Binary,
}

pub fn write_solution(
    field: &SolutionField,
    alpha: f64,
    path: &Path,
    format: DumpFormat,
) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source: e,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    let j = field.time().steps();
    let n = field.space().interior();
    writeln!(w, "{} {} {} {}", j, n, alpha, field.time().horizon()).map_err(io_err)?;
    match format {
        DumpFormat::Csv => {
            for row in 0..=j {
                let vals = field.row(row);
                let line = vals
                    .iter()
                    .map(|v| format!("{v:.17e}"))
                    .collect::<Vec<_>>()
                    .join(",");
                writeln!(w, "{line}").map_err(io_err)?;
            }
        }
        DumpFormat::Binary => {
            for v in field.values() {
                w.write_all(&v.to_le_bytes()).map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}

pub fn read_solution(path: &Path, format: DumpFormat) -> Result<(SolutionField, f64)> {
    let io_err = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source: e,
    };
    let file = std::fs::File::open(path).map_err(io_err)?;
    let mut r = BufReader::new(file);
    let mut header = String::new();
    r.read_line(&mut header).map_err(io_err)?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 {
        return Err(Error::config(format!(
            "malformed dump header: {header:?}"
        )));
    }
    let j: usize = parts[0]
        .parse()
        .map_err(|_| Error::config("bad J in header".to_string()))?;
    let n: usize = parts[1]
        .parse()
        .map_err(|_| Error::config("bad N in header".to_string()))?;
    let alpha: f64 = parts[2]
        .parse()
        .map_err(|_| Error::config("bad alpha in header".to_string()))?;
    let horizon: f64 = parts[3]
        .parse()
        .map_err(|_| Error::config("bad T in header".to_string()))?;
    let count = (j + 1) * n;
    let mut values = Vec::with_capacity(count);
    match format {
        DumpFormat::Csv => {
            for line in r.lines() {
                let line = line.map_err(io_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                for tok in line.split(',') {
                    values.push(
                        tok.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::config(format!("bad value {tok:?}")))?,
                    );
                }
            }
        }
        DumpFormat::Binary => {
            let mut buf = Vec::new();
            r.read_to_end(&mut buf).map_err(io_err)?;
            if buf.len() != 8 * count {
                return Err(Error::config(format!(
                    "dump payload has {} bytes, expected {}",
                    buf.len(),
                    8 * count
                )));
            }
            for chunk in buf.chunks_exact(8) {
                values.push(f64::from_le_bytes(chunk.try_into().unwrap()));
            }
        }
    }
    let time = crate::mesh::TemporalGrid::new(j, horizon)?;
    let space = crate::mesh::SpatialMesh::new(n)?;
    Ok((SolutionField::from_values(time, space, values)?, alpha))
}
