//! Space-time coefficient fields of the discrete solution.

use crate::error::{Error, Result};
use crate::mesh::{SpatialMesh, TemporalGrid};

/// Nodal coefficients of a function that is piecewise linear in time
/// and P1 in space: row j holds the interior values at t_j, rows
/// 0..=J, entries 0..N.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    time: TemporalGrid,
    space: SpatialMesh,
    values: Vec<f64>,
}

impl SolutionField {
    pub fn zeros(time: TemporalGrid, space: SpatialMesh) -> Self {
        let values = vec![0.0; (time.steps() + 1) * space.interior()];
        Self { time, space, values }
    }

    pub fn from_values(time: TemporalGrid, space: SpatialMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != (time.steps() + 1) * space.interior() {
            return Err(Error::config(format!(
                "field storage mismatch: expected {} values, got {}",
                (time.steps() + 1) * space.interior(),
                values.len()
            )));
        }
        Ok(Self { time, space, values })
    }

    pub fn time(&self) -> &TemporalGrid {
        &self.time
    }

    pub fn space(&self) -> &SpatialMesh {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Interior nodal values at time node j.
    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.space.interior();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn row_mut(&mut self, j: usize) -> &mut [f64] {
        let n = self.space.interior();
        &mut self.values[j * n..(j + 1) * n]
    }

    /// Exact evaluation on a nested finer grid.
    ///
    /// Requires dyadic nesting: the step counts must refine by powers of
    /// two in time and likewise for the cell counts N+1 in space. The
    /// interpolation is a cascade of midpoint averages, so prolonging
    /// through an intermediate grid is bitwise identical to prolonging
    /// directly, and restriction to the coarse nodes recovers the
    /// original values exactly.
    pub fn prolong(&self, time: TemporalGrid, space: SpatialMesh) -> Result<SolutionField> {
        if (time.horizon() - self.time.horizon()).abs() > 0.0 {
            return Err(Error::config("prolongation requires matching horizons"));
        }
        let t_ratio = dyadic_ratio(self.time.steps(), time.steps(), "time steps")?;
        let s_ratio = dyadic_ratio(self.space.interior() + 1, space.interior() + 1, "space cells")?;

        let mut field = self.clone();
        for _ in 0..s_ratio {
            field = field.refine_space_once();
        }
        for _ in 0..t_ratio {
            field = field.refine_time_once();
        }
        debug_assert_eq!(field.time.steps(), time.steps());
        debug_assert_eq!(field.space.interior(), space.interior());
        Ok(field)
    }

    fn refine_time_once(&self) -> SolutionField {
        let j = self.time.steps();
        let n = self.space.interior();
        let fine_time = TemporalGrid::new(2 * j, self.time.horizon()).expect("valid grid");
        let mut values = vec![0.0; (2 * j + 1) * n];
        for row in 0..=j {
            values[2 * row * n..(2 * row + 1) * n].copy_from_slice(self.row(row));
        }
        for row in 0..j {
            let (a, b) = (self.row(row), self.row(row + 1));
            let dst = &mut values[(2 * row + 1) * n..(2 * row + 2) * n];
            for i in 0..n {
                dst[i] = 0.5 * a[i] + 0.5 * b[i];
            }
        }
        SolutionField {
            time: fine_time,
            space: self.space,
            values,
        }
    }

    fn refine_space_once(&self) -> SolutionField {
        let j = self.time.steps();
        let n = self.space.interior();
        let n_fine = 2 * (n + 1) - 1;
        let fine_space = SpatialMesh::new(n_fine).expect("valid mesh");
        let mut values = vec![0.0; (j + 1) * n_fine];
        for row in 0..=j {
            let src = self.row(row);
            let dst = &mut values[row * n_fine..(row + 1) * n_fine];
            for (i, v) in src.iter().enumerate() {
                dst[2 * i + 1] = *v;
            }
            // midpoints; boundary values are zero
            dst[0] = 0.5 * src[0];
            dst[n_fine - 1] = 0.5 * src[n - 1];
            for i in 0..n - 1 {
                dst[2 * i + 2] = 0.5 * src[i] + 0.5 * src[i + 1];
            }
        }
        SolutionField {
            time: self.time,
            space: fine_space,
            values,
        }
    }
}

fn dyadic_ratio(coarse: usize, fine: usize, what: &str) -> Result<u32> {
    if coarse == 0 || fine % coarse != 0 {
        return Err(Error::config(format!(
            "{what} are not nested: {fine} is not a multiple of {coarse}"
        )));
    }
    let ratio = fine / coarse;
    if !ratio.is_power_of_two() {
        return Err(Error::config(format!(
            "{what} refine by {ratio}, which is not a power of two"
        )));
    }
    Ok(ratio.trailing_zeros())
}
