use crate::error::{Error, Result};
use crate::geometry::DotGeometry;
use crate::grid::Grid;

/// Dimensionless nuclear polarization on an axisymmetric grid, with the
/// simulation clock it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationField {
    grid: Grid,
    values: Vec<f64>,
    /// Simulation time, s.
    pub time: f64,
}

impl PolarizationField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
            time: 0.0,
        }
    }

    pub fn uniform(grid: &Grid, value: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![value; grid.len()],
            time: 0.0,
        }
    }

    /// 1 in cells whose centres are inside the dot, 0 elsewhere.
    pub fn dot_indicator(grid: &Grid, geometry: &DotGeometry) -> Self {
        let values = grid
            .dot_mask(geometry)
            .into_iter()
            .map(|m| if m { 1.0 } else { 0.0 })
            .collect();
        Self {
            grid: grid.clone(),
            values,
            time: 0.0,
        }
    }

    /// Field sampled from `f(r, z)` at cell centres.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nr() {
            let r = grid.r(i);
            for j in 0..grid.nz() {
                values.push(f(r, grid.z(j)));
            }
        }
        Self {
            grid: grid.clone(),
            values,
            time: 0.0,
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values for the grid, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
            time: 0.0,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Polarization at an arbitrary point, bilinear between cell centres
    /// (clamped to the outermost centres).
    pub fn sample(&self, r: f64, z: f64) -> f64 {
        let g = &self.grid;
        let fi = ((r / g.dr()) - 0.5).clamp(0.0, (g.nr() - 1) as f64);
        let fj = (((z - g.z_min()) / g.dz()) - 0.5).clamp(0.0, (g.nz() - 1) as f64);
        let i0 = (fi.floor() as usize).min(g.nr() - 2);
        let j0 = (fj.floor() as usize).min(g.nz() - 2);
        let (wi, wj) = (fi - i0 as f64, fj - j0 as f64);
        let v = |i, j| self.at(i, j);
        (1.0 - wi) * ((1.0 - wj) * v(i0, j0) + wj * v(i0, j0 + 1))
            + wi * ((1.0 - wj) * v(i0 + 1, j0) + wj * v(i0 + 1, j0 + 1))
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Volume-weighted mean over the cells whose centres lie in the dot.
    pub fn dot_average(&self, geometry: &DotGeometry) -> Result<f64> {
        self.grid.check_contains(geometry)?;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..self.grid.nr() {
            let r = self.grid.r(i);
            if r >= geometry.radius {
                break;
            }
            let w = self.grid.cell_volume(i);
            for j in 0..self.grid.nz() {
                if geometry.contains(r, self.grid.z(j)) {
                    num += w * self.values[self.grid.index(i, j)];
                    den += w;
                }
            }
        }
        if den == 0.0 {
            return Err(Error::GeometryMismatch("dot covers no cell centre".into()));
        }
        Ok(num / den)
    }

    /// ∫ S dV over the whole domain, nm³.
    pub fn total_spin(&self) -> f64 {
        let nz = self.grid.nz();
        (0..self.grid.nr())
            .map(|i| self.grid.cell_volume(i) * self.values[i * nz..(i + 1) * nz].iter().sum::<f64>())
            .sum()
    }
}
