//! Cell-centred axisymmetric (r, z) grid.
//!
//! Cell `(i, j)` covers `[i·dr, (i+1)·dr] × [z_min + j·dz, z_min + (j+1)·dz]`.
//! Values are stored r-major with z contiguous: `index = i·nz + j`.

use crate::error::{Error, Result};
use crate::geometry::DotGeometry;

/// Smallest allowed ratio of domain extent to dot size.
pub const MIN_EXTENT_FACTOR: f64 = 5.0;
/// Extent factor used for production runs.
pub const DEFAULT_EXTENT_FACTOR: f64 = 20.0;
/// Default cell size in both directions, nm.
pub const DEFAULT_SPACING_NM: f64 = 0.5;

const MIN_CELLS: usize = 8;
const MIN_CELLS_ACROSS_RADIUS: f64 = 10.0;
const MIN_CELLS_ACROSS_HEIGHT: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nr: usize,
    nz: usize,
    dr: f64,
    dz: f64,
    z_min: f64,
}

/// Requested cell sizes in nm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub dr: f64,
    pub dz: f64,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            dr: DEFAULT_SPACING_NM,
            dz: DEFAULT_SPACING_NM,
        }
    }
}

impl Grid {
    pub fn new(nr: usize, nz: usize, dr: f64, dz: f64, z_min: f64) -> Result<Self> {
        if nr < MIN_CELLS || nz < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_CELLS} cells per direction, got nr = {nr}, nz = {nz}"
            )));
        }
        if !(dr > 0.0 && dz > 0.0) || !dr.is_finite() || !dz.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "spacings must be positive, got dr = {dr}, dz = {dz}"
            )));
        }
        if !z_min.is_finite() {
            return Err(Error::InvalidGrid("z_min must be finite".into()));
        }
        Ok(Self { nr, nz, dr, dz, z_min })
    }

    /// Uniform grid around `geometry`, symmetric in z about the dot mid-plane,
    /// reaching at least `extent_factor` dot radii/heights in each direction.
    pub fn around_dot(geometry: &DotGeometry, resolution: Resolution, extent_factor: f64) -> Result<Self> {
        let geometry = geometry.validate()?;
        if !(extent_factor >= MIN_EXTENT_FACTOR) {
            return Err(Error::ExtentTooSmall(extent_factor));
        }
        let Resolution { dr, dz } = resolution;
        if !(dr > 0.0 && dz > 0.0) || !dr.is_finite() || !dz.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "spacings must be positive, got dr = {dr}, dz = {dz}"
            )));
        }
        let cells_radius = geometry.radius / dr;
        let cells_height = geometry.height / dz;
        if cells_radius < MIN_CELLS_ACROSS_RADIUS - 1e-9 || cells_height < MIN_CELLS_ACROSS_HEIGHT - 1e-9 {
            return Err(Error::GridTooCoarse {
                cells_radius,
                cells_height,
            });
        }
        let nr = (extent_factor * geometry.radius / dr - 1e-9).ceil() as usize;
        let half_nz = (extent_factor * geometry.height / dz - 1e-9).ceil() as usize;
        Self::new(nr, 2 * half_nz, dr, dz, geometry.z_center - half_nz as f64 * dz)
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn r_max(&self) -> f64 {
        self.nr as f64 * self.dr
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_min + self.nz as f64 * self.dz
    }

    pub fn len(&self) -> usize {
        self.nr * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nz + j
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr
    }

    #[inline]
    pub fn z(&self, j: usize) -> f64 {
        self.z_min + (j as f64 + 0.5) * self.dz
    }

    /// Volume of ring cell `(i, ·)`, nm³.
    #[inline]
    pub fn cell_volume(&self, i: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.r(i) * self.dr * self.dz
    }

    /// Cells whose centres lie inside the dot.
    pub fn dot_mask(&self, geometry: &DotGeometry) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        for i in 0..self.nr {
            let r = self.r(i);
            if r >= geometry.radius {
                break;
            }
            for j in 0..self.nz {
                mask[self.index(i, j)] = geometry.contains(r, self.z(j));
            }
        }
        mask
    }

    /// Fails unless the dot lies within the domain and covers at least one cell centre.
    pub fn check_contains(&self, geometry: &DotGeometry) -> Result<()> {
        if geometry.radius > self.r_max() || geometry.z_bottom() < self.z_min() || geometry.z_top() > self.z_max() {
            return Err(Error::GeometryMismatch(format!(
                "dot r <= {}, z in [{}, {}] exceeds domain r <= {}, z in [{}, {}]",
                geometry.radius,
                geometry.z_bottom(),
                geometry.z_top(),
                self.r_max(),
                self.z_min(),
                self.z_max()
            )));
        }
        Ok(())
    }
}
