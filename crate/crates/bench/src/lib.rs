//! Fixtures shared by the criterion benches in `benches/`.

use spindiff_core::grid::DEFAULT_EXTENT_FACTOR;
use spindiff_core::{DotGeometry, Grid, PolarizationField, Resolution};

/// Default dot and grid: 0.5 nm cells out to twenty dot sizes.
pub fn default_setup() -> (DotGeometry, Grid) {
    let dot = DotGeometry::default();
    let grid = Grid::around_dot(&dot, Resolution::default(), DEFAULT_EXTENT_FACTOR).expect("default grid is valid");
    (dot, grid)
}

/// Default dot on a grid extending `extent` dot sizes.
pub fn compact_setup(extent: f64) -> (DotGeometry, Grid) {
    let dot = DotGeometry::default();
    let grid = Grid::around_dot(&dot, Resolution::default(), extent).expect("grid is valid");
    (dot, grid)
}

/// A smooth field with a pumped dot, so steps do non-trivial work.
pub fn pumped_field(dot: &DotGeometry, grid: &Grid) -> PolarizationField {
    PolarizationField::from_fn(grid, |r, z| {
        if dot.contains(r, z) {
            1.0
        } else {
            (-(r * r + z * z) / 400.0).exp()
        }
    })
}
