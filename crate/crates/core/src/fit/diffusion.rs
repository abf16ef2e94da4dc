//! Diffusion-coefficient fit.
//!
//! For each trial D the normalized dot-average decay `P(t; D)` is simulated
//! and `y ≈ offset + scale·P` is solved by linear least squares. The residual
//! is minimized over log10 D: a coarse grid first, then golden-section
//! refinement around the best grid point.

use std::collections::HashMap;

use super::{affine_least_squares, golden::golden_section_min, is_flat};
use crate::error::{Error, Result};
use crate::geometry::DotGeometry;
use crate::grid::Grid;
use crate::protocol::Simulation;
use crate::series::DecaySeries;
use crate::solver::SolverConfig;
use crate::units::convert_diffusion;

/// Relative SSE spread below which the objective counts as flat.
const FLAT_OBJECTIVE_REL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Coarse grid density in log10 D; at least 8.
    pub points_per_decade: usize,
    /// Width of the final golden-section bracket, decades.
    pub log_tolerance: f64,
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            points_per_decade: 8,
            log_tolerance: 1e-3,
            max_iter: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitWarning {
    /// The minimizer sits on a search bound; the true optimum may lie outside.
    BoundaryMinimum,
}

impl FitWarning {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitWarning::BoundaryMinimum => "boundary_minimum",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionFit {
    /// cm²/s.
    pub d_qd: f64,
    /// Change of the observable for unit dot polarization.
    pub scale: f64,
    /// Observable at zero dot polarization.
    pub offset: f64,
    pub sse: f64,
    /// Coarse candidates examined, cm²/s.
    pub d_grid: Vec<f64>,
    /// SSE at each coarse candidate.
    pub grid_sse: Vec<f64>,
    pub warnings: Vec<FitWarning>,
}

impl DiffusionFit {
    pub fn at_boundary(&self) -> bool {
        self.warnings.contains(&FitWarning::BoundaryMinimum)
    }
}

/// Simulated pump/dark protocol for a fixed geometry and grid, caching
/// decay curves by diffusion coefficient and sample delays.
#[derive(Debug, Clone)]
pub struct ForwardModel {
    geometry: DotGeometry,
    grid: Grid,
    t_pump: f64,
    template: SolverConfig,
    cache: HashMap<(u64, Vec<u64>), Vec<f64>>,
}

impl ForwardModel {
    pub fn new(geometry: DotGeometry, grid: Grid, t_pump: f64) -> Result<Self> {
        let geometry = geometry.validate()?;
        grid.check_contains(&geometry)?;
        if !(t_pump >= 0.0) || !t_pump.is_finite() {
            return Err(Error::InvalidArgument(format!("pump time must be >= 0, got {t_pump}")));
        }
        Ok(Self {
            geometry,
            grid,
            t_pump,
            template: SolverConfig::new(0.0),
            cache: HashMap::new(),
        })
    }

    /// Solver settings other than D (relaxation, time step, boundaries) for every candidate.
    pub fn with_solver(mut self, template: SolverConfig) -> Self {
        self.template = template;
        self.cache.clear();
        self
    }

    pub fn cached_curves(&self) -> usize {
        self.cache.len()
    }

    /// Normalized dot-average decay at the given dark delays for `d_cm2_per_s`.
    pub fn curve(&mut self, d_cm2_per_s: f64, delays: &[f64]) -> Result<Vec<f64>> {
        let key = (
            d_cm2_per_s.to_bits(),
            delays.iter().map(|d| d.to_bits()).collect::<Vec<_>>(),
        );
        if let Some(c) = self.cache.get(&key) {
            return Ok(c.clone());
        }
        let cfg = SolverConfig {
            d_qd: convert_diffusion(d_cm2_per_s)?,
            ..self.template
        };
        let mut sim = Simulation::new(&self.grid, cfg, self.geometry)?;
        sim.pump(self.t_pump)?;
        let p0 = sim.dot_average()?;
        let curve: Vec<f64> = sim.dark_sampled(delays)?.into_iter().map(|(_, p)| p / p0).collect();
        self.cache.insert(key, curve.clone());
        Ok(curve)
    }

    /// Inner linear solve for one candidate: `(scale, offset, sse)`.
    pub fn objective(&mut self, d_cm2_per_s: f64, measured: &DecaySeries) -> Result<(f64, f64, f64)> {
        let p = self.curve(d_cm2_per_s, &measured.times())?;
        Ok(affine_least_squares(&p, &measured.values()))
    }

    pub fn fit(&mut self, measured: &DecaySeries, d_bounds: (f64, f64), opts: FitOptions) -> Result<DiffusionFit> {
        if measured.len() < 5 {
            return Err(Error::InvalidSeries(format!(
                "need at least 5 points, got {}",
                measured.len()
            )));
        }
        if measured.points()[0].0 < 0.0 {
            return Err(Error::InvalidSeries("dark delays must be >= 0".into()));
        }
        let (d_min, d_max) = d_bounds;
        if !(d_min > 0.0 && d_max > d_min && d_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < d_min < d_max, got [{d_min}, {d_max}]"
            )));
        }
        if opts.points_per_decade < 8 {
            return Err(Error::InvalidArgument(
                "coarse grid needs at least 8 points per decade".into(),
            ));
        }
        let (lo, hi) = (d_min.log10(), d_max.log10());
        let n = ((opts.points_per_decade as f64 * (hi - lo)).ceil() as usize).max(2) + 1;
        let log_grid: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();

        let grid_sse = log_grid
            .iter()
            .map(|&x| self.objective(10f64.powf(x), measured).map(|o| o.2))
            .collect::<Result<Vec<f64>>>()?;
        let max_sse = grid_sse.iter().cloned().fold(0.0, f64::max);
        if max_sse == 0.0 || is_flat(&grid_sse, FLAT_OBJECTIVE_REL) {
            return Err(Error::NotIdentifiable(
                "objective is flat across all candidate diffusion coefficients".into(),
            ));
        }
        let best = grid_sse
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .expect("grid is non-empty");

        let (a, b) = (log_grid[best.saturating_sub(1)], log_grid[(best + 1).min(n - 1)]);
        let mut failure = None;
        let (x_refined, sse_refined) = golden_section_min(
            |x| match self.objective(10f64.powf(x), measured) {
                Ok(o) => o.2,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            },
            a,
            b,
            opts.log_tolerance,
            opts.max_iter,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let x = if sse_refined <= grid_sse[best] {
            x_refined
        } else {
            log_grid[best]
        };
        let d_qd = 10f64.powf(x);
        let (scale, offset, sse) = self.objective(d_qd, measured)?;

        let mut warnings = Vec::new();
        if x - lo <= opts.log_tolerance || hi - x <= opts.log_tolerance {
            warnings.push(FitWarning::BoundaryMinimum);
        }
        Ok(DiffusionFit {
            d_qd,
            scale,
            offset,
            sse,
            d_grid: log_grid.iter().map(|&x| 10f64.powf(x)).collect(),
            grid_sse,
            warnings,
        })
    }
}

/// Fits D (cm²/s) within `d_bounds` to a measured decay whose times are
/// dark delays after a pump of `t_pump` seconds.
pub fn fit_diffusion_coefficient(
    measured: &DecaySeries,
    t_pump: f64,
    geometry: &DotGeometry,
    grid: &Grid,
    d_bounds: (f64, f64),
) -> Result<DiffusionFit> {
    ForwardModel::new(*geometry, grid.clone(), t_pump)?.fit(measured, d_bounds, FitOptions::default())
}
