//! Crank–Nicolson / Peaceman–Rachford ADI solver for `∂S/∂t = D ΔS` on the
//! axisymmetric cell-centred grid.
//!
//! The Laplacian is discretised in conservative finite-volume form,
//!
//! ```text
//! (1/r) ∂r(r ∂r S) ≈ [r⁺ (S[i+1] - S[i]) - r⁻ (S[i] - S[i-1])] / (r[i] dr²)
//! ```
//!
//! with face radii `r⁻ = i·dr`, `r⁺ = (i+1)·dr`. On the axis `r⁻ = 0`, which is
//! the zero-gradient ghost cell and reproduces the `2 ∂²r S` symmetry limit.
//! Outer faces are either held at zero (ghost value `-S`) or closed.
//!
//! A clamped dot is handled in one of two ways, see [`ClampMode`].

use crate::error::{Error, Result};
use crate::field::PolarizationField;
use crate::geometry::DotGeometry;
use crate::grid::Grid;
use crate::units::convert_diffusion;

/// Upper bound on the automatic time step, s.
pub const MAX_AUTO_DT_S: f64 = 0.01;
/// Diffusion floor used when choosing the automatic time step, nm²/s.
const AUTO_DT_D_FLOOR: f64 = 1e-12;
/// Largest excursion outside [0, 1] still counted as round-off.
pub const BOUNDS_SLACK: f64 = 1e-12;

/// Condition on the outer faces of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// S = 0 on the face.
    DirichletZero,
    /// Zero flux through the face. Only meant for conservation tests.
    Reflective,
}

/// Boundary conditions at `r = r_max` and at `z_min`/`z_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Boundaries {
    pub radial: Boundary,
    pub axial: Boundary,
}

impl Boundaries {
    pub const DIRICHLET: Self = Self {
        radial: Boundary::DirichletZero,
        axial: Boundary::DirichletZero,
    };
    pub const REFLECTIVE: Self = Self {
        radial: Boundary::Reflective,
        axial: Boundary::Reflective,
    };
}

impl Default for Boundaries {
    fn default() -> Self {
        Self::DIRICHLET
    }
}

/// How a pumped dot is held at S = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClampMode {
    /// Dot cells are fixed rows of the implicit solves and their neighbours
    /// see S = 1 on the dot surface (half a cell away). Second order in
    /// space and time.
    #[default]
    SurfaceCoupled,
    /// Free step followed by a reset of the dot cells to 1. Puts the
    /// effective dot surface half a cell inside and adds an O(dt) error.
    Projection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Diffusion coefficient, nm²/s.
    pub d_qd: f64,
    /// Uniform relaxation time, s.
    pub t1_uniform: Option<f64>,
    /// Fixed time step, s. `None` picks one from the grid, see [`SolverConfig::time_step`].
    pub dt: Option<f64>,
    pub boundaries: Boundaries,
    pub clamp_mode: ClampMode,
}

impl SolverConfig {
    pub fn new(d_qd_nm2_per_s: f64) -> Self {
        Self {
            d_qd: d_qd_nm2_per_s,
            t1_uniform: None,
            dt: None,
            boundaries: Boundaries::default(),
            clamp_mode: ClampMode::default(),
        }
    }

    pub fn from_cm2_per_s(d_cm2_per_s: f64) -> Result<Self> {
        Ok(Self::new(convert_diffusion(d_cm2_per_s)?))
    }

    pub fn with_t1(mut self, t1: f64) -> Self {
        self.t1_uniform = Some(t1);
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_boundaries(mut self, boundaries: Boundaries) -> Self {
        self.boundaries = boundaries;
        self
    }

    pub fn with_clamp_mode(mut self, mode: ClampMode) -> Self {
        self.clamp_mode = mode;
        self
    }

    pub fn validate(self) -> Result<Self> {
        if !(self.d_qd >= 0.0) || !self.d_qd.is_finite() {
            return Err(Error::NegativeDiffusion(self.d_qd));
        }
        if let Some(t1) = self.t1_uniform {
            if !(t1 > 0.0) {
                return Err(Error::InvalidSolverConfig(format!("t1_uniform must be > 0, got {t1}")));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(Error::InvalidSolverConfig(format!("dt must be > 0, got {dt}")));
            }
        }
        Ok(self)
    }

    /// The explicit step if one was given, otherwise
    /// `min(dr, dz)² / (2 max(D, ε))` capped at [`MAX_AUTO_DT_S`].
    /// Never larger than `sample_every` when that is given.
    pub fn time_step(&self, grid: &Grid, sample_every: Option<f64>) -> f64 {
        let dt = self.dt.unwrap_or_else(|| {
            let h = grid.dr().min(grid.dz());
            (h * h / (2.0 * self.d_qd.max(AUTO_DT_D_FLOOR))).min(MAX_AUTO_DT_S)
        });
        match sample_every {
            Some(s) if s > 0.0 => dt.min(s),
            _ => dt,
        }
    }
}

/// Tridiagonal coefficients of one directional operator, without the factor D.
#[derive(Debug, Clone)]
struct AxisCoeffs {
    lo: Vec<f64>,
    diag: Vec<f64>,
    up: Vec<f64>,
}

/// Both directional operators plus the constant source from a clamped surface.
#[derive(Debug, Clone)]
struct SplitOperator {
    radial: AxisCoeffs,
    axial: AxisCoeffs,
    source: Vec<f64>,
    fixed: Option<Vec<bool>>,
}

impl SplitOperator {
    fn build(grid: &Grid, boundaries: Boundaries, fixed: Option<Vec<bool>>) -> Self {
        let (nr, nz, n) = (grid.nr(), grid.nz(), grid.len());
        let mut radial = AxisCoeffs {
            lo: vec![0.0; n],
            diag: vec![0.0; n],
            up: vec![0.0; n],
        };
        let mut axial = radial.clone();
        let mut source = vec![0.0; n];
        let is_fixed = |k: usize| fixed.as_ref().is_some_and(|m| m[k]);
        let (dr2, dz2) = (grid.dr() * grid.dr(), grid.dz() * grid.dz());

        for i in 0..nr {
            let r = grid.r(i);
            let west = i as f64 * grid.dr() / (r * dr2);
            let east = (i + 1) as f64 * grid.dr() / (r * dr2);
            for j in 0..nz {
                let k = grid.index(i, j);
                if is_fixed(k) {
                    continue;
                }
                // West neighbour; the axis face carries no flux.
                if i > 0 {
                    if is_fixed(k - nz) {
                        radial.diag[k] -= 2.0 * west;
                        source[k] += 2.0 * west;
                    } else {
                        radial.diag[k] -= west;
                        radial.lo[k] = west;
                    }
                }
                if i + 1 < nr {
                    if is_fixed(k + nz) {
                        radial.diag[k] -= 2.0 * east;
                        source[k] += 2.0 * east;
                    } else {
                        radial.diag[k] -= east;
                        radial.up[k] = east;
                    }
                } else if boundaries.radial == Boundary::DirichletZero {
                    radial.diag[k] -= 2.0 * east;
                }

                let c = 1.0 / dz2;
                for (neighbour, is_lo) in [(j.checked_sub(1), true), ((j + 1 < nz).then_some(j + 1), false)] {
                    match neighbour {
                        None => {
                            if boundaries.axial == Boundary::DirichletZero {
                                axial.diag[k] -= 2.0 * c;
                            }
                        }
                        Some(jn) if is_fixed(grid.index(i, jn)) => {
                            axial.diag[k] -= 2.0 * c;
                            source[k] += 2.0 * c;
                        }
                        Some(_) => {
                            axial.diag[k] -= c;
                            if is_lo {
                                axial.lo[k] = c;
                            } else {
                                axial.up[k] = c;
                            }
                        }
                    }
                }
            }
        }
        Self {
            radial,
            axial,
            source,
            fixed,
        }
    }
}

/// Running extremes of the field over every completed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunDiagnostics {
    pub steps: usize,
    pub min_value: f64,
    pub max_value: f64,
}

impl Default for RunDiagnostics {
    fn default() -> Self {
        Self {
            steps: 0,
            min_value: f64::INFINITY,
            max_value: f64::NEG_INFINITY,
        }
    }
}

impl RunDiagnostics {
    /// True if the field never left [0, 1] beyond round-off.
    pub fn within_unit_interval(&self) -> bool {
        self.steps == 0 || (self.min_value >= -BOUNDS_SLACK && self.max_value <= 1.0 + BOUNDS_SLACK)
    }

    pub fn merge(&mut self, other: &RunDiagnostics) {
        self.steps += other.steps;
        self.min_value = self.min_value.min(other.min_value);
        self.max_value = self.max_value.max(other.max_value);
    }
}

/// Reusable stepper for one grid and solver configuration.
///
/// Operators are built lazily: one for free evolution and one per clamp
/// geometry last used.
#[derive(Debug, Clone)]
pub struct DiffusionSolver {
    grid: Grid,
    cfg: SolverConfig,
    free: Option<SplitOperator>,
    clamped: Option<(DotGeometry, SplitOperator)>,
    rhs: Vec<f64>,
    work: Vec<f64>,
    diagnostics: RunDiagnostics,
}

impl DiffusionSolver {
    pub fn new(grid: &Grid, cfg: SolverConfig) -> Result<Self> {
        let cfg = cfg.validate()?;
        Ok(Self {
            grid: grid.clone(),
            cfg,
            free: None,
            clamped: None,
            rhs: vec![0.0; grid.len()],
            work: vec![0.0; grid.len()],
            diagnostics: RunDiagnostics::default(),
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn diagnostics(&self) -> RunDiagnostics {
        self.diagnostics
    }

    fn operator(&mut self, clamp: Option<&DotGeometry>) -> Result<()> {
        match clamp {
            Some(dot) if self.cfg.clamp_mode == ClampMode::SurfaceCoupled => {
                if self.clamped.as_ref().map(|(g, _)| g) != Some(dot) {
                    self.grid.check_contains(dot)?;
                    let mask = self.grid.dot_mask(dot);
                    let op = SplitOperator::build(&self.grid, self.cfg.boundaries, Some(mask));
                    self.clamped = Some((*dot, op));
                }
            }
            Some(dot) => {
                self.grid.check_contains(dot)?;
                if self.free.is_none() {
                    self.free = Some(SplitOperator::build(&self.grid, self.cfg.boundaries, None));
                }
            }
            None => {
                if self.free.is_none() {
                    self.free = Some(SplitOperator::build(&self.grid, self.cfg.boundaries, None));
                }
            }
        }
        Ok(())
    }

    /// Advances `field` by `dt` seconds, holding `clamp` at S = 1 if given.
    pub fn advance(&mut self, field: &mut PolarizationField, dt: f64, clamp: Option<&DotGeometry>) -> Result<()> {
        if field.grid() != &self.grid {
            return Err(Error::InvalidArgument("field and solver use different grids".into()));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidSolverConfig(format!("dt must be > 0, got {dt}")));
        }
        self.operator(clamp)?;
        let mask = match clamp {
            Some(dot) => Some(self.grid.dot_mask(dot)),
            None => None,
        };
        let coupled = clamp.is_some() && self.cfg.clamp_mode == ClampMode::SurfaceCoupled;
        let op = if coupled {
            &self.clamped.as_ref().expect("built above").1
        } else {
            self.free.as_ref().expect("built above")
        };

        let values = field.values_mut();
        if let Some(m) = &op.fixed {
            for (v, &f) in values.iter_mut().zip(m) {
                if f {
                    *v = 1.0;
                }
            }
        }
        if self.cfg.d_qd > 0.0 {
            let theta = 0.5 * self.cfg.d_qd * dt;
            let (nr, nz) = (self.grid.nr(), self.grid.nz());
            // Half step 1: implicit in r, explicit in z.
            explicit_axial(op, theta, values, &mut self.rhs, nz);
            solve_radial(&op.radial, theta, &mut self.rhs, &mut self.work, nr, nz);
            // Half step 2: implicit in z, explicit in r.
            explicit_radial(op, theta, &self.rhs, values, nr, nz);
            solve_axial(&op.axial, theta, values, &mut self.work, nr, nz);
        }

        if let Some(t1) = self.cfg.t1_uniform {
            let decay = (-dt / t1).exp();
            match &mask {
                Some(m) => values
                    .iter_mut()
                    .zip(m)
                    .filter(|(_, &f)| !f)
                    .for_each(|(v, _)| *v *= decay),
                None => values.iter_mut().for_each(|v| *v *= decay),
            }
        }
        if let Some(m) = &mask {
            for (v, &f) in values.iter_mut().zip(m) {
                if f {
                    *v = 1.0;
                }
            }
        }

        let (lo, hi, finite) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY, true), |(lo, hi, ok), &v| {
                (lo.min(v), hi.max(v), ok && v.is_finite())
            });
        field.time += dt;
        if !finite {
            return Err(Error::NumericalBlowup { time: field.time });
        }
        self.diagnostics.merge(&RunDiagnostics {
            steps: 1,
            min_value: lo,
            max_value: hi,
        });
        Ok(())
    }

    /// Advances by `duration` using the configured step, shortening the last
    /// step so the clock lands exactly on `field.time + duration`.
    pub fn evolve(&mut self, field: &mut PolarizationField, duration: f64, clamp: Option<&DotGeometry>) -> Result<()> {
        if !(duration >= 0.0) {
            return Err(Error::InvalidArgument(format!("duration must be >= 0, got {duration}")));
        }
        let dt = self.cfg.time_step(&self.grid, None);
        let n = (duration / dt - 1e-9).ceil().max(0.0) as usize;
        if n == 0 {
            return Ok(());
        }
        let start = field.time;
        let h = duration / n as f64;
        for s in 0..n {
            self.advance(field, h, clamp)?;
            field.time = start + (s + 1) as f64 * h;
        }
        Ok(())
    }
}

/// One step of `cfg` applied to a copy of `field`.
pub fn step(field: &PolarizationField, cfg: &SolverConfig, clamp: Option<&DotGeometry>) -> Result<PolarizationField> {
    let mut solver = DiffusionSolver::new(field.grid(), *cfg)?;
    let dt = cfg.time_step(field.grid(), None);
    let mut next = field.clone();
    solver.advance(&mut next, dt, clamp)?;
    Ok(next)
}

/// `out = S + θ (A_z S + source)`; fixed cells copy through.
fn explicit_axial(op: &SplitOperator, theta: f64, s: &[f64], out: &mut [f64], nz: usize) {
    let a = &op.axial;
    for ((row_out, row_s), base) in out.chunks_exact_mut(nz).zip(s.chunks_exact(nz)).zip((0..).step_by(nz)) {
        for j in 0..nz {
            let k = base + j;
            let mut l = a.diag[k] * row_s[j] + op.source[k];
            if j > 0 {
                l += a.lo[k] * row_s[j - 1];
            }
            if j + 1 < nz {
                l += a.up[k] * row_s[j + 1];
            }
            row_out[j] = row_s[j] + theta * l;
        }
    }
}

/// `out = S + θ (A_r S + source)`.
fn explicit_radial(op: &SplitOperator, theta: f64, s: &[f64], out: &mut [f64], nr: usize, nz: usize) {
    let a = &op.radial;
    for i in 0..nr {
        for j in 0..nz {
            let k = i * nz + j;
            let mut l = a.diag[k] * s[k] + op.source[k];
            if i > 0 {
                l += a.lo[k] * s[k - nz];
            }
            if i + 1 < nr {
                l += a.up[k] * s[k + nz];
            }
            out[k] = s[k] + theta * l;
        }
    }
}

/// Solves `(I - θ A_r) x = rhs` for every z column at once, in place.
/// Thomas sweep over i with the j loop innermost so memory stays contiguous.
fn solve_radial(a: &AxisCoeffs, theta: f64, rhs: &mut [f64], cp: &mut [f64], nr: usize, nz: usize) {
    for j in 0..nz {
        let b = 1.0 - theta * a.diag[j];
        cp[j] = -theta * a.up[j] / b;
        rhs[j] /= b;
    }
    for i in 1..nr {
        let (prev, cur) = rhs.split_at_mut(i * nz);
        let prev = &prev[(i - 1) * nz..];
        let cur = &mut cur[..nz];
        let (cp_prev, cp_cur) = cp.split_at_mut(i * nz);
        let cp_prev = &cp_prev[(i - 1) * nz..];
        let cp_cur = &mut cp_cur[..nz];
        let base = i * nz;
        for j in 0..nz {
            let k = base + j;
            let lo = -theta * a.lo[k];
            let m = 1.0 - theta * a.diag[k] - lo * cp_prev[j];
            cp_cur[j] = -theta * a.up[k] / m;
            cur[j] = (cur[j] - lo * prev[j]) / m;
        }
    }
    for i in (0..nr - 1).rev() {
        let (cur, next) = rhs.split_at_mut((i + 1) * nz);
        let cur = &mut cur[i * nz..];
        let next = &next[..nz];
        let cp_cur = &cp[i * nz..(i + 1) * nz];
        for j in 0..nz {
            cur[j] -= cp_cur[j] * next[j];
        }
    }
}

/// Solves `(I - θ A_z) x = rhs` along each contiguous z line, in place.
fn solve_axial(a: &AxisCoeffs, theta: f64, rhs: &mut [f64], cp: &mut [f64], nr: usize, nz: usize) {
    for i in 0..nr {
        let base = i * nz;
        let d = &mut rhs[base..base + nz];
        let c = &mut cp[base..base + nz];
        let b0 = 1.0 - theta * a.diag[base];
        c[0] = -theta * a.up[base] / b0;
        d[0] /= b0;
        for j in 1..nz {
            let k = base + j;
            let lo = -theta * a.lo[k];
            let m = 1.0 - theta * a.diag[k] - lo * c[j - 1];
            c[j] = -theta * a.up[k] / m;
            d[j] = (d[j] - lo * d[j - 1]) / m;
        }
        for j in (0..nz - 1).rev() {
            d[j] -= c[j] * d[j + 1];
        }
    }
}
