//! Pulse-sequence driver: erase, pump, dark and probe segments run against
//! the diffusion solver.

use crate::error::{Error, Result};
use crate::field::PolarizationField;
use crate::geometry::DotGeometry;
use crate::grid::Grid;
use crate::pulse::{Illumination, PulseSequence, SegmentKind};
use crate::series::{DecaySeries, YKind};
use crate::solver::{DiffusionSolver, RunDiagnostics, SolverConfig};

/// A field evolving under one solver configuration, with the dot it is read out on.
#[derive(Debug, Clone)]
pub struct Simulation {
    solver: DiffusionSolver,
    field: PolarizationField,
    geometry: DotGeometry,
}

impl Simulation {
    /// Unpolarized start.
    pub fn new(grid: &Grid, cfg: SolverConfig, geometry: DotGeometry) -> Result<Self> {
        Self::from_field(PolarizationField::zeros(grid), cfg, geometry)
    }

    pub fn from_field(field: PolarizationField, cfg: SolverConfig, geometry: DotGeometry) -> Result<Self> {
        let geometry = geometry.validate()?;
        field.grid().check_contains(&geometry)?;
        let solver = DiffusionSolver::new(field.grid(), cfg)?;
        Ok(Self {
            solver,
            field,
            geometry,
        })
    }

    pub fn field(&self) -> &PolarizationField {
        &self.field
    }

    pub fn into_field(self) -> PolarizationField {
        self.field
    }

    pub fn time(&self) -> f64 {
        self.field.time
    }

    pub fn diagnostics(&self) -> RunDiagnostics {
        self.solver.diagnostics()
    }

    pub fn dot_average(&self) -> Result<f64> {
        self.field.dot_average(&self.geometry)
    }

    /// Resets the polarization to zero everywhere and lets `duration` pass.
    pub fn erase(&mut self, duration: f64) {
        self.field.values_mut().iter_mut().for_each(|v| *v = 0.0);
        self.field.time += duration;
    }

    /// Sets the dot to S = 1 and evolves with the dot held there.
    pub fn pump(&mut self, duration: f64) -> Result<()> {
        let mask = self.field.grid().dot_mask(&self.geometry);
        for (v, m) in self.field.values_mut().iter_mut().zip(mask) {
            if m {
                *v = 1.0;
            }
        }
        self.solver.evolve(&mut self.field, duration, Some(&self.geometry))
    }

    /// Free evolution.
    pub fn dark(&mut self, duration: f64) -> Result<()> {
        self.solver.evolve(&mut self.field, duration, None)
    }

    /// Free evolution, recording the dot average at the given delays from now.
    /// Delays must be non-negative and strictly increasing.
    pub fn dark_sampled(&mut self, delays: &[f64]) -> Result<Vec<(f64, f64)>> {
        if delays.first().is_some_and(|&d| !(d >= 0.0)) || delays.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "sample delays must be >= 0 and strictly increasing".into(),
            ));
        }
        let start = self.field.time;
        let mut out = Vec::with_capacity(delays.len());
        for &delay in delays {
            let remaining = start + delay - self.field.time;
            if remaining > 0.0 {
                self.solver.evolve(&mut self.field, remaining, None)?;
            }
            self.field.time = start + delay;
            out.push((delay, self.dot_average()?));
        }
        Ok(out)
    }
}

/// Evenly spaced delays `0, every, 2·every, …` up to `t_max`, with `t_max`
/// appended when it is not on the cadence.
pub fn sample_times(t_max: f64, every: f64) -> Result<Vec<f64>> {
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "duration must be finite and >= 0, got {t_max}"
        )));
    }
    if !(every > 0.0) || !every.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sampling interval must be > 0, got {every}"
        )));
    }
    let n = (t_max / every + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|k| k as f64 * every).collect();
    let last = *times.last().expect("n >= 0");
    if t_max - last > 1e-9 * every {
        times.push(t_max);
    }
    Ok(times)
}

/// Starting from S ≡ 0, sets the dot to 1 and evolves for `t_pump` with
/// the dot clamped. The result is the initial condition of the dark phase.
pub fn simulate_pump(
    geometry: &DotGeometry,
    cfg: &SolverConfig,
    t_pump: f64,
    grid: &Grid,
) -> Result<PolarizationField> {
    if !(t_pump >= 0.0) {
        return Err(Error::InvalidArgument(format!("pump time must be >= 0, got {t_pump}")));
    }
    let mut sim = Simulation::new(grid, *cfg, *geometry)?;
    sim.pump(t_pump)?;
    let mut field = sim.into_field();
    field.time = 0.0;
    Ok(field)
}

/// Free evolution of `field` for `t_dark`, sampling the dot average every
/// `sample_every` seconds. Times are delays from the start of the dark phase.
pub fn simulate_dark(
    field: &PolarizationField,
    cfg: &SolverConfig,
    t_dark: f64,
    sample_every: f64,
    geometry: &DotGeometry,
) -> Result<DecaySeries> {
    let times = sample_times(t_dark, sample_every)?;
    sample_dark(field, cfg, &times, geometry)
}

/// Like [`simulate_dark`] with explicit sample delays.
pub fn sample_dark(
    field: &PolarizationField,
    cfg: &SolverConfig,
    delays: &[f64],
    geometry: &DotGeometry,
) -> Result<DecaySeries> {
    let mut sim = Simulation::from_field(field.clone(), *cfg, *geometry)?;
    let points = sim.dark_sampled(delays)?;
    let mut series = DecaySeries::new(points, YKind::DotAveragePolarization)?;
    series.diagnostics = Some(sim.diagnostics());
    Ok(series)
}

/// Runs a full pulse sequence from an unpolarized start.
///
/// Probe segments record `(time, dot average)` at their start and leave
/// the field untouched. With `dense_dark_every`, dark segments are also
/// sampled at that cadence (excluding their end point). Times are measured
/// from the start of the sequence.
pub fn run_sequence(
    seq: &PulseSequence,
    cfg: &SolverConfig,
    geometry: &DotGeometry,
    grid: &Grid,
    dense_dark_every: Option<f64>,
) -> Result<DecaySeries> {
    let mut sim = Simulation::new(grid, *cfg, *geometry)?;
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut pump_light = None;
    for segment in seq.segments() {
        match segment.kind {
            SegmentKind::Erase => sim.erase(segment.duration),
            SegmentKind::Pump => {
                pump_light = Some(segment.light);
                sim.pump(segment.duration)?;
            }
            SegmentKind::Dark => match dense_dark_every {
                Some(every) => {
                    let start = sim.time();
                    let delays: Vec<f64> = sample_times(segment.duration, every)?
                        .into_iter()
                        .filter(|&d| d < segment.duration - 1e-9 * every)
                        .collect();
                    for (d, y) in sim.dark_sampled(&delays)? {
                        points.push((start + d, y));
                    }
                    let left = start + segment.duration - sim.time();
                    sim.dark(left.max(0.0))?;
                    sim.field.time = start + segment.duration;
                }
                None => sim.dark(segment.duration)?,
            },
            SegmentKind::Probe => {
                points.push((sim.time(), sim.dot_average()?));
                sim.dark(segment.duration)?;
            }
        }
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "sequence produced no samples; add a probe segment".into(),
        ));
    }
    let mut series = DecaySeries::new(points, YKind::DotAveragePolarization)?;
    series.diagnostics = Some(sim.diagnostics());
    if let Some(light) = pump_light {
        let name = match light {
            Illumination::SigmaPlus => "sigma+",
            Illumination::SigmaMinus => "sigma-",
            _ => "linear",
        };
        series = series.with_metadata("helicity", name);
    }
    Ok(series)
}

/// Pump for `t_pump` with `cfg`, then sample the dark decay up to `t_max`.
/// The result is normalized so that its first value is 1.
pub fn simulate_decay_curve_with(
    cfg: &SolverConfig,
    t_pump: f64,
    t_max: f64,
    sample_every: f64,
    geometry: &DotGeometry,
    grid: &Grid,
) -> Result<DecaySeries> {
    if !(t_pump >= 0.0) {
        return Err(Error::InvalidArgument(format!("pump time must be >= 0, got {t_pump}")));
    }
    let delays = sample_times(t_max, sample_every)?;
    let mut sim = Simulation::new(grid, *cfg, *geometry)?;
    sim.pump(t_pump)?;
    sim.field.time = 0.0;
    let points = sim.dark_sampled(&delays)?;
    let mut series = DecaySeries::new(points, YKind::DotAveragePolarization)?.normalized()?;
    series.diagnostics = Some(sim.diagnostics());
    Ok(series.with_metadata("d_nm2s", format!("{}", cfg.d_qd)))
}

/// [`simulate_decay_curve_with`] for a diffusion coefficient in cm²/s and
/// default solver settings.
pub fn simulate_decay_curve(
    d_cm2_per_s: f64,
    t_pump: f64,
    t_max: f64,
    sample_every: f64,
    geometry: &DotGeometry,
    grid: &Grid,
) -> Result<DecaySeries> {
    let cfg = SolverConfig::from_cm2_per_s(d_cm2_per_s)?;
    simulate_decay_curve_with(&cfg, t_pump, t_max, sample_every, geometry, grid)
}
