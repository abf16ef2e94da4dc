//! Single-exponential fits by variable projection: for a trial time constant
//! the amplitude (and offset) follow from linear least squares, leaving a
//! one-dimensional search over log τ.

use super::{affine_least_squares, golden::golden_section_min, is_flat};
use crate::error::{Error, Result};
use crate::series::DecaySeries;

const SCAN_POINTS: usize = 400;
const LOG_TAU_TOL: f64 = 1e-12;
const FLAT_REL: f64 = 1e-12;

/// `y(t) = offset + amplitude·(1 − exp(−t/τ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiseFit {
    pub amplitude: f64,
    /// s.
    pub tau: f64,
    pub offset: f64,
    pub residual_rms: f64,
}

impl RiseFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.offset + self.amplitude * (1.0 - (-t / self.tau).exp())
    }
}

/// `y(t) = amplitude·exp(−t/τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub amplitude: f64,
    /// s.
    pub tau: f64,
    pub residual_rms: f64,
}

impl DecayFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (-t / self.tau).exp()
    }
}

/// Minimizes `sse(log10 τ)` over a log grid spanning the sampling scales,
/// then refines around the best grid point.
fn search_tau(times: &[f64], sse: impl Fn(f64) -> f64) -> Result<f64> {
    let span = times[times.len() - 1] - times[0];
    let min_step = times.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let (lo, hi) = ((min_step / 10.0).log10(), (span * 100.0).log10());
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| lo + (hi - lo) * k as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| sse(10f64.powf(x))).collect();
    let best = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .ok_or_else(|| Error::FitDiverged("objective is not finite anywhere".into()))?;
    if best == 0 || best == SCAN_POINTS - 1 {
        return Err(Error::FitDiverged(format!(
            "time constant runs to the edge of the searchable range [{:.3e}, {:.3e}] s",
            10f64.powf(lo),
            10f64.powf(hi)
        )));
    }
    let (x, _) = golden_section_min(|x| sse(10f64.powf(x)), grid[best - 1], grid[best + 1], LOG_TAU_TOL, 200);
    Ok(10f64.powf(x))
}

fn check_input(series: &DecaySeries, min_points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if series.len() < min_points {
        return Err(Error::InvalidSeries(format!(
            "need at least {min_points} points, got {}",
            series.len()
        )));
    }
    let (t, y) = (series.times(), series.values());
    if is_flat(&y, FLAT_REL) {
        return Err(Error::NotIdentifiable("series is constant".into()));
    }
    Ok((t, y))
}

/// Least-squares fit of `offset + amplitude·(1 − exp(−t/τ))`.
pub fn fit_exponential_rise(series: &DecaySeries) -> Result<RiseFit> {
    let (t, y) = check_input(series, 4)?;
    let basis = |tau: f64| -> Vec<f64> { t.iter().map(|&ti| 1.0 - (-ti / tau).exp()).collect() };
    let tau = search_tau(&t, |tau| affine_least_squares(&basis(tau), &y).2)?;
    let (amplitude, offset, sse) = affine_least_squares(&basis(tau), &y);
    Ok(RiseFit {
        amplitude,
        tau,
        offset,
        residual_rms: (sse / t.len() as f64).sqrt(),
    })
}

/// Least-squares fit of `amplitude·exp(−t/τ)`.
pub fn fit_exponential_decay(series: &DecaySeries) -> Result<DecayFit> {
    let (t, y) = check_input(series, 3)?;
    let solve = |tau: f64| -> (f64, f64) {
        let g: Vec<f64> = t.iter().map(|&ti| (-ti / tau).exp()).collect();
        let gg: f64 = g.iter().map(|v| v * v).sum();
        let a = if gg > 0.0 {
            g.iter().zip(&y).map(|(gi, yi)| gi * yi).sum::<f64>() / gg
        } else {
            0.0
        };
        let sse = g.iter().zip(&y).map(|(gi, yi)| (yi - a * gi).powi(2)).sum();
        (a, sse)
    };
    let tau = search_tau(&t, |tau| solve(tau).1)?;
    let (amplitude, sse) = solve(tau);
    Ok(DecayFit {
        amplitude,
        tau,
        residual_rms: (sse / t.len() as f64).sqrt(),
    })
}
