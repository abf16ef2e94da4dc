use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::solver::RunDiagnostics;

/// What the `y` values of a series represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum YKind {
    /// Dimensionless dot-average polarization.
    DotAveragePolarization,
    /// Exciton Zeeman splitting, µeV.
    ZeemanSplitting,
}

impl YKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            YKind::DotAveragePolarization => "dot_average_polarization",
            YKind::ZeemanSplitting => "zeeman_splitting_uev",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dot_average_polarization" => Some(YKind::DotAveragePolarization),
            "zeeman_splitting_uev" => Some(YKind::ZeemanSplitting),
            _ => None,
        }
    }
}

/// Time-stamped observable samples, measured or simulated.
#[derive(Debug, Clone, PartialEq)]
pub struct DecaySeries {
    points: Vec<(f64, f64)>,
    pub y_kind: YKind,
    pub metadata: BTreeMap<String, String>,
    /// Solver extremes, present for simulated series.
    pub diagnostics: Option<RunDiagnostics>,
}

impl DecaySeries {
    /// Requires a non-empty list with finite values and strictly increasing times.
    pub fn new(points: Vec<(f64, f64)>, y_kind: YKind) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSeries("series is empty".into()));
        }
        if let Some((t, y)) = points.iter().find(|(t, y)| !t.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidSeries(format!("non-finite sample ({t}, {y})")));
        }
        if let Some(w) = points.windows(2).find(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidSeries(format!(
                "times must be strictly increasing, got {} after {}",
                w[1].0, w[0].0
            )));
        }
        Ok(Self {
            points,
            y_kind,
            metadata: BTreeMap::new(),
            diagnostics: None,
        })
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    /// Series divided by its first value.
    pub fn normalized(&self) -> Result<Self> {
        let y0 = self.points[0].1;
        if y0 == 0.0 {
            return Err(Error::InvalidSeries("cannot normalize a series starting at 0".into()));
        }
        let mut out = self.clone();
        out.points.iter_mut().for_each(|p| p.1 /= y0);
        Ok(out)
    }

    /// Maps every value through `f`, keeping times and metadata.
    pub fn map_values(&self, y_kind: YKind, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        out.y_kind = y_kind;
        out.points.iter_mut().for_each(|p| p.1 = f(p.1));
        out
    }

    /// Linear interpolation, clamped to the end values outside the sampled range.
    pub fn interpolate(&self, t: f64) -> f64 {
        let p = &self.points;
        if t <= p[0].0 {
            return p[0].1;
        }
        if t >= p[p.len() - 1].0 {
            return p[p.len() - 1].1;
        }
        let k = p.partition_point(|q| q.0 <= t);
        let ((t0, y0), (t1, y1)) = (p[k - 1], p[k]);
        y0 + (y1 - y0) * (t - t0) / (t1 - t0)
    }

    /// First time the series falls to `level` or below, linearly interpolated.
    pub fn crossing_time(&self, level: f64) -> Option<f64> {
        let p = &self.points;
        if p[0].1 <= level {
            return Some(p[0].0);
        }
        p.windows(2).find(|w| w[1].1 <= level).map(|w| {
            let ((t0, y0), (t1, y1)) = (w[0], w[1]);
            t0 + (t1 - t0) * (y0 - level) / (y0 - y1)
        })
    }
}
