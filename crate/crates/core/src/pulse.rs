//! Optical pulse sequences.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    Erase,
    Pump,
    Dark,
    Probe,
}

/// Light carried by a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Illumination {
    SigmaPlus,
    SigmaMinus,
    Linear,
    /// No light at all (dark delay).
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSegment {
    pub kind: SegmentKind,
    /// Duration in s.
    pub duration: f64,
    pub light: Illumination,
}

/// Length of the linearly polarized erase pulse, s.
pub const ERASE_DURATION_S: f64 = 10.0;
/// Default circularly polarized pump length, s.
pub const PUMP_DURATION_S: f64 = 10.0;
/// Probe length, s.
pub const PROBE_DURATION_S: f64 = 0.1;

impl PulseSegment {
    pub fn erase(duration: f64) -> Self {
        Self {
            kind: SegmentKind::Erase,
            duration,
            light: Illumination::Linear,
        }
    }

    pub fn pump(duration: f64, light: Illumination) -> Self {
        Self {
            kind: SegmentKind::Pump,
            duration,
            light,
        }
    }

    pub fn dark(duration: f64) -> Self {
        Self {
            kind: SegmentKind::Dark,
            duration,
            light: Illumination::Off,
        }
    }

    pub fn probe() -> Self {
        Self {
            kind: SegmentKind::Probe,
            duration: PROBE_DURATION_S,
            light: Illumination::Linear,
        }
    }

    pub fn validate(self) -> Result<Self> {
        if !(self.duration >= 0.0) || !self.duration.is_finite() {
            return Err(Error::InvalidSegment(format!(
                "{:?} duration must be finite and >= 0, got {}",
                self.kind, self.duration
            )));
        }
        let ok = match self.kind {
            SegmentKind::Erase | SegmentKind::Probe => self.light == Illumination::Linear,
            SegmentKind::Dark => self.light == Illumination::Off,
            SegmentKind::Pump => {
                matches!(self.light, Illumination::SigmaPlus | Illumination::SigmaMinus)
            }
        };
        if !ok {
            return Err(Error::InvalidSegment(format!(
                "{:?} segment cannot carry {:?} light",
                self.kind, self.light
            )));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    segments: Vec<PulseSegment>,
}

impl PulseSequence {
    pub fn new(segments: Vec<PulseSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptySequence);
        }
        let segments = segments
            .into_iter()
            .map(PulseSegment::validate)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { segments })
    }

    /// Erase, pump, dark delay, probe.
    pub fn pump_probe(t_pump: f64, t_dark: f64, light: Illumination) -> Result<Self> {
        Self::new(vec![
            PulseSegment::erase(ERASE_DURATION_S),
            PulseSegment::pump(t_pump, light),
            PulseSegment::dark(t_dark),
            PulseSegment::probe(),
        ])
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }
}
