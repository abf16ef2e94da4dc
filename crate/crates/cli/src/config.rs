//! Run configuration: a TOML file with `[material]`, `[geometry]`,
//! `[solver]`, `[protocol]` and `[output]` sections. Unknown keys are
//! rejected and units are part of every key name.
//!
//! ```toml
//! [geometry]
//! radius_nm = 10.0
//! height_nm = 5.0
//!
//! [solver]
//! d_cm2s = 2e-15
//!
//! [protocol]
//! preset = "paper-decay"
//! t_dark_s = 120.0
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use spindiff_core::grid::{DEFAULT_EXTENT_FACTOR, DEFAULT_SPACING_NM};
use spindiff_core::pulse::{ERASE_DURATION_S, PROBE_DURATION_S, PUMP_DURATION_S};
use spindiff_core::{
    ClampMode, DotGeometry, Grid, Helicity, Illumination, MaterialParams, PulseSegment, PulseSequence, Resolution,
    SegmentKind, SolverConfig,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub material: MaterialSection,
    pub geometry: GeometrySection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialSection {
    pub a_ga_uev: f64,
    pub a_as_uev: f64,
    pub i_ga: f64,
    pub i_as: f64,
    pub g_e_abs: Option<f64>,
    pub g_h_abs: Option<f64>,
    pub b_ext_t: f64,
}

impl Default for MaterialSection {
    fn default() -> Self {
        let m = MaterialParams::default();
        Self {
            a_ga_uev: m.a_ga,
            a_as_uev: m.a_as,
            i_ga: m.i_ga,
            i_as: m.i_as,
            g_e_abs: None,
            g_h_abs: None,
            b_ext_t: m.b_ext,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub radius_nm: f64,
    pub height_nm: f64,
    #[serde(default)]
    pub z_center_nm: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// Single diffusion coefficient for `simulate`.
    pub d_cm2s: Option<f64>,
    /// Coefficients for `sweep`.
    pub d_list_cm2s: Option<Vec<f64>>,
    /// Search bounds for `fit-d`.
    pub d_min_cm2s: f64,
    pub d_max_cm2s: f64,
    pub points_per_decade: usize,
    pub t1_s: Option<f64>,
    pub dt_s: Option<f64>,
    pub dr_nm: f64,
    pub dz_nm: f64,
    pub extent_factor: f64,
    /// `"surface"` (default) or `"projection"`.
    pub clamp: String,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            d_cm2s: None,
            d_list_cm2s: None,
            d_min_cm2s: 1e-16,
            d_max_cm2s: 1e-13,
            points_per_decade: 8,
            t1_s: None,
            dt_s: None,
            dr_nm: DEFAULT_SPACING_NM,
            dz_nm: DEFAULT_SPACING_NM,
            extent_factor: DEFAULT_EXTENT_FACTOR,
            clamp: "surface".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSection {
    /// Named sequence; only `"paper-decay"` exists. Ignored when `segments` is set.
    pub preset: Option<String>,
    pub t_pump_s: f64,
    pub t_dark_s: f64,
    /// `"sigma+"` or `"sigma-"`.
    pub helicity: String,
    /// Polarization degree that a clamped (S = 1) dot corresponds to.
    pub pump_polarization: f64,
    pub segments: Option<Vec<SegmentSpec>>,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            preset: None,
            t_pump_s: PUMP_DURATION_S,
            t_dark_s: 120.0,
            helicity: "sigma+".into(),
            pump_polarization: 1.0,
            segments: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    /// `erase`, `pump`, `dark` or `probe`.
    pub kind: String,
    pub duration_s: Option<f64>,
    pub helicity: Option<String>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub sample_every_s: f64,
    /// Dark delays at which `field_snapshots.csv` records the whole field.
    pub snapshot_times_s: Vec<f64>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: None,
            sample_every_s: 1.0,
            snapshot_times_s: Vec::new(),
        }
    }
}

pub const PAPER_DECAY: &str = "paper-decay";

/// What `simulate` should run.
#[derive(Debug, Clone, PartialEq)]
pub enum Protocol {
    /// Erase, pump for `t_pump`, dark for `t_dark` sampled densely, probe.
    PaperDecay {
        t_pump: f64,
        t_dark: f64,
    },
    Custom(PulseSequence),
}

fn config_err(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn parse_helicity(field: &str, s: &str) -> Result<Helicity> {
    match s {
        "sigma+" => Ok(Helicity::SigmaPlus),
        "sigma-" => Ok(Helicity::SigmaMinus),
        other => Err(config_err(
            field,
            format!("expected \"sigma+\" or \"sigma-\", got {other:?}"),
        )),
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Checks every sub-section so errors surface before any work starts.
    pub fn check(&self) -> Result<()> {
        self.material()?;
        self.geometry()?;
        self.grid()?;
        self.solver_template()?;
        self.helicity()?;
        self.protocol()?;
        let s = &self.solver;
        if let Some(d) = s.d_cm2s {
            SolverConfig::from_cm2_per_s(d).map_err(|e| config_err("solver.d_cm2s", e))?;
        }
        if let Some(list) = &s.d_list_cm2s {
            for &d in list {
                SolverConfig::from_cm2_per_s(d).map_err(|e| config_err("solver.d_list_cm2s", e))?;
            }
        }
        if !(s.d_min_cm2s > 0.0 && s.d_max_cm2s > s.d_min_cm2s && s.d_max_cm2s.is_finite()) {
            return Err(config_err("solver.d_min_cm2s/d_max_cm2s", "need 0 < d_min < d_max"));
        }
        if s.points_per_decade < 8 {
            return Err(config_err("solver.points_per_decade", "must be >= 8"));
        }
        let o = &self.output;
        if !(o.sample_every_s > 0.0) || !o.sample_every_s.is_finite() {
            return Err(config_err("output.sample_every_s", "must be > 0"));
        }
        if o.snapshot_times_s.iter().any(|t| !(*t >= 0.0)) {
            return Err(config_err("output.snapshot_times_s", "times must be >= 0"));
        }
        if !(self.protocol.pump_polarization.abs() <= 1.0) {
            return Err(config_err("protocol.pump_polarization", "must lie in [-1, 1]"));
        }
        Ok(())
    }

    pub fn material(&self) -> Result<MaterialParams> {
        let m = &self.material;
        MaterialParams {
            a_ga: m.a_ga_uev,
            a_as: m.a_as_uev,
            i_ga: m.i_ga,
            i_as: m.i_as,
            g_e_abs: m.g_e_abs,
            g_h_abs: m.g_h_abs,
            b_ext: m.b_ext_t,
        }
        .validate()
        .map_err(|e| config_err("material", e))
    }

    pub fn geometry(&self) -> Result<DotGeometry> {
        let g = &self.geometry;
        DotGeometry::new(g.radius_nm, g.height_nm, g.z_center_nm).map_err(|e| config_err("geometry", e))
    }

    pub fn grid(&self) -> Result<Grid> {
        let s = &self.solver;
        Grid::around_dot(
            &self.geometry()?,
            Resolution {
                dr: s.dr_nm,
                dz: s.dz_nm,
            },
            s.extent_factor,
        )
        .map_err(|e| config_err("solver.dr_nm/dz_nm/extent_factor", e))
    }

    /// Solver settings with D = 0; callers fill in the coefficient.
    pub fn solver_template(&self) -> Result<SolverConfig> {
        let s = &self.solver;
        let mode = match s.clamp.as_str() {
            "surface" => ClampMode::SurfaceCoupled,
            "projection" => ClampMode::Projection,
            other => {
                return Err(config_err(
                    "solver.clamp",
                    format!("expected \"surface\" or \"projection\", got {other:?}"),
                ))
            }
        };
        let cfg = SolverConfig {
            t1_uniform: s.t1_s,
            dt: s.dt_s,
            clamp_mode: mode,
            ..SolverConfig::new(0.0)
        };
        cfg.validate().map_err(|e| config_err("solver", e))
    }

    pub fn solver_for(&self, d_cm2s: f64) -> Result<SolverConfig> {
        let base = self.solver_template()?;
        let d = SolverConfig::from_cm2_per_s(d_cm2s).map_err(|e| config_err("solver.d_cm2s", e))?;
        Ok(SolverConfig { d_qd: d.d_qd, ..base })
    }

    pub fn helicity(&self) -> Result<Helicity> {
        parse_helicity("protocol.helicity", &self.protocol.helicity)
    }

    pub fn protocol(&self) -> Result<Protocol> {
        let p = &self.protocol;
        if let Some(segments) = &p.segments {
            if p.preset.is_some() {
                return Err(config_err("protocol", "give either `preset` or `segments`, not both"));
            }
            let parsed = segments
                .iter()
                .enumerate()
                .map(|(k, s)| segment(k, s))
                .collect::<Result<Vec<_>>>()?;
            let seq = PulseSequence::new(parsed).map_err(|e| config_err("protocol.segments", e))?;
            return Ok(Protocol::Custom(seq));
        }
        match p.preset.as_deref().unwrap_or(PAPER_DECAY) {
            PAPER_DECAY => {
                for (name, v) in [("protocol.t_pump_s", p.t_pump_s), ("protocol.t_dark_s", p.t_dark_s)] {
                    if !(v >= 0.0) || !v.is_finite() {
                        return Err(config_err(name, "must be finite and >= 0"));
                    }
                }
                Ok(Protocol::PaperDecay {
                    t_pump: p.t_pump_s,
                    t_dark: p.t_dark_s,
                })
            }
            other => Err(config_err("protocol.preset", format!("unknown preset {other:?}"))),
        }
    }
}

fn segment(k: usize, s: &SegmentSpec) -> Result<PulseSegment> {
    let field = format!("protocol.segments[{k}]");
    let kind = match s.kind.as_str() {
        "erase" => SegmentKind::Erase,
        "pump" => SegmentKind::Pump,
        "dark" => SegmentKind::Dark,
        "probe" => SegmentKind::Probe,
        other => return Err(config_err(&field, format!("unknown kind {other:?}"))),
    };
    let default_duration = match kind {
        SegmentKind::Erase => Some(ERASE_DURATION_S),
        SegmentKind::Pump => Some(PUMP_DURATION_S),
        SegmentKind::Probe => Some(PROBE_DURATION_S),
        SegmentKind::Dark => None,
    };
    let duration = s
        .duration_s
        .or(default_duration)
        .ok_or_else(|| config_err(&field, "dark segments need duration_s"))?;
    let light = match (kind, s.helicity.as_deref()) {
        (SegmentKind::Pump, h) => match parse_helicity(&field, h.unwrap_or("sigma+"))? {
            Helicity::SigmaPlus => Illumination::SigmaPlus,
            Helicity::SigmaMinus => Illumination::SigmaMinus,
        },
        (_, Some(_)) => return Err(config_err(&field, "only pump segments take a helicity")),
        (SegmentKind::Dark, None) => Illumination::Off,
        (_, None) => Illumination::Linear,
    };
    PulseSegment { kind, duration, light }
        .validate()
        .map_err(|e| config_err(&field, e))
}
