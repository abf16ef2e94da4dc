use thiserror::Error;

/// Everything that can go wrong inside the simulation and fitting core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("hyperfine constant `{0}` must be positive")]
    NonPositiveHyperfineConstant(&'static str),
    #[error("nuclear spin `{0}` must be positive")]
    NonPositiveNuclearSpin(&'static str),
    #[error("g-factor magnitude `{0}` must be finite and non-negative")]
    NegativeGFactor(&'static str),
    #[error("external field must be finite and non-negative, got {0} T")]
    NegativeField(f64),
    #[error("diffusion coefficient must be finite and non-negative, got {0}")]
    NegativeDiffusion(f64),
    #[error("dot geometry `{0}` must be finite and positive")]
    NonPositiveGeometry(&'static str),
    #[error("invalid pulse segment: {0}")]
    InvalidSegment(String),
    #[error("pulse sequence is empty")]
    EmptySequence,
    #[error("grid too coarse: {cells_radius:.1} cells across the dot radius (need >= 10), {cells_height:.1} across its height (need >= 8)")]
    GridTooCoarse { cells_radius: f64, cells_height: f64 },
    #[error("extent factor must be >= 5, got {0}")]
    ExtentTooSmall(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(String),
    #[error("non-finite polarization encountered at t = {time} s")]
    NumericalBlowup { time: f64 },
    #[error("dot does not fit inside the grid: {0}")]
    GeometryMismatch(String),
    #[error("Overhauser shift {shift} ueV exceeds the full-polarization value {max} ueV")]
    UnphysicalShift { shift: f64, max: f64 },
    #[error("missing g-factor: {0}")]
    MissingGFactor(&'static str),
    #[error("polarization degree must lie in [-1, 1], got {0}")]
    InvalidPolarization(f64),
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("parameters not identifiable: {0}")]
    NotIdentifiable(String),
    #[error("fit diverged: {0}")]
    FitDiverged(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
