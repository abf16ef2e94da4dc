//! Nuclear-spin diffusion out of an optically pumped disk-shaped quantum dot.
//!
//! The crate simulates `∂S/∂t = D ΔS` around a clamped (pumped) dot on an
//! axisymmetric grid, runs erase/pump/dark/probe sequences against it,
//! converts polarization to Overhauser and Zeeman energies, and fits rise
//! times and the diffusion coefficient to measured time series.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod fit;
pub mod geometry;
pub mod grid;
pub mod material;
pub mod observables;
pub mod protocol;
pub mod pulse;
pub mod series;
pub mod solver;
pub mod units;

pub use error::{Error, Result};
pub use field::PolarizationField;
pub use fit::{
    fit_diffusion_coefficient, fit_exponential_decay, fit_exponential_rise, DecayFit, DiffusionFit, FitOptions,
    ForwardModel, RiseFit,
};
pub use geometry::DotGeometry;
pub use grid::{Grid, Resolution};
pub use material::MaterialParams;
pub use observables::{Helicity, OverhauserState};
pub use protocol::{
    run_sequence, simulate_dark, simulate_decay_curve, simulate_decay_curve_with, simulate_pump, Simulation,
};
pub use pulse::{Illumination, PulseSegment, PulseSequence, SegmentKind};
pub use series::{DecaySeries, YKind};
pub use solver::{Boundaries, Boundary, ClampMode, DiffusionSolver, RunDiagnostics, SolverConfig};
pub use units::{convert_diffusion, diffusion_to_cm2, BOHR_MAGNETON_UEV_PER_T};
