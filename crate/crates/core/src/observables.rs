//! Polarization degree, Overhauser shift/field and Zeeman splittings.
//!
//! `b_n` is signed: positive for polarization pumped with σ⁺ light.

use crate::error::{Error, Result};
use crate::material::MaterialParams;
use crate::units::BOHR_MAGNETON_UEV_PER_T;

/// Circular polarization of the pump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Helicity {
    SigmaPlus,
    SigmaMinus,
}

impl Helicity {
    /// +1 for σ⁺, -1 for σ⁻: the sign in front of `b_n` in `B_z ∓ B_N`.
    fn sign(self) -> f64 {
        match self {
            Helicity::SigmaPlus => 1.0,
            Helicity::SigmaMinus => -1.0,
        }
    }
}

/// Overhauser shift of a fully polarized dot, `Σ I·A`, in µeV.
pub fn ohs_max(m: &MaterialParams) -> f64 {
    m.i_ga * m.a_ga + m.i_as * m.a_as
}

/// Nuclear polarization degree from an Overhauser shift in µeV.
pub fn polarization_degree(ohs: f64, m: &MaterialParams) -> Result<f64> {
    let max = ohs_max(m);
    if !ohs.is_finite() || ohs.abs() > max {
        return Err(Error::UnphysicalShift { shift: ohs, max });
    }
    Ok(ohs / max)
}

/// Overhauser shift in µeV for a polarization degree.
pub fn overhauser_shift(p: f64, m: &MaterialParams) -> Result<f64> {
    check_degree(p)?;
    Ok(p * ohs_max(m))
}

fn check_degree(p: f64) -> Result<()> {
    if !(p.abs() <= 1.0) {
        return Err(Error::InvalidPolarization(p));
    }
    Ok(())
}

fn g_e(m: &MaterialParams) -> Result<f64> {
    match m.g_e_abs {
        Some(g) if g > 0.0 => Ok(g),
        _ => Err(Error::MissingGFactor("g_e_abs must be given and > 0")),
    }
}

fn g_h(m: &MaterialParams) -> Result<f64> {
    m.g_h_abs.ok_or(Error::MissingGFactor("g_h_abs must be given"))
}

/// Overhauser field in T such that `|g_e| µ_B B_N` equals the Overhauser shift.
pub fn overhauser_field(p: f64, m: &MaterialParams) -> Result<f64> {
    check_degree(p)?;
    Ok(p * ohs_max(m) / (g_e(m)? * BOHR_MAGNETON_UEV_PER_T))
}

/// Inverse of [`overhauser_field`].
pub fn polarization_from_field(b_n: f64, m: &MaterialParams) -> Result<f64> {
    let p = b_n * g_e(m)? * BOHR_MAGNETON_UEV_PER_T / ohs_max(m);
    if !(p.abs() <= 1.0) {
        return Err(Error::UnphysicalShift {
            shift: p * ohs_max(m),
            max: ohs_max(m),
        });
    }
    Ok(p)
}

/// `ΔE(σ±) = µ_B [|g_h| B_z − |g_e| (B_z ∓ B_N)]`, µeV.
pub fn exciton_zeeman_splitting(m: &MaterialParams, b_n: f64, h: Helicity) -> Result<f64> {
    let (ge, gh) = (g_e(m)?, g_h(m)?);
    Ok(BOHR_MAGNETON_UEV_PER_T * (gh * m.b_ext - ge * (m.b_ext - h.sign() * b_n)))
}

/// `E_eZ(σ±) = µ_B |g_e| (B_z ∓ B_N)`, µeV.
pub fn electron_zeeman(m: &MaterialParams, b_n: f64, h: Helicity) -> Result<f64> {
    Ok(BOHR_MAGNETON_UEV_PER_T * g_e(m)? * (m.b_ext - h.sign() * b_n))
}

/// Polarization degree, Overhauser shift and field of one nuclear state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverhauserState {
    pub polarization_degree: f64,
    /// µeV.
    pub ohs_energy: f64,
    /// T; `None` without an electron g-factor.
    pub b_n: Option<f64>,
}

impl OverhauserState {
    pub fn from_degree(p: f64, m: &MaterialParams) -> Result<Self> {
        Ok(Self {
            polarization_degree: p,
            ohs_energy: overhauser_shift(p, m)?,
            b_n: overhauser_field(p, m).ok(),
        })
    }
}
