//! Fixed unit conventions.
//!
//! Lengths are in nm, times in s, energies in µeV and fields in T.
//! Diffusion coefficients are quoted in cm²/s at the interfaces and
//! carried internally in nm²/s.

use crate::error::{Error, Result};

/// Bohr magneton in µeV/T (CODATA).
pub const BOHR_MAGNETON_UEV_PER_T: f64 = 57.8838;

/// nm² per cm².
pub const NM2_PER_CM2: f64 = 1.0e14;

/// Converts a diffusion coefficient from cm²/s to nm²/s.
pub fn convert_diffusion(d_cm2_per_s: f64) -> Result<f64> {
    if !(d_cm2_per_s >= 0.0) || !d_cm2_per_s.is_finite() {
        return Err(Error::NegativeDiffusion(d_cm2_per_s));
    }
    Ok(d_cm2_per_s * NM2_PER_CM2)
}

/// Inverse of [`convert_diffusion`].
pub fn diffusion_to_cm2(d_nm2_per_s: f64) -> Result<f64> {
    if !(d_nm2_per_s >= 0.0) || !d_nm2_per_s.is_finite() {
        return Err(Error::NegativeDiffusion(d_nm2_per_s));
    }
    Ok(d_nm2_per_s / NM2_PER_CM2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn paper_scale_values() {
        assert!((convert_diffusion(1e-13).unwrap() - 10.0).abs() < 1e-12);
        assert!((convert_diffusion(2e-15).unwrap() - 0.2).abs() < 1e-14);
        assert_eq!(convert_diffusion(0.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_rejected() {
        assert_eq!(convert_diffusion(-1e-15), Err(Error::NegativeDiffusion(-1e-15)));
        assert!(convert_diffusion(f64::NAN).is_err());
        assert!(diffusion_to_cm2(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(exp in -18.0f64..-8.0, mant in 1.0f64..10.0) {
            let d = mant * 10f64.powf(exp);
            let back = diffusion_to_cm2(convert_diffusion(d).unwrap()).unwrap();
            prop_assert!(((back - d) / d).abs() < 1e-12);
        }
    }
}
