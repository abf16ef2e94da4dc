use crate::error::{Error, Result};

/// Hyperfine and Zeeman parameters of the dot material.
///
/// The g-factor magnitudes are optional: they are only needed when an
/// energy (rather than a normalized polarization) is requested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Ga hyperfine constant, µeV.
    pub a_ga: f64,
    /// As hyperfine constant, µeV.
    pub a_as: f64,
    pub i_ga: f64,
    pub i_as: f64,
    pub g_e_abs: Option<f64>,
    pub g_h_abs: Option<f64>,
    /// External field along z, T.
    pub b_ext: f64,
}

impl Default for MaterialParams {
    /// GaAs constants with a 2 T Faraday field and no g-factors.
    fn default() -> Self {
        Self {
            a_ga: 42.0,
            a_as: 46.0,
            i_ga: 1.5,
            i_as: 1.5,
            g_e_abs: None,
            g_h_abs: None,
            b_ext: 2.0,
        }
    }
}

impl MaterialParams {
    pub fn with_g_factors(mut self, g_e_abs: f64, g_h_abs: f64) -> Self {
        self.g_e_abs = Some(g_e_abs);
        self.g_h_abs = Some(g_h_abs);
        self
    }

    /// Checks every invariant and returns the parameters unchanged, or the
    /// first violation found.
    pub fn validate(self) -> Result<Self> {
        if !(self.a_ga > 0.0) || !self.a_ga.is_finite() {
            return Err(Error::NonPositiveHyperfineConstant("a_ga"));
        }
        if !(self.a_as > 0.0) || !self.a_as.is_finite() {
            return Err(Error::NonPositiveHyperfineConstant("a_as"));
        }
        if !(self.i_ga > 0.0) || !self.i_ga.is_finite() {
            return Err(Error::NonPositiveNuclearSpin("i_ga"));
        }
        if !(self.i_as > 0.0) || !self.i_as.is_finite() {
            return Err(Error::NonPositiveNuclearSpin("i_as"));
        }
        if !(self.b_ext >= 0.0) || !self.b_ext.is_finite() {
            return Err(Error::NegativeField(self.b_ext));
        }
        for (name, g) in [("g_e_abs", self.g_e_abs), ("g_h_abs", self.g_h_abs)] {
            if let Some(g) = g {
                if !(g >= 0.0) || !g.is_finite() {
                    return Err(Error::NegativeGFactor(name));
                }
            }
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let m = MaterialParams::default();
        assert_eq!(m.validate(), Ok(m));
    }

    #[test]
    fn zero_hyperfine_rejected() {
        let m = MaterialParams {
            a_ga: 0.0,
            ..Default::default()
        };
        assert_eq!(m.validate(), Err(Error::NonPositiveHyperfineConstant("a_ga")));
        let m = MaterialParams {
            a_as: -1.0,
            ..Default::default()
        };
        assert_eq!(m.validate(), Err(Error::NonPositiveHyperfineConstant("a_as")));
    }

    #[test]
    fn zero_field_allowed() {
        let m = MaterialParams {
            b_ext: 0.0,
            ..Default::default()
        };
        assert!(m.validate().is_ok());
    }

    #[test]
    fn other_violations() {
        let m = MaterialParams {
            i_as: 0.0,
            ..Default::default()
        };
        assert_eq!(m.validate(), Err(Error::NonPositiveNuclearSpin("i_as")));
        let m = MaterialParams {
            b_ext: -0.1,
            ..Default::default()
        };
        assert_eq!(m.validate(), Err(Error::NegativeField(-0.1)));
        let m = MaterialParams::default().with_g_factors(-0.2, 1.0);
        assert_eq!(m.validate(), Err(Error::NegativeGFactor("g_e_abs")));
    }
}
