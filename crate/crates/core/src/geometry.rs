use crate::error::{Error, Result};

/// Disk-shaped dot on the symmetry axis. All lengths in nm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DotGeometry {
    pub radius: f64,
    pub height: f64,
    /// Mid-plane position on the z axis.
    pub z_center: f64,
}

impl Default for DotGeometry {
    /// 20 nm diameter, 5 nm high, centred at z = 0.
    fn default() -> Self {
        Self {
            radius: 10.0,
            height: 5.0,
            z_center: 0.0,
        }
    }
}

impl DotGeometry {
    pub fn new(radius: f64, height: f64, z_center: f64) -> Result<Self> {
        Self {
            radius,
            height,
            z_center,
        }
        .validate()
    }

    pub fn validate(self) -> Result<Self> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::NonPositiveGeometry("radius"));
        }
        if !(self.height > 0.0) || !self.height.is_finite() {
            return Err(Error::NonPositiveGeometry("height"));
        }
        if !self.z_center.is_finite() {
            return Err(Error::NonPositiveGeometry("z_center"));
        }
        Ok(self)
    }

    pub fn z_bottom(&self) -> f64 {
        self.z_center - 0.5 * self.height
    }

    pub fn z_top(&self) -> f64 {
        self.z_center + 0.5 * self.height
    }

    /// True if the point (r, z) lies strictly inside the disk.
    pub fn contains(&self, r: f64, z: f64) -> bool {
        r < self.radius && (z - self.z_center).abs() < 0.5 * self.height
    }

    pub fn volume(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius * self.height
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_dot() {
        let g = DotGeometry::default().validate().unwrap();
        assert_eq!(g.radius, 10.0);
        assert_eq!(g.height, 5.0);
        assert!((g.volume() - 1_570.796_326_794_896_6).abs() < 1e-9);
        assert!(g.contains(9.9, 2.4));
        assert!(!g.contains(10.0, 0.0));
        assert!(!g.contains(0.0, 2.5));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(DotGeometry::new(0.0, 5.0, 0.0).is_err());
        assert!(DotGeometry::new(10.0, -5.0, 0.0).is_err());
        assert!(DotGeometry::new(10.0, 5.0, f64::NAN).is_err());
    }
}
