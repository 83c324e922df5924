//! Points on the closed unit disk in polar form.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radii up to `1 + DISK_TOLERANCE` are accepted and clamped to 1.
pub const DISK_TOLERANCE: f64 = 1e-12;

/// A point `(r, phi)` of the closed unit disk with `phi` in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub r: f64,
    pub phi: f64,
}

impl PolarPoint {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !r.is_finite()
            || !phi.is_finite()
            || !(-DISK_TOLERANCE..=1.0 + DISK_TOLERANCE).contains(&r)
        {
            return Err(Error::OutsideDisk { r });
        }
        Ok(Self {
            r: r.clamp(0.0, 1.0),
            phi: wrap_angle(phi),
        })
    }

    pub fn from_cartesian(x: f64, y: f64) -> Result<Self> {
        Self::new(x.hypot(y), y.atan2(x))
    }

    pub fn to_cartesian(self) -> (f64, f64) {
        (self.r * self.phi.cos(), self.r * self.phi.sin())
    }

    /// Euclidean distance in the plane.
    pub fn distance(self, other: PolarPoint) -> f64 {
        let (x0, y0) = self.to_cartesian();
        let (x1, y1) = other.to_cartesian();
        (x0 - x1).hypot(y0 - y1)
    }
}

/// Maps any finite angle into `[0, 2pi)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}
