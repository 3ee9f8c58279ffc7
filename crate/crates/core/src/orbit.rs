//! Pass geometry for a satellite in a polar orbit over two equatorial ground
//! stations separated by a great-circle distance `L0`.
//!
//! The satellite enters the common visibility cone at `t = 0` (zenith angle
//! equal to `theta_max` at both stations), passes over the midpoint at
//! `t = t0` and leaves at `t = 2 t0`. Earth rotation is ignored.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{ModelError, Result};

pub const EARTH_RADIUS_M: f64 = 6.378e6;
/// Standard gravitational parameter of the Earth, G * M_E.
pub const EARTH_MU_M3_S2: f64 = 3.986004418e14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitGeometry {
    pub altitude_m: f64,
    pub link_length_m: f64,
    pub earth_radius_m: f64,
    pub mu_m3_s2: f64,
    pub max_zenith_rad: f64,
}

impl Default for OrbitGeometry {
    fn default() -> Self {
        Self {
            altitude_m: 1.5e6,
            link_length_m: 2.5e6,
            earth_radius_m: EARTH_RADIUS_M,
            mu_m3_s2: EARTH_MU_M3_S2,
            max_zenith_rad: 80f64.to_radians(),
        }
    }
}

impl OrbitGeometry {
    pub fn new(altitude_m: f64, link_length_m: f64, max_zenith_rad: f64) -> Result<Self> {
        let geom = Self {
            altitude_m,
            link_length_m,
            max_zenith_rad,
            ..Self::default()
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn with_link_length(mut self, link_length_m: f64) -> Self {
        self.link_length_m = link_length_m;
        self
    }

    pub fn with_altitude(mut self, altitude_m: f64) -> Self {
        self.altitude_m = altitude_m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |quantity, value: f64| {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(ModelError::OutOfRange {
                    quantity,
                    value,
                    expected: "(0, inf)",
                })
            }
        };
        positive("orbit.altitude_m", self.altitude_m)?;
        positive("orbit.earth_radius_m", self.earth_radius_m)?;
        positive("orbit.gravitational_parameter_m3_s2", self.mu_m3_s2)?;
        if !(self.link_length_m.is_finite() && self.link_length_m >= 0.0) {
            return Err(ModelError::OutOfRange {
                quantity: "orbit.link_length_m",
                value: self.link_length_m,
                expected: "[0, inf)",
            });
        }
        if !(self.max_zenith_rad > 0.0 && self.max_zenith_rad < FRAC_PI_2) {
            return Err(ModelError::OutOfRange {
                quantity: "orbit.max_zenith_angle_rad",
                value: self.max_zenith_rad,
                expected: "(0, pi/2)",
            });
        }
        Ok(())
    }

    /// Half of the central angle subtended by the two ground stations.
    fn half_station_angle(&self) -> f64 {
        self.link_length_m / (2.0 * self.earth_radius_m)
    }

    /// Slant distance at which the zenith angle equals `theta_max`.
    pub fn max_slant_distance(&self) -> f64 {
        let (h, re) = (self.altitude_m, self.earth_radius_m);
        let c = self.max_zenith_rad.cos();
        (h * h + 2.0 * h * re + re * re * c * c).sqrt() - re * c
    }
}

/// Half-flyby time and total flyby time of one pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassTiming {
    pub t0: f64,
    pub flyby_time: f64,
}

impl PassTiming {
    pub fn from_half(t0: f64) -> Self {
        Self {
            t0,
            flyby_time: 2.0 * t0,
        }
    }

    pub fn of(geom: &OrbitGeometry) -> Result<Self> {
        half_flyby_time(geom).map(Self::from_half)
    }

    pub fn is_visible(&self) -> bool {
        self.t0 > 0.0
    }
}

pub fn angular_speed(geom: &OrbitGeometry) -> f64 {
    (geom.mu_m3_s2 / (geom.altitude_m + geom.earth_radius_m).powi(3)).sqrt()
}

/// Distance between satellite and either ground station at time `t` into the pass.
pub fn slant_distance(geom: &OrbitGeometry, timing: &PassTiming, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t <= timing.flyby_time) {
        return Err(ModelError::OutsideWindow {
            t,
            flyby_time: timing.flyby_time,
        });
    }
    Ok(slant_distance_unchecked(geom, timing.t0, t))
}

pub(crate) fn slant_distance_unchecked(geom: &OrbitGeometry, t0: f64, t: f64) -> f64 {
    let re = geom.earth_radius_m;
    let r = re + geom.altitude_m;
    let w = angular_speed(geom);
    let d2 = re * re + r * r - 2.0 * re * r * geom.half_station_angle().cos() * (w * (t0 - t)).cos();
    // d2 >= h^2 > 0 analytically; guard the overhead case against rounding.
    d2.max(geom.altitude_m * geom.altitude_m * (1.0 - 1e-15)).sqrt()
}

/// Zenith angle seen from a ground station for a satellite at slant distance `d`.
pub fn zenith_angle(geom: &OrbitGeometry, d: f64) -> Result<f64> {
    let h = geom.altitude_m;
    let re = geom.earth_radius_m;
    let cos_theta = h / d - (d * d - h * h) / (2.0 * re * d);
    if !cos_theta.is_finite() || !(-1.0..=1.0 + 1e-12).contains(&cos_theta) {
        return Err(ModelError::NonPhysicalGeometry(cos_theta));
    }
    // The small-angle form is only defined strictly below the horizon.
    if cos_theta <= 0.0 {
        return Err(ModelError::OutOfRange {
            quantity: "zenith angle",
            value: cos_theta.clamp(-1.0, 1.0).acos(),
            expected: "[0, pi/2)",
        });
    }
    Ok(cos_theta.min(1.0).acos())
}

/// Time from entering the visibility cone to passing over the midpoint.
///
/// Returns zero when the stations are too far apart to share a window.
pub fn half_flyby_time(geom: &OrbitGeometry) -> Result<f64> {
    geom.validate()?;
    let h = geom.altitude_m;
    let re = geom.earth_radius_m;
    let c = geom.max_zenith_rad.cos();
    let num = re * (1.0 - c * c) + c * (h * h + 2.0 * h * re + re * re * c * c).sqrt();
    let den = (h + re) * geom.half_station_angle().cos();
    let arg = num / den;
    if !(den > 0.0) || arg >= 1.0 {
        return Ok(0.0);
    }
    if arg < -1.0 {
        return Err(ModelError::NonPhysicalGeometry(arg));
    }
    Ok(arg.acos() / angular_speed(geom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table1(l0: f64) -> OrbitGeometry {
        OrbitGeometry::default().with_link_length(l0)
    }

    #[test]
    fn angular_speed_at_1500_km() {
        // mpmath, 30 digits
        assert_relative_eq!(angular_speed(&table1(2.5e6)), 9.02910956689662e-4, max_relative = 1e-12);
    }

    #[test]
    fn angular_speed_scaling() {
        let g = table1(0.0);
        let mut g4 = g;
        g4.mu_m3_s2 *= 4.0;
        assert_relative_eq!(angular_speed(&g4), 2.0 * angular_speed(&g), max_relative = 1e-15);
        assert!(angular_speed(&g.with_altitude(2.0e6)) < angular_speed(&g));
    }

    #[test]
    fn overhead_distance_equals_altitude() {
        let g = table1(0.0);
        let timing = PassTiming::of(&g).unwrap();
        let d = slant_distance(&g, &timing, timing.t0).unwrap();
        assert_relative_eq!(d, g.altitude_m, max_relative = 1e-9);
        assert!(zenith_angle(&g, g.altitude_m).unwrap().abs() < 1e-12);
    }

    #[test]
    fn entry_distance_matches_max_zenith_anchor() {
        let g = table1(2.5e6);
        let timing = PassTiming::of(&g).unwrap();
        let d0 = slant_distance(&g, &timing, 0.0).unwrap();
        // mpmath reference for the theta_m-anchored distance
        assert_relative_eq!(d0, 3_647_534.324_291_746, max_relative = 1e-9);
        assert_relative_eq!(d0, g.max_slant_distance(), max_relative = 1e-9);
        assert_relative_eq!(timing.t0, 480.468_840_200_439_3, max_relative = 1e-9);
    }

    #[test]
    fn zenith_round_trip_at_max() {
        let g = table1(2.5e6);
        let theta = zenith_angle(&g, g.max_slant_distance()).unwrap();
        assert_relative_eq!(theta, 80f64.to_radians(), max_relative = 1e-9);
    }

    #[test]
    fn zenith_rejects_beyond_horizon() {
        let g = table1(2.5e6);
        assert!(zenith_angle(&g, 2.0e7).is_err());
    }

    #[test]
    fn out_of_window_time_rejected() {
        let g = table1(2.5e6);
        let timing = PassTiming::of(&g).unwrap();
        assert!(matches!(
            slant_distance(&g, &timing, -1.0),
            Err(ModelError::OutsideWindow { .. })
        ));
        assert!(slant_distance(&g, &timing, timing.flyby_time + 1e-3).is_err());
    }

    #[test]
    fn flyby_collapses_past_visibility() {
        assert_eq!(half_flyby_time(&table1(9.0e6)).unwrap(), 0.0);
        let tiny = OrbitGeometry {
            max_zenith_rad: 1e-9,
            ..table1(0.0)
        };
        assert!(half_flyby_time(&tiny).unwrap() < 1e-3);
    }

    #[test]
    fn invalid_geometry_rejected() {
        assert!(OrbitGeometry::new(-1.0, 0.0, 1.0).is_err());
        assert!(OrbitGeometry::new(1e6, 0.0, FRAC_PI_2).is_err());
        assert!(OrbitGeometry::new(1e6, -5.0, 1.0).is_err());
    }
}
