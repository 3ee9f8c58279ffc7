//! Time-resolved flyby profile and its transmission-weighted aggregates.

use serde::{Deserialize, Serialize};

use crate::channel::{self, ChannelParams};
use crate::error::{ModelError, Result};
use crate::orbit::{self, OrbitGeometry, PassTiming};
use crate::quadrature::{simpson_samples, Refinement};

/// Sampled pass: uniform grid over `[0, flyby_time]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlybyProfile {
    pub times: Vec<f64>,
    /// Slant distance per sample; empty for synthetic profiles.
    pub slant_m: Vec<f64>,
    /// Zenith angle per sample; empty for synthetic profiles.
    pub zenith_rad: Vec<f64>,
    pub eta_tr: Vec<f64>,
    pub eta2_tr: Vec<f64>,
    pub f_pair: Vec<f64>,
    pub flyby_time: f64,
}

impl FlybyProfile {
    /// Profile from arbitrary two-photon transmission and pair-fidelity curves.
    pub fn synthetic<E, F>(flyby_time: f64, n_samples: usize, eta2: E, f_pair: F) -> Result<Self>
    where
        E: Fn(f64) -> f64,
        F: Fn(f64) -> f64,
    {
        check_samples(n_samples)?;
        let times = uniform_grid(flyby_time, n_samples);
        let eta2_tr: Vec<f64> = times.iter().map(|&t| eta2(t)).collect();
        Ok(Self {
            eta_tr: eta2_tr.iter().map(|e| e.sqrt()).collect(),
            f_pair: times.iter().map(|&t| f_pair(t)).collect(),
            eta2_tr,
            times,
            slant_m: Vec::new(),
            zenith_rad: Vec::new(),
            flyby_time,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.flyby_time / (self.len() - 1) as f64
    }

    /// Linear interpolation of the two-photon transmission at time `t`.
    pub fn eta2_at(&self, t: f64) -> f64 {
        interpolate(&self.eta2_tr, self.spacing(), t)
    }
}

fn interpolate(ys: &[f64], dx: f64, t: f64) -> f64 {
    let last = ys.len() - 1;
    let x = (t / dx).clamp(0.0, last as f64);
    let i = (x.floor() as usize).min(last.saturating_sub(1));
    let frac = x - i as f64;
    ys[i] * (1.0 - frac) + ys[i + 1] * frac
}

fn check_samples(n: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(ModelError::Invalid(format!(
            "flyby profile needs an odd sample count >= 3, got {n}"
        )));
    }
    Ok(())
}

fn uniform_grid(span: f64, n: usize) -> Vec<f64> {
    let dt = span / (n - 1) as f64;
    let mut times: Vec<f64> = (0..n).map(|i| dt * i as f64).collect();
    times[n - 1] = span;
    times
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlybyAggregates {
    /// Time-averaged two-photon transmission.
    pub p0: f64,
    /// Transmission-weighted pair fidelity.
    pub f_pair_avg: f64,
    pub flyby_time: f64,
}

/// A single elementary link's pass: geometry, channel and source fidelity,
/// with the pass timing and background level resolved once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flyby {
    pub geometry: OrbitGeometry,
    pub channel: ChannelParams,
    pub source_fidelity: f64,
    pub timing: PassTiming,
    pub n_bar: f64,
}

impl Flyby {
    pub fn new(geometry: OrbitGeometry, channel: ChannelParams, source_fidelity: f64) -> Result<Self> {
        channel.validate()?;
        let timing = PassTiming::of(&geometry)?;
        if !timing.is_visible() {
            return Err(ModelError::NoVisibility {
                altitude_m: geometry.altitude_m,
                link_length_m: geometry.link_length_m,
            });
        }
        Ok(Self {
            geometry,
            channel,
            source_fidelity,
            timing,
            n_bar: channel::mean_background_photons(&channel),
        })
    }

    pub fn flyby_time(&self) -> f64 {
        self.timing.flyby_time
    }

    /// (slant distance, zenith angle, single-photon transmission) at time `t`.
    pub fn link_state(&self, t: f64) -> Result<(f64, f64, f64)> {
        let d = orbit::slant_distance(&self.geometry, &self.timing, t)?;
        let theta = orbit::zenith_angle(&self.geometry, d)?;
        let eta = channel::single_photon_transmission(&self.channel, d, theta)?;
        Ok((d, theta, eta))
    }

    pub fn profile(&self, n_samples: usize) -> Result<FlybyProfile> {
        check_samples(n_samples)?;
        let times = uniform_grid(self.flyby_time(), n_samples);
        let mut p = FlybyProfile {
            slant_m: Vec::with_capacity(n_samples),
            zenith_rad: Vec::with_capacity(n_samples),
            eta_tr: Vec::with_capacity(n_samples),
            eta2_tr: Vec::with_capacity(n_samples),
            f_pair: Vec::with_capacity(n_samples),
            times: Vec::new(),
            flyby_time: self.flyby_time(),
        };
        for &t in &times {
            let (d, theta, eta) = self.link_state(t)?;
            p.slant_m.push(d);
            p.zenith_rad.push(theta);
            p.eta_tr.push(eta);
            p.eta2_tr.push(eta * eta);
            p.f_pair
                .push(channel::pair_fidelity(self.source_fidelity, self.n_bar, eta)?);
        }
        p.times = times;
        Ok(p)
    }

    /// Aggregates on grids refined until both change by less than the tolerance.
    pub fn aggregates(&self, refinement: &Refinement) -> Result<FlybyAggregates> {
        let ([p0, f_pair_avg], _) = refinement.run(|n| {
            let profile = self.profile(n)?;
            Ok([average_two_photon(&profile)?, average_pair_fidelity(&profile)?])
        })?;
        Ok(FlybyAggregates {
            p0,
            f_pair_avg,
            flyby_time: self.flyby_time(),
        })
    }
}

pub fn build_profile(
    geometry: &OrbitGeometry,
    channel: &ChannelParams,
    source_fidelity: f64,
    n_samples: usize,
) -> Result<FlybyProfile> {
    Flyby::new(*geometry, *channel, source_fidelity)?.profile(n_samples)
}

/// Time average of the two-photon transmission over the pass.
pub fn average_two_photon(profile: &FlybyProfile) -> Result<f64> {
    Ok(simpson_samples(&profile.eta2_tr, profile.spacing())? / profile.flyby_time)
}

/// Pair fidelity averaged with the two-photon transmission as weight.
pub fn average_pair_fidelity(profile: &FlybyProfile) -> Result<f64> {
    let weight = simpson_samples(&profile.eta2_tr, profile.spacing())?;
    if !(weight > 0.0) {
        return Err(ModelError::Invalid(
            "average two-photon transmission is zero; weighted pair fidelity undefined".into(),
        ));
    }
    let weighted: Vec<f64> = profile
        .f_pair
        .iter()
        .zip(&profile.eta2_tr)
        .map(|(f, e)| f * e)
        .collect();
    Ok(simpson_samples(&weighted, profile.spacing())? / weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::BackgroundUnits;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn table1(h: f64, l0: f64) -> Flyby {
        let geom = OrbitGeometry::default().with_altitude(h).with_link_length(l0);
        Flyby::new(geom, ChannelParams::default(), 0.998).unwrap()
    }

    #[test]
    fn no_visibility_is_an_error() {
        let geom = OrbitGeometry::default().with_link_length(9.0e6);
        let err = build_profile(&geom, &ChannelParams::default(), 0.998, 2001).unwrap_err();
        assert!(matches!(err, ModelError::NoVisibility { .. }));
    }

    #[test]
    fn profile_peaks_at_midpoint() {
        let f = table1(1.5e6, 2.5e6);
        let p = f.profile(2001).unwrap();
        let argmax = p
            .eta2_tr
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(argmax, 1000);
        for i in 0..p.len() {
            assert_eq!(p.eta2_tr[i], p.eta_tr[i] * p.eta_tr[i]);
            let j = p.len() - 1 - i;
            assert_relative_eq!(p.eta2_tr[i], p.eta2_tr[j], max_relative = 1e-6);
        }
    }

    #[test]
    fn midpoint_matches_channel_composition() {
        let f = table1(1.5e6, 2.5e6);
        let p = f.profile(2001).unwrap();
        let d = orbit::slant_distance(&f.geometry, &f.timing, f.timing.t0).unwrap();
        let theta = orbit::zenith_angle(&f.geometry, d).unwrap();
        let eta2 = channel::two_photon_transmission(&f.channel, d, theta, d, theta).unwrap();
        assert_eq!(p.eta2_tr[1000], eta2);
    }

    #[test]
    fn synthetic_integrals() {
        let c = FlybyProfile::synthetic(600.0, 2001, |_| 0.37, |_| 0.9).unwrap();
        assert_relative_eq!(average_two_photon(&c).unwrap(), 0.37, max_relative = 1e-14);
        assert_relative_eq!(average_pair_fidelity(&c).unwrap(), 0.9, max_relative = 1e-12);

        let t_fb = 800.0;
        let s = FlybyProfile::synthetic(t_fb, 2001, |t| (PI * t / t_fb).sin(), |t| 0.5 + t / t_fb).unwrap();
        assert!((average_two_photon(&s).unwrap() - 2.0 / PI).abs() < 1e-6);
    }

    #[test]
    fn zero_weight_rejected() {
        let z = FlybyProfile::synthetic(10.0, 5, |_| 0.0, |_| 0.9).unwrap();
        assert!(average_pair_fidelity(&z).is_err());
    }

    #[test]
    fn dark_sky_gives_source_fidelity() {
        let geom = OrbitGeometry::default();
        let dark = ChannelParams {
            sky_irradiance: 0.0,
            ..ChannelParams::default()
        };
        let agg = Flyby::new(geom, dark, 0.998)
            .unwrap()
            .aggregates(&Refinement::default())
            .unwrap();
        assert_relative_eq!(agg.f_pair_avg, 0.998, max_relative = 1e-12);
    }

    #[test]
    fn aggregates_against_reference_quadrature() {
        // 30-digit mpmath adaptive quadrature of the same model.
        let agg = table1(1.5e6, 2.0e6).aggregates(&Refinement::default()).unwrap();
        assert_relative_eq!(agg.p0, 2.612_731_579_182_31e-8, max_relative = 1e-7);
        assert_relative_eq!(agg.f_pair_avg, 0.997_962_687_316_493_9, max_relative = 1e-9);
        assert_relative_eq!(agg.flyby_time, 2.0 * 496.854_855_680_938_6, max_relative = 1e-9);
    }

    #[test]
    fn weighting_favours_clean_instants() {
        let geom = OrbitGeometry::default().with_altitude(1.0e6).with_link_length(2.0e6);
        let noisy = ChannelParams {
            background_units: BackgroundUnits::Dimensional,
            field_of_view_sr: 1e-8,
            ..ChannelParams::default()
        };
        let f = Flyby::new(geom, noisy, 0.998).unwrap();
        let p = f.profile(2001).unwrap();
        let weighted = average_pair_fidelity(&p).unwrap();
        let plain = simpson_samples(&p.f_pair, p.spacing()).unwrap() / p.flyby_time;
        assert!(weighted > plain);
        let lo = p.f_pair.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.f_pair.iter().cloned().fold(0.0, f64::max);
        assert!(lo <= weighted && weighted <= hi);
    }

    #[test]
    fn interpolation_hits_nodes() {
        let p = FlybyProfile::synthetic(10.0, 11, |t| t * t, |_| 1.0).unwrap();
        assert_eq!(p.eta2_at(3.0), 9.0);
        assert_relative_eq!(p.eta2_at(3.5), 12.5, max_relative = 1e-12);
        assert_eq!(p.eta2_at(10.0), 100.0);
    }
}
