//! Downlink efficiency and sky-noise model.
//!
//! Losses per photon: Gaussian-beam diffraction at the receiver aperture,
//! atmospheric extinction along the slant path, pointing jitter and a lumped
//! system coupling efficiency. Background light enters through the mean
//! photon number per coincidence window and degrades the pair fidelity.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{check_range, ModelError, Result};

pub const PLANCK_J_S: f64 = 6.62607015e-34;
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// How the receiver size enters the background-photon area term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApertureInterpretation {
    /// Area `pi (D_R / 2)^2`, as printed for the noise formula.
    #[default]
    Literal,
    /// Area `pi D_R^2`, consistent with `D_R` being the telescope radius.
    Radius,
}

/// How the sky irradiance and filter bandwidth are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackgroundUnits {
    /// The irradiance value is multiplied by the bandwidth in metres as-is.
    #[default]
    AsPrinted,
    /// The irradiance is per micrometre and is rescaled to per metre first.
    Dimensional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub wavelength_m: f64,
    pub beam_waist_m: f64,
    pub beam_quality: f64,
    pub receiver_radius_m: f64,
    pub pointing_sigma_rad: f64,
    pub zenith_transmittance: f64,
    pub coupling_efficiency: f64,
    /// Sky spectral radiance in W m^-2 um^-1 sr^-1.
    pub sky_irradiance: f64,
    pub field_of_view_sr: f64,
    pub filter_bandwidth_m: f64,
    pub coincidence_window_s: f64,
    pub aperture: ApertureInterpretation,
    pub background_units: BackgroundUnits,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            wavelength_m: 780e-9,
            beam_waist_m: 0.025,
            beam_quality: 1.0,
            receiver_radius_m: 1.0,
            pointing_sigma_rad: 0.5e-6,
            zenith_transmittance: 0.79,
            coupling_efficiency: 0.25,
            sky_irradiance: 1.5e-5,
            field_of_view_sr: 100e-6,
            filter_bandwidth_m: 1e-9,
            coincidence_window_s: 1e-9,
            aperture: ApertureInterpretation::Literal,
            background_units: BackgroundUnits::AsPrinted,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let positive =
            |quantity, value: f64| check_range(quantity, value, f64::MIN_POSITIVE, f64::INFINITY, "(0, inf)");
        positive("channel.wavelength_m", self.wavelength_m)?;
        positive("channel.beam_waist_m", self.beam_waist_m)?;
        positive("channel.receiver_radius_m", self.receiver_radius_m)?;
        check_range(
            "channel.beam_quality_m2",
            self.beam_quality,
            1.0,
            f64::INFINITY,
            "[1, inf)",
        )?;
        check_range(
            "channel.pointing_sigma_rad",
            self.pointing_sigma_rad,
            0.0,
            f64::INFINITY,
            "[0, inf)",
        )?;
        check_range(
            "channel.zenith_transmittance",
            self.zenith_transmittance,
            f64::MIN_POSITIVE,
            1.0,
            "(0, 1]",
        )?;
        check_range(
            "channel.coupling_efficiency",
            self.coupling_efficiency,
            f64::MIN_POSITIVE,
            1.0,
            "(0, 1]",
        )?;
        check_range(
            "channel.sky_irradiance_w_m2_um_sr",
            self.sky_irradiance,
            0.0,
            f64::INFINITY,
            "[0, inf)",
        )?;
        check_range(
            "channel.field_of_view_sr",
            self.field_of_view_sr,
            0.0,
            f64::INFINITY,
            "[0, inf)",
        )?;
        check_range(
            "channel.filter_bandwidth_m",
            self.filter_bandwidth_m,
            0.0,
            f64::INFINITY,
            "[0, inf)",
        )?;
        check_range(
            "channel.coincidence_window_s",
            self.coincidence_window_s,
            0.0,
            f64::INFINITY,
            "[0, inf)",
        )?;
        Ok(())
    }
}

/// Clamp an efficiency to [0, 1]; overshoot beyond rounding is a model bug.
fn unit_interval(x: f64) -> f64 {
    debug_assert!(
        (-1e-12..=1.0 + 1e-12).contains(&x),
        "efficiency {x} outside [0, 1] beyond rounding"
    );
    x.clamp(0.0, 1.0)
}

pub fn beam_waist(params: &ChannelParams, d: f64) -> f64 {
    let w0 = params.beam_waist_m;
    let z = params.wavelength_m * d / (PI * w0 * w0);
    w0 * (1.0 + z * z).sqrt()
}

pub fn diffraction_eff(params: &ChannelParams, d: f64) -> f64 {
    let wd = beam_waist(params, d);
    let r = params.receiver_radius_m;
    // 1 - exp(-x) without cancellation for small x
    unit_interval(-(-r * r / (2.0 * wd * wd)).exp_m1())
}

pub fn atmospheric_eff(params: &ChannelParams, theta: f64) -> Result<f64> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(ModelError::OutOfRange {
            quantity: "zenith angle",
            value: theta,
            expected: "[0, pi/2)",
        });
    }
    Ok(unit_interval(params.zenith_transmittance.powf(1.0 / theta.cos())))
}

/// Pointing efficiency; independent of distance and time.
pub fn pointing_eff(params: &ChannelParams) -> f64 {
    let divergence = 4.0 * params.beam_quality * params.wavelength_m / (PI * params.beam_waist_m);
    let d2 = divergence * divergence;
    let s2 = params.pointing_sigma_rad * params.pointing_sigma_rad;
    unit_interval(d2 / (d2 + 4.0 * s2))
}

pub fn single_photon_transmission(params: &ChannelParams, d: f64, theta: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(ModelError::OutOfRange {
            quantity: "slant distance",
            value: d,
            expected: "[0, inf)",
        });
    }
    let eta = diffraction_eff(params, d)
        * atmospheric_eff(params, theta)?
        * pointing_eff(params)
        * params.coupling_efficiency;
    Ok(unit_interval(eta))
}

/// Joint transmission of both photons of a pair to their two stations.
pub fn two_photon_transmission(params: &ChannelParams, d1: f64, theta1: f64, d2: f64, theta2: f64) -> Result<f64> {
    Ok(single_photon_transmission(params, d1, theta1)? * single_photon_transmission(params, d2, theta2)?)
}

/// Mean number of background photons per detector per coincidence window.
pub fn mean_background_photons(params: &ChannelParams) -> f64 {
    let aperture_area = match params.aperture {
        ApertureInterpretation::Literal => PI * (params.receiver_radius_m / 2.0).powi(2),
        ApertureInterpretation::Radius => PI * params.receiver_radius_m.powi(2),
    };
    let irradiance = match params.background_units {
        BackgroundUnits::AsPrinted => params.sky_irradiance,
        BackgroundUnits::Dimensional => params.sky_irradiance * 1e6,
    };
    let photon_energy = PLANCK_J_S * SPEED_OF_LIGHT_M_S / params.wavelength_m;
    irradiance * params.field_of_view_sr * aperture_area * params.filter_bandwidth_m * params.coincidence_window_s
        / photon_energy
}

/// Fidelity of the photon pair at the ground given source fidelity, noise and
/// single-photon transmission.
pub fn pair_fidelity(source_fidelity: f64, n_bar: f64, eta_tr: f64) -> Result<f64> {
    check_range("source fidelity", source_fidelity, 0.25, 1.0, "[1/4, 1]")?;
    check_range("mean background photons", n_bar, 0.0, f64::INFINITY, "[0, inf)")?;
    if !(eta_tr > 0.0) {
        return Err(ModelError::ZeroTransmission);
    }
    let noise = 1.0 + n_bar / eta_tr;
    Ok(0.25 * (1.0 + (4.0 * source_fidelity - 1.0) / (noise * noise)))
}
