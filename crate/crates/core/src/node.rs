//! Ground-station devices: the pair source state, the cavity-assisted
//! photon-scattering (CAPS) memory-loading gate, and Werner-state decoherence
//! of a stored atom-atom pair.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, ModelError, Result};
use crate::state::{Bell, Mat4, TwoQubitState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    pub pair_fidelity: f64,
    pub repetition_rate_hz: f64,
    pub emission_efficiency: f64,
    pub mux_channels: u32,
    pub demux_efficiency: f64,
    /// Repetition rate used for single-satellite direct transmission.
    pub direct_repetition_rate_hz: f64,
}

impl Default for SourceParams {
    fn default() -> Self {
        Self {
            pair_fidelity: 0.998,
            repetition_rate_hz: 10e6,
            emission_efficiency: 0.9,
            mux_channels: 100,
            demux_efficiency: 0.73,
            direct_repetition_rate_hz: 1e9,
        }
    }
}

impl SourceParams {
    pub fn validate(&self) -> Result<()> {
        check_range("source.pair_fidelity", self.pair_fidelity, 0.25, 1.0, "[1/4, 1]")?;
        check_range(
            "source.repetition_rate_hz",
            self.repetition_rate_hz,
            0.0,
            f64::INFINITY,
            "[0, inf)",
        )?;
        check_range(
            "source.direct_repetition_rate_hz",
            self.direct_repetition_rate_hz,
            0.0,
            f64::INFINITY,
            "[0, inf)",
        )?;
        check_range(
            "source.emission_efficiency",
            self.emission_efficiency,
            f64::MIN_POSITIVE,
            1.0,
            "(0, 1]",
        )?;
        check_range(
            "source.demux_efficiency",
            self.demux_efficiency,
            f64::MIN_POSITIVE,
            1.0,
            "(0, 1]",
        )?;
        if self.mux_channels == 0 {
            return Err(ModelError::OutOfRange {
                quantity: "source.mux_channels",
                value: 0.0,
                expected: "[1, inf)",
            });
        }
        Ok(())
    }
}

/// Atom-cavity rates, all in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub g: f64,
    pub kappa_in: f64,
    pub kappa_ex: f64,
    pub gamma: f64,
}

impl CavityParams {
    pub fn internal_cooperativity(&self) -> f64 {
        self.g * self.g / (2.0 * self.kappa_in * self.gamma)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_in + self.kappa_ex
    }

    /// Same cavity with the external coupling set to its amplitude-matching optimum.
    pub fn optimally_coupled(self) -> Self {
        Self {
            kappa_ex: optimal_external_coupling(&self),
            ..self
        }
    }
}

pub fn optimal_external_coupling(cavity: &CavityParams) -> f64 {
    cavity.kappa_in * (1.0 + 2.0 * cavity.internal_cooperativity()).sqrt()
}

/// Reflection amplitudes `(r0, r1)` for the uncoupled and coupled atomic state.
pub fn reflectivities(cavity: &CavityParams) -> (f64, f64) {
    let kappa = cavity.kappa();
    let r0 = 1.0 - 2.0 * cavity.kappa_ex / kappa;
    let r1 = 1.0 - 2.0 * cavity.kappa_ex * cavity.gamma / (cavity.g * cavity.g + kappa * cavity.gamma);
    (r0, r1)
}

/// Heralded memory-loading probability at optimal coupling.
pub fn caps_success(c_in: f64) -> f64 {
    if c_in.is_infinite() {
        return 1.0;
    }
    let s = (1.0 + 2.0 * c_in).sqrt();
    1.0 - 2.0 * s / (1.0 + c_in + s)
}

/// Internal cooperativity at which [`caps_success`] reaches `eta`, by bisection.
pub fn cooperativity_for(eta: f64) -> Result<f64> {
    check_range("CAPS efficiency", eta, 0.0, 1.0 - f64::EPSILON, "[0, 1)")?;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while caps_success(hi) < eta {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if caps_success(mid) < eta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeParams {
    pub internal_cooperativity: Option<f64>,
    pub caps_efficiency: Option<f64>,
    pub caps_fidelity: f64,
    pub rydberg_fidelity: f64,
    pub readout_fidelity: f64,
    pub detection_efficiency: f64,
    /// Spin decoherence rate `gamma + 2 gamma*` (Hz).
    pub spin_decoherence_rate_hz: f64,
}

impl Default for NodeParams {
    fn default() -> Self {
        Self {
            internal_cooperativity: None,
            caps_efficiency: Some(0.75),
            caps_fidelity: 0.99,
            rydberg_fidelity: 0.995,
            readout_fidelity: 0.999,
            detection_efficiency: 0.9,
            spin_decoherence_rate_hz: 0.05,
        }
    }
}

impl NodeParams {
    pub fn validate(&self) -> Result<()> {
        check_range("node.caps_fidelity", self.caps_fidelity, 0.0, 1.0, "[0, 1]")?;
        check_range("node.rydberg_fidelity", self.rydberg_fidelity, 0.0, 1.0, "[0, 1]")?;
        check_range("node.readout_fidelity", self.readout_fidelity, 0.0, 1.0, "[0, 1]")?;
        check_range(
            "node.detection_efficiency",
            self.detection_efficiency,
            0.0,
            1.0,
            "[0, 1]",
        )?;
        check_range(
            "node.spin_decoherence_rate_hz",
            self.spin_decoherence_rate_hz,
            0.0,
            f64::INFINITY,
            "[0, inf)",
        )?;
        if let Some(c) = self.internal_cooperativity {
            check_range("node.internal_cooperativity", c, 0.0, f64::INFINITY, "[0, inf)")?;
        }
        if let Some(eta) = self.caps_efficiency {
            check_range("node.caps_efficiency", eta, 0.0, 1.0, "[0, 1]")?;
        }
        self.caps_efficiency().map(|_| ())
    }

    /// Memory-loading efficiency. An explicit value wins over the cooperativity.
    pub fn caps_efficiency(&self) -> Result<f64> {
        match (self.caps_efficiency, self.internal_cooperativity) {
            (Some(eta), Some(c)) => {
                let implied = caps_success(c);
                if (implied - eta).abs() > 1e-9 {
                    log::warn!(
                        "node.caps_efficiency = {eta} overrides the value {implied:.6} implied by internal_cooperativity = {c}"
                    );
                }
                Ok(eta)
            }
            (Some(eta), None) => Ok(eta),
            (None, Some(c)) => Ok(caps_success(c)),
            (None, None) => Err(ModelError::Invalid(
                "node needs caps_efficiency or internal_cooperativity".into(),
            )),
        }
    }
}

/// Source pair state: weight `f_s` on |Psi+> and the rest spread evenly.
pub fn source_state(f_s: f64) -> Result<TwoQubitState> {
    check_range("source fidelity", f_s, 0.25, 1.0, "[1/4, 1]")?;
    let rest = (1.0 - f_s) / 3.0;
    let rho = Bell::PsiPlus.projector() * Complex::from(f_s)
        + (Bell::PhiMinus.projector() + Bell::PhiPlus.projector() + Bell::PsiMinus.projector()) * Complex::from(rest);
    TwoQubitState::new(rho)
}

type Complex = num_complex::Complex64;

/// Werner parameter of an elementary link after memory loading.
pub fn elementary_link_fidelity(f_pair_avg: f64, f_caps: f64) -> Result<f64> {
    check_range("pair fidelity", f_pair_avg, 0.0, 1.0, "[0, 1]")?;
    check_range("CAPS fidelity", f_caps, 0.0, 1.0, "[0, 1]")?;
    let f0 = (4.0 * f_pair_avg * f_caps - 1.0) / 3.0;
    if f0 < -1.0 / 3.0 {
        return Err(ModelError::UnphysicalWerner { level: 0, value: f0 });
    }
    Ok(f0)
}

/// `F |psi-><psi-| + (1 - F)/4 I` written out in the computational basis.
pub fn werner_matrix(f: f64) -> Result<TwoQubitState> {
    check_range("Werner parameter", f, -1.0 / 3.0, 1.0, "[-1/3, 1]")?;
    let a = (1.0 - f) / 4.0;
    let b = (1.0 + f) / 4.0;
    let c = -f / 2.0;
    TwoQubitState::from_real([
        [a, 0.0, 0.0, 0.0],
        [0.0, b, c, 0.0],
        [0.0, c, b, 0.0],
        [0.0, 0.0, 0.0, a],
    ])
}

/// Reads the Werner parameter back from a matrix of exact Werner form.
pub fn werner_parameter(state: &TwoQubitState) -> Result<f64> {
    const TOL: f64 = 1e-12;
    let f = -2.0 * state.get(1, 2).re;
    let expected = werner_matrix(f.clamp(-1.0 / 3.0, 1.0))?;
    let worst = (state.matrix() - expected.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if worst > TOL {
        return Err(ModelError::NotWerner(format!(
            "deviates from the Werner matrix with F = {f} by {worst:e}"
        )));
    }
    Ok(f)
}

/// Element-wise spin decay (`gamma`) and dephasing (`gamma_star`) map for a
/// stored Werner pair after time `t`.
///
/// The printed map does not preserve the trace for `gamma > 0`; the result
/// is returned as-is without renormalisation.
pub fn decohere_matrix(state: &TwoQubitState, gamma: f64, gamma_star: f64, t: f64) -> Result<TwoQubitState> {
    check_range("time", t, 0.0, f64::INFINITY, "[0, inf)")?;
    check_range("spin decay rate", gamma, 0.0, f64::INFINITY, "[0, inf)")?;
    check_range("spin dephasing rate", gamma_star, 0.0, f64::INFINITY, "[0, inf)")?;
    let f = werner_parameter(state)?;
    let decay = (-gamma * t).exp();
    let gamma_s = gamma + 2.0 * gamma_star;
    let coherence = -(f / 2.0) * (-gamma_s * t).exp();
    let mut rho = Mat4::zeros();
    rho[(0, 0)] = ((1.0 - f) / 4.0 + (1.0 - decay) * (1.0 + f) / 4.0).into();
    rho[(1, 1)] = (decay * (1.0 + f) / 4.0).into();
    rho[(2, 2)] = rho[(1, 1)];
    rho[(1, 2)] = coherence.into();
    rho[(2, 1)] = coherence.into();
    rho[(3, 3)] = ((1.0 - f) / 4.0 * (-2.0 * gamma * t).exp()).into();
    Ok(TwoQubitState::from_unchecked(rho))
}

/// Fidelity of a stored Werner pair with its initial state after time `t`.
pub fn werner_fidelity_decay(f: f64, gamma_s: f64, t: f64) -> f64 {
    0.25 + (f - 0.25) * (-gamma_s * t).exp()
}

/// One row comparing the element-wise matrix map with the scalar decay law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceComparison {
    pub t_s: f64,
    pub trace_matrix_map: f64,
    pub singlet_fraction_matrix_map: f64,
    pub fidelity_scalar_law: f64,
}

pub fn compare_decoherence_models(
    f: f64,
    gamma: f64,
    gamma_star: f64,
    times: &[f64],
) -> Result<Vec<DecoherenceComparison>> {
    let initial = werner_matrix(f)?;
    let gamma_s = gamma + 2.0 * gamma_star;
    times
        .iter()
        .map(|&t| {
            let rho = decohere_matrix(&initial, gamma, gamma_star, t)?;
            Ok(DecoherenceComparison {
                t_s: t,
                trace_matrix_map: rho.trace(),
                singlet_fraction_matrix_map: rho.singlet_fraction(),
                fidelity_scalar_law: werner_fidelity_decay(f, gamma_s, t),
            })
        })
        .collect()
}
