//! Nested repeater performance: distribution rates, pairs per flyby,
//! waiting times and the level-by-level fidelity recursion.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{check_range, ModelError, Result};
use crate::flyby::{Flyby, FlybyAggregates};
use crate::node::{self, NodeParams, SourceParams};
use crate::orbit::OrbitGeometry;
use crate::quadrature::Refinement;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeaterConfig {
    /// Nesting level `n`; the chain has `2^n` elementary links.
    pub n_levels: u32,
    /// Entanglement-swapping gate efficiency (1 for a Rydberg gate).
    pub gate_efficiency: f64,
    /// Power of the detection efficiency in the rate and waiting-time formulas.
    pub detector_exponent: i32,
    pub geometry: OrbitGeometry,
    pub channel: ChannelParams,
    pub source: SourceParams,
    pub node: NodeParams,
    pub refinement: Refinement,
}

impl Default for RepeaterConfig {
    fn default() -> Self {
        Self {
            n_levels: 2,
            gate_efficiency: 1.0,
            detector_exponent: 1,
            geometry: OrbitGeometry::default(),
            channel: ChannelParams::default(),
            source: SourceParams::default(),
            node: NodeParams::default(),
            refinement: Refinement::default(),
        }
    }
}

impl RepeaterConfig {
    pub fn links(&self) -> u64 {
        1u64 << self.n_levels
    }

    pub fn total_distance_m(&self) -> f64 {
        self.links() as f64 * self.geometry.link_length_m
    }

    /// Same configuration with the elementary link length chosen so that the
    /// chain spans `total_m`.
    pub fn spanning(mut self, total_m: f64) -> Self {
        self.geometry.link_length_m = total_m / self.links() as f64;
        self
    }

    pub fn with_levels(mut self, n_levels: u32) -> Self {
        self.n_levels = n_levels;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.channel.validate()?;
        self.source.validate()?;
        self.node.validate()?;
        check_range(
            "repeater.gate_efficiency",
            self.gate_efficiency,
            f64::MIN_POSITIVE,
            1.0,
            "(0, 1]",
        )?;
        if !matches!(self.detector_exponent, 1 | 2) {
            return Err(ModelError::OutOfRange {
                quantity: "repeater.detector_exponent",
                value: self.detector_exponent as f64,
                expected: "{1, 2}",
            });
        }
        if self.n_levels > 20 {
            return Err(ModelError::OutOfRange {
                quantity: "repeater.nesting_levels",
                value: self.n_levels as f64,
                expected: "[0, 20]",
            });
        }
        Ok(())
    }

    pub fn flyby(&self) -> Result<Flyby> {
        Flyby::new(self.geometry, self.channel, self.source.pair_fidelity)
    }

    fn detection(&self) -> f64 {
        self.node.detection_efficiency.powi(self.detector_exponent)
    }

    /// Success probability of one attempt on one multiplexed channel.
    pub fn attempt_success(&self, p0: f64) -> Result<f64> {
        Ok(self.source.demux_efficiency.powi(2)
            * self.source.emission_efficiency
            * p0
            * self.node.caps_efficiency()?
            * self.detection())
    }

    /// Attempt rate summed over all multiplexed channels.
    pub fn attempt_rate_hz(&self) -> f64 {
        self.source.mux_channels as f64 * self.source.repetition_rate_hz
    }
}

pub fn swap_probability(n: u32, gate_efficiency: f64) -> f64 {
    (2.0 / 3.0 * gate_efficiency).powi(n as i32)
}

/// Single-channel distribution rate.
pub fn rate(cfg: &RepeaterConfig, agg: &FlybyAggregates) -> Result<f64> {
    Ok(cfg.source.repetition_rate_hz
        * cfg.source.emission_efficiency
        * agg.p0
        * cfg.node.caps_efficiency()?
        * cfg.detection()
        * swap_probability(cfg.n_levels, cfg.gate_efficiency))
}

pub fn rate_multiplexed(cfg: &RepeaterConfig, agg: &FlybyAggregates) -> Result<f64> {
    let mux = cfg.source.mux_channels as f64 * cfg.source.demux_efficiency.powi(2);
    Ok(mux * rate(cfg, agg)?)
}

/// Single-satellite direct transmission over one link.
pub fn rate_direct(cfg: &RepeaterConfig, agg: &FlybyAggregates) -> f64 {
    cfg.source.mux_channels as f64 * cfg.source.direct_repetition_rate_hz * cfg.source.emission_efficiency * agg.p0
}

pub fn pairs_per_flyby(rate_hz: f64, flyby_time: f64) -> f64 {
    rate_hz * flyby_time
}

/// Mean time to herald one elementary link.
pub fn elementary_time(cfg: &RepeaterConfig, agg: &FlybyAggregates) -> Result<f64> {
    let denom = cfg.attempt_rate_hz() * cfg.attempt_success(agg.p0)?;
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(ModelError::Invalid(format!(
            "elementary link rate is {denom}; establishment time undefined"
        )));
    }
    Ok(1.0 / denom)
}

/// Mean time the early half of level `n` waits for its partner: `(1/2)(3/2)^(n-1) T0`.
pub fn waiting_time(n: u32, cfg: &RepeaterConfig, agg: &FlybyAggregates) -> Result<f64> {
    if n == 0 {
        return Err(ModelError::Invalid("waiting time is defined for levels n >= 1".into()));
    }
    Ok(waiting_time_from(n, elementary_time(cfg, agg)?))
}

pub fn waiting_time_from(n: u32, t0: f64) -> f64 {
    3f64.powi(n as i32 - 1) / 2f64.powi(n as i32) * t0
}

/// One swap: decohered early pair times fresh late pair times operation fidelities.
pub fn swap_fidelity(f_prev: f64, operation: f64, gamma_s: f64, wait: f64) -> f64 {
    operation * node::werner_fidelity_decay(f_prev, gamma_s, wait) * f_prev
}

/// Werner parameters `F_0 ..= F_n`.
pub fn final_fidelity(cfg: &RepeaterConfig, agg: &FlybyAggregates) -> Result<Vec<f64>> {
    let f0 = node::elementary_link_fidelity(agg.f_pair_avg, cfg.node.caps_fidelity)?;
    let t0 = if cfg.n_levels > 0 {
        elementary_time(cfg, agg)?
    } else {
        0.0
    };
    fidelity_recursion(
        f0,
        cfg.n_levels,
        operation_fidelity(&cfg.node),
        cfg.node.spin_decoherence_rate_hz,
        t0,
    )
}

pub fn operation_fidelity(node: &NodeParams) -> f64 {
    node.rydberg_fidelity * node.readout_fidelity.powi(2)
}

pub fn fidelity_recursion(f0: f64, n_levels: u32, operation: f64, gamma_s: f64, t0: f64) -> Result<Vec<f64>> {
    if !(-1.0 / 3.0..=1.0).contains(&f0) {
        return Err(ModelError::UnphysicalWerner { level: 0, value: f0 });
    }
    let mut levels = Vec::with_capacity(n_levels as usize + 1);
    levels.push(f0);
    let mut f = f0;
    for k in 1..=n_levels {
        f = swap_fidelity(f, operation, gamma_s, waiting_time_from(k, t0));
        if !(f >= -1.0 / 3.0) {
            return Err(ModelError::UnphysicalWerner {
                level: k as usize,
                value: f,
            });
        }
        levels.push(f);
    }
    Ok(levels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeaterResult {
    pub n_levels: u32,
    pub total_distance_m: f64,
    pub altitude_m: f64,
    pub link_length_m: f64,
    /// Multiplexed distribution rate.
    pub rate_hz: f64,
    pub pairs_per_flyby: f64,
    pub fidelity_per_level: Vec<f64>,
    pub waiting_time_per_level: Vec<f64>,
    pub elementary_time_s: f64,
    pub fidelity_final: f64,
    pub aggregates: FlybyAggregates,
}

/// Evaluates a repeater chain from already computed flyby aggregates.
pub fn evaluate_with(cfg: &RepeaterConfig, agg: FlybyAggregates) -> Result<RepeaterResult> {
    cfg.validate()?;
    let rate_hz = rate_multiplexed(cfg, &agg)?;
    let t0 = elementary_time(cfg, &agg)?;
    let fidelity_per_level = final_fidelity(cfg, &agg)?;
    Ok(RepeaterResult {
        n_levels: cfg.n_levels,
        total_distance_m: cfg.total_distance_m(),
        altitude_m: cfg.geometry.altitude_m,
        link_length_m: cfg.geometry.link_length_m,
        rate_hz,
        pairs_per_flyby: pairs_per_flyby(rate_hz, agg.flyby_time),
        waiting_time_per_level: (1..=cfg.n_levels).map(|n| waiting_time_from(n, t0)).collect(),
        elementary_time_s: t0,
        fidelity_final: *fidelity_per_level.last().expect("level 0 always present"),
        fidelity_per_level,
        aggregates: agg,
    })
}

pub fn evaluate(cfg: &RepeaterConfig) -> Result<RepeaterResult> {
    cfg.validate()?;
    let agg = cfg.flyby()?.aggregates(&cfg.refinement)?;
    evaluate_with(cfg, agg)
}

/// Direct transmission from one satellite across the whole distance.
pub fn evaluate_direct(cfg: &RepeaterConfig, total_m: f64) -> Result<RepeaterResult> {
    let direct = cfg.with_levels(0).spanning(total_m);
    direct.validate()?;
    let agg = direct.flyby()?.aggregates(&direct.refinement)?;
    let rate_hz = rate_direct(&direct, &agg);
    Ok(RepeaterResult {
        n_levels: 0,
        total_distance_m: total_m,
        altitude_m: direct.geometry.altitude_m,
        link_length_m: total_m,
        rate_hz,
        pairs_per_flyby: pairs_per_flyby(rate_hz, agg.flyby_time),
        fidelity_per_level: Vec::new(),
        waiting_time_per_level: Vec::new(),
        elementary_time_s: f64::NAN,
        fidelity_final: agg.f_pair_avg,
        aggregates: agg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Repeater,
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    NoVisibility,
    Unphysical(String),
}

impl RowStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::NoVisibility => "no_visibility",
            RowStatus::Unphysical(_) => "unphysical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub total_distance_m: f64,
    pub n_levels: u32,
    pub altitude_m: f64,
    pub link_length_m: f64,
    pub status: RowStatus,
    pub result: Option<RepeaterResult>,
}

impl SweepRow {
    fn from_outcome(scheme: Scheme, cfg: &RepeaterConfig, total_m: f64, outcome: Result<RepeaterResult>) -> Self {
        let (status, result) = match outcome {
            Ok(r) => (RowStatus::Ok, Some(r)),
            Err(ModelError::NoVisibility { .. }) => (RowStatus::NoVisibility, None),
            Err(e) => (RowStatus::Unphysical(e.to_string()), None),
        };
        let link_length_m = match scheme {
            Scheme::Repeater => total_m / cfg.links() as f64,
            Scheme::Direct => total_m,
        };
        Self {
            scheme,
            total_distance_m: total_m,
            n_levels: if scheme == Scheme::Direct { 0 } else { cfg.n_levels },
            altitude_m: cfg.geometry.altitude_m,
            link_length_m,
            status,
            result,
        }
    }
}

/// One row per (template, total distance), in input order. Points without a
/// visibility window are kept and flagged.
pub fn distance_sweep(templates: &[RepeaterConfig], totals_m: &[f64], include_direct: bool) -> Vec<SweepRow> {
    let mut jobs: Vec<(Scheme, RepeaterConfig, f64)> = Vec::new();
    for cfg in templates {
        for &total in totals_m {
            jobs.push((Scheme::Repeater, *cfg, total));
        }
    }
    if include_direct {
        if let Some(cfg) = templates.first() {
            for &total in totals_m {
                jobs.push((Scheme::Direct, *cfg, total));
            }
        }
    }
    jobs.par_iter()
        .map(|(scheme, cfg, total)| {
            let outcome = match scheme {
                Scheme::Repeater => evaluate(&cfg.spanning(*total)),
                Scheme::Direct => evaluate_direct(cfg, *total),
            };
            SweepRow::from_outcome(*scheme, cfg, *total, outcome)
        })
        .collect()
}
