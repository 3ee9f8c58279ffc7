//! Monte Carlo cross-check of the analytic repeater model.
//!
//! Every trial runs on its own ChaCha stream selected by `(seed, trial)`, so
//! results do not depend on thread scheduling. A trial draws the heralding
//! time of each elementary link, merges neighbouring segments level by level
//! (the early segment decoheres while it waits for the late one), and counts
//! the end-to-end pairs heralded during the flyby.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{ModelError, Result};
use crate::flyby::{FlybyAggregates, FlybyProfile};
use crate::node;
use crate::repeater::{self, RepeaterConfig, RepeaterResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeModel {
    /// Per-attempt success fixed at its flyby average.
    #[default]
    ConstantP,
    /// Per-attempt success follows the sampled two-photon transmission.
    TimeResolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub time_model: TimeModel,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 0x5EED,
            time_model: TimeModel::ConstantP,
        }
    }
}

/// Independent random stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`; `None` when `n < 2`.
    pub std_err: Option<f64>,
    pub n: u64,
}

impl McEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std_err: None,
                n: 0,
            };
        }
        // constant samples report their value exactly, not a rounded sum
        let constant = samples.iter().all(|&x| x == samples[0]);
        let mean = if constant {
            samples[0]
        } else {
            samples.iter().sum::<f64>() / n as f64
        };
        let std_err = (n >= 2).then(|| {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        });
        Self {
            mean,
            std_err,
            n: n as u64,
        }
    }
}

/// Geometric number of attempts (first success included) times the attempt interval.
pub fn simulate_link<R: Rng + ?Sized>(attempt_interval: f64, p_success: f64, rng: &mut R) -> Result<f64> {
    if !(p_success > 0.0 && p_success <= 1.0) {
        return Err(ModelError::OutOfRange {
            quantity: "per-attempt success probability",
            value: p_success,
            expected: "(0, 1]",
        });
    }
    if p_success == 1.0 {
        return Ok(attempt_interval);
    }
    let u: f64 = 1.0 - rng.gen::<f64>();
    let failures = (u.ln() / (-p_success).ln_1p()).floor();
    Ok((failures + 1.0) * attempt_interval)
}

/// Binomial count of successes. Above `i32::MAX` trials with a small mean the
/// binomial sampler in rand_distr 0.4 panics, so the Poisson limit is used there
/// (relative error of order `p`).
pub fn successes<R: Rng + ?Sized>(trials: u64, p: f64, rng: &mut R) -> Result<u64> {
    let mean = trials as f64 * p;
    if trials > i32::MAX as u64 && mean < 10.0 {
        if mean == 0.0 {
            return Ok(0);
        }
        return Poisson::new(mean)
            .map(|d| d.sample(rng) as u64)
            .map_err(|e| ModelError::Invalid(format!("poisson draw: {e}")));
    }
    Binomial::new(trials, p)
        .map(|b| b.sample(rng))
        .map_err(|e| ModelError::Invalid(format!("binomial draw: {e}")))
}

/// Attempt timing and success shared by all trials of one run.
#[derive(Debug, Clone)]
struct LinkModel<'a> {
    interval: f64,
    /// Success probability excluding the two-photon transmission.
    success_factor: f64,
    p_const: f64,
    profile: Option<(&'a FlybyProfile, Vec<f64>)>,
}

impl<'a> LinkModel<'a> {
    fn new(cfg: &RepeaterConfig, agg: &FlybyAggregates, profile: Option<&'a FlybyProfile>) -> Result<Self> {
        let interval = 1.0 / cfg.attempt_rate_hz();
        let success_factor = cfg.attempt_success(1.0)?;
        let p_const = cfg.attempt_success(agg.p0)?;
        let profile = profile.map(|p| {
            // cumulative expected successes, exact for piecewise-linear eta2
            let dt = p.spacing();
            let mut cum = Vec::with_capacity(p.len());
            cum.push(0.0);
            for w in p.eta2_tr.windows(2) {
                let last = *cum.last().unwrap();
                cum.push(last + 0.5 * (w[0] + w[1]) * dt * success_factor / interval);
            }
            (p, cum)
        });
        Ok(Self {
            interval,
            success_factor,
            p_const,
            profile,
        })
    }

    /// Heralding time of one link; `None` if it does not herald within the flyby.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Option<f64>> {
        match &self.profile {
            None => simulate_link(self.interval, self.p_const, rng).map(Some),
            Some((p, cum)) => {
                let target = -(1.0 - rng.gen::<f64>()).ln();
                if target > *cum.last().unwrap() {
                    return Ok(None);
                }
                let i = cum.partition_point(|&c| c < target).max(1);
                let frac = (target - cum[i - 1]) / (cum[i] - cum[i - 1]);
                Ok(Some(p.times[i - 1] + frac * p.spacing()))
            }
        }
    }

    fn pairs(&self, flyby_time: f64, p_es: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
        let draw = |attempts: u64, p: f64, rng: &mut ChaCha8Rng| -> Result<u64> {
            let p = (p * p_es).clamp(0.0, 1.0);
            if attempts == 0 || p == 0.0 {
                return Ok(0);
            }
            successes(attempts, p, rng)
        };
        match &self.profile {
            None => {
                let attempts = (flyby_time / self.interval).floor() as u64;
                Ok(draw(attempts, self.p_const, rng)? as f64)
            }
            Some((p, _)) => {
                let mut total = 0u64;
                for (i, w) in p.eta2_tr.windows(2).enumerate() {
                    let a = (p.times[i] / self.interval).floor() as u64;
                    let b = (p.times[i + 1] / self.interval).floor() as u64;
                    total += draw(b - a, self.success_factor * 0.5 * (w[0] + w[1]), rng)?;
                }
                Ok(total as f64)
            }
        }
    }
}

/// What one trial produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub pairs: f64,
    /// `None` when some link did not herald within the flyby.
    pub completion_s: Option<f64>,
    pub fidelity: Option<f64>,
    /// Mean fidelity of the merged segments at levels `1..=n`.
    pub level_fidelity: Vec<f64>,
    /// Mean idle gap of the early segment at levels `1..=n`.
    pub level_gap_s: Vec<f64>,
}

fn run_trial(
    trial: u64,
    mc: &McConfig,
    cfg: &RepeaterConfig,
    agg: &FlybyAggregates,
    model: &LinkModel<'_>,
    f0: f64,
) -> Result<TrialOutcome> {
    let mut rng = trial_rng(mc.seed, trial);
    let operation = repeater::operation_fidelity(&cfg.node);
    let gamma_s = cfg.node.spin_decoherence_rate_hz;

    let mut segments: Vec<(f64, f64)> = Vec::with_capacity(cfg.links() as usize);
    let mut complete = true;
    for _ in 0..cfg.links() {
        match model.sample(&mut rng)? {
            Some(t) => segments.push((t, f0)),
            None => complete = false,
        }
    }
    let p_es = repeater::swap_probability(cfg.n_levels, cfg.gate_efficiency);
    if !complete {
        return Ok(TrialOutcome {
            trial,
            pairs: 0.0,
            completion_s: None,
            fidelity: None,
            level_fidelity: Vec::new(),
            level_gap_s: Vec::new(),
        });
    }
    let mut level_fidelity = Vec::with_capacity(cfg.n_levels as usize);
    let mut level_gap_s = Vec::with_capacity(cfg.n_levels as usize);
    while segments.len() > 1 {
        let merged: Vec<(f64, f64)> = segments
            .chunks_exact(2)
            .map(|pair| {
                let (early, late) = if pair[0].0 <= pair[1].0 {
                    (pair[0], pair[1])
                } else {
                    (pair[1], pair[0])
                };
                let gap = late.0 - early.0;
                let f = if early.1 == late.1 {
                    repeater::swap_fidelity(early.1, operation, gamma_s, gap)
                } else {
                    operation * node::werner_fidelity_decay(early.1, gamma_s, gap) * late.1
                };
                (late.0, f, gap)
            })
            .map(|(t, f, gap)| {
                level_gap_s.push(gap);
                (t, f)
            })
            .collect();
        let count = merged.len();
        let gaps = level_gap_s.split_off(level_gap_s.len() - count);
        level_gap_s.push(gaps.iter().sum::<f64>() / count as f64);
        level_fidelity.push(merged.iter().map(|s| s.1).sum::<f64>() / count as f64);
        segments = merged;
    }
    let (completion, fidelity) = segments[0];
    let pairs = model.pairs(agg.flyby_time, p_es, &mut rng)?;
    Ok(TrialOutcome {
        trial,
        pairs,
        completion_s: Some(completion),
        fidelity: Some(fidelity),
        level_fidelity,
        level_gap_s,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEstimate {
    pub n_levels: u32,
    pub altitude_m: f64,
    pub link_length_m: f64,
    pub flyby_time: f64,
    pub trials: u64,
    pub failed_trials: u64,
    pub pairs: McEstimate,
    pub fidelity: McEstimate,
    pub completion_s: McEstimate,
    pub fidelity_per_level: Vec<McEstimate>,
    pub waiting_gap_per_level: Vec<McEstimate>,
}

/// Runs all trials and returns the per-trial outcomes in trial order.
pub fn simulate_trials(
    mc: &McConfig,
    cfg: &RepeaterConfig,
    agg: &FlybyAggregates,
    profile: Option<&FlybyProfile>,
) -> Result<Vec<TrialOutcome>> {
    if mc.trials == 0 {
        return Err(ModelError::Invalid("mc.trials must be >= 1".into()));
    }
    if cfg.n_levels == 0 {
        return Err(ModelError::Invalid("chain simulation needs nesting_levels >= 1".into()));
    }
    let profile = match mc.time_model {
        TimeModel::ConstantP => None,
        TimeModel::TimeResolved => {
            Some(profile.ok_or_else(|| ModelError::Invalid("time-resolved model needs a flyby profile".into()))?)
        }
    };
    let model = LinkModel::new(cfg, agg, profile)?;
    let f0 = node::elementary_link_fidelity(agg.f_pair_avg, cfg.node.caps_fidelity)?;
    (0..mc.trials)
        .into_par_iter()
        .map(|trial| run_trial(trial, mc, cfg, agg, &model, f0))
        .collect()
}

pub fn summarize(cfg: &RepeaterConfig, agg: &FlybyAggregates, outcomes: &[TrialOutcome]) -> ChainEstimate {
    let done: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.fidelity.is_some()).collect();
    let column = |f: &dyn Fn(&TrialOutcome) -> f64| -> Vec<f64> { done.iter().map(|o| f(o)).collect() };
    let levels = cfg.n_levels as usize;
    ChainEstimate {
        n_levels: cfg.n_levels,
        altitude_m: cfg.geometry.altitude_m,
        link_length_m: cfg.geometry.link_length_m,
        flyby_time: agg.flyby_time,
        trials: outcomes.len() as u64,
        failed_trials: (outcomes.len() - done.len()) as u64,
        pairs: McEstimate::from_samples(&outcomes.iter().map(|o| o.pairs).collect::<Vec<_>>()),
        fidelity: McEstimate::from_samples(&column(&|o| o.fidelity.unwrap())),
        completion_s: McEstimate::from_samples(&column(&|o| o.completion_s.unwrap())),
        fidelity_per_level: (0..levels)
            .map(|k| McEstimate::from_samples(&column(&|o| o.level_fidelity[k])))
            .collect(),
        waiting_gap_per_level: (0..levels)
            .map(|k| McEstimate::from_samples(&column(&|o| o.level_gap_s[k])))
            .collect(),
    }
}

pub fn simulate_chain(
    mc: &McConfig,
    cfg: &RepeaterConfig,
    agg: &FlybyAggregates,
    profile: Option<&FlybyProfile>,
) -> Result<ChainEstimate> {
    let outcomes = simulate_trials(mc, cfg, agg, profile)?;
    Ok(summarize(cfg, agg, &outcomes))
}

/// Per-trial CSV dump.
pub fn trials_csv(outcomes: &[TrialOutcome], n_levels: u32) -> String {
    let mut out = String::from("trial,pairs,completion_s,fidelity");
    for k in 1..=n_levels {
        let _ = write!(out, ",gap_{k}_s,F_{k}");
    }
    out.push('\n');
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for o in outcomes {
        let _ = write!(
            out,
            "{},{},{},{}",
            o.trial,
            o.pairs,
            opt(o.completion_s),
            opt(o.fidelity)
        );
        for k in 0..n_levels as usize {
            let _ = write!(
                out,
                ",{},{}",
                opt(o.level_gap_s.get(k).copied()),
                opt(o.level_fidelity.get(k).copied())
            );
        }
        out.push('\n');
    }
    out
}

/// Acceptance rule for one compared quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    /// `|z| <= k` standard errors. With zero standard error the values must agree to 1e-12.
    Sigma(f64),
    /// `|mc - analytic| <= r |analytic|`.
    Relative(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rate: Tolerance,
    pub pairs: Tolerance,
    pub waiting_time: Tolerance,
    pub fidelity: Tolerance,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rate: Tolerance::Sigma(3.0),
            pairs: Tolerance::Sigma(3.0),
            waiting_time: Tolerance::Relative(0.15),
            fidelity: Tolerance::Relative(0.01),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub quantity: String,
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_stderr: Option<f64>,
    pub z: Option<f64>,
    pub tolerance: Tolerance,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ComparisonRow {
    pub fn new(quantity: impl Into<String>, analytic: f64, mc: &McEstimate, tolerance: Tolerance) -> Self {
        let diff = mc.mean - analytic;
        let exact = diff.abs() <= 1e-12 * analytic.abs().max(f64::MIN_POSITIVE);
        let z = match mc.std_err {
            Some(se) if se > 0.0 => Some(diff / se),
            Some(_) if exact => Some(0.0),
            _ => None,
        };
        let pass = match tolerance {
            Tolerance::Sigma(k) => match (mc.std_err, z) {
                (Some(se), Some(z)) if se > 0.0 => z.abs() <= k,
                _ => exact,
            },
            Tolerance::Relative(r) => diff.abs() <= r * analytic.abs(),
        };
        // degenerate statistics never pass silently
        let note = if !mc.mean.is_finite() {
            Some("no completed trials".to_string())
        } else if mc.std_err.is_none() {
            Some("std_err undefined (fewer than 2 samples)".to_string())
        } else {
            None
        };
        Self {
            quantity: quantity.into(),
            analytic,
            mc_mean: mc.mean,
            mc_stderr: mc.std_err,
            z,
            tolerance,
            pass: pass && note.is_none(),
            note,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n_levels: u32,
    pub altitude_m: f64,
    pub link_length_m: f64,
    pub trials: u64,
    pub failed_trials: u64,
    pub rows: Vec<ComparisonRow>,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn row(&self, quantity: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }
}

pub fn compare_report(analytic: &RepeaterResult, mc: &ChainEstimate, tol: &Tolerances) -> Result<ComparisonReport> {
    let same = analytic.n_levels == mc.n_levels
        && analytic.altitude_m == mc.altitude_m
        && analytic.link_length_m == mc.link_length_m
        && analytic.aggregates.flyby_time == mc.flyby_time;
    if !same {
        return Err(ModelError::Invalid(format!(
            "analytic result (n = {}, h = {} m, L0 = {} m) and Monte Carlo estimate (n = {}, h = {} m, L0 = {} m) come from different configurations",
            analytic.n_levels, analytic.altitude_m, analytic.link_length_m, mc.n_levels, mc.altitude_m, mc.link_length_m
        )));
    }
    let scale = |e: &McEstimate, s: f64| McEstimate {
        mean: e.mean * s,
        std_err: e.std_err.map(|x| x * s),
        n: e.n,
    };
    let mut rows = vec![
        ComparisonRow::new(
            "rate_hz",
            analytic.rate_hz,
            &scale(&mc.pairs, 1.0 / mc.flyby_time),
            tol.rate,
        ),
        ComparisonRow::new("pairs_per_flyby", analytic.pairs_per_flyby, &mc.pairs, tol.pairs),
    ];
    for (k, gap) in mc.waiting_gap_per_level.iter().enumerate() {
        rows.push(ComparisonRow::new(
            format!("T_{}", k + 1),
            analytic.waiting_time_per_level[k],
            gap,
            tol.waiting_time,
        ));
    }
    for (k, f) in mc.fidelity_per_level.iter().enumerate() {
        rows.push(ComparisonRow::new(
            format!("F_{}", k + 1),
            analytic.fidelity_per_level[k + 1],
            f,
            tol.fidelity,
        ));
    }
    Ok(ComparisonReport {
        n_levels: mc.n_levels,
        altitude_m: mc.altitude_m,
        link_length_m: mc.link_length_m,
        trials: mc.trials,
        failed_trials: mc.failed_trials,
        pass: rows.iter().all(|r| r.pass),
        rows,
    })
}
