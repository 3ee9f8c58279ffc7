//! Scenario files.
//!
//! A scenario is a TOML file of `[section]` tables with `key = value` entries.
//! Every key carries its unit in the name (`_m`, `_km`, `_hz`, `_rad`, `_deg`).
//! Keys are looked up in a flat registry, so a misspelled key is rejected with
//! the closest valid name. Command-line overrides use the same dotted names.

use serde::Serialize;
use thiserror::Error;
use toml::Value;

use crate::channel::{ApertureInterpretation, BackgroundUnits};
use crate::error::ModelError;
use crate::mc::{McConfig, TimeModel, Tolerance, Tolerances};
use crate::repeater::RepeaterConfig;

/// The bundled reference parameter set (configs/table1.cfg).
pub const TABLE1_CFG: &str = include_str!("../configs/table1.cfg");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed configuration: {0}")]
    Syntax(String),

    #[error("unknown key `{key}`{}", suggestion.as_ref().map(|s| format!(", did you mean `{s}`?")).unwrap_or_default())]
    UnknownKey { key: String, suggestion: Option<String> },

    #[error("key `{key}` expects {expected}, got `{found}`")]
    BadValue {
        key: String,
        expected: &'static str,
        found: String,
    },

    #[error("`{0}` is not a sweepable parameter; sweepable keys: {1}")]
    NotSweepable(String, String),

    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Distance grid for the `rates` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub total_distance_km: Vec<f64>,
    pub nesting_levels: Vec<u32>,
    pub include_direct: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            total_distance_km: (1..=20).map(|k| 1000.0 * k as f64).collect(),
            nesting_levels: vec![1, 2, 3],
            include_direct: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapsCurveSpec {
    pub c_in_min: f64,
    pub c_in_max: f64,
    pub points: usize,
}

impl Default for CapsCurveSpec {
    fn default() -> Self {
        Self {
            c_in_min: 0.1,
            c_in_max: 1000.0,
            points: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub repeater: RepeaterConfig,
    pub profile_samples: usize,
    pub sweep: SweepSpec,
    pub caps_curve: CapsCurveSpec,
    pub mc: McConfig,
    pub tolerances: Tolerances,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            repeater: RepeaterConfig::default(),
            profile_samples: 2001,
            sweep: SweepSpec::default(),
            caps_curve: CapsCurveSpec::default(),
            mc: McConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Float,
    Int,
    Bool,
    Text,
    FloatList,
    IntList,
}

type Setter = fn(&mut Scenario, &Value) -> Result<(), &'static str>;
type Getter = fn(&Scenario) -> String;

struct Key {
    name: &'static str,
    kind: Kind,
    set: Setter,
    /// Aliases (other units) have no getter; the canonical key is reported.
    get: Option<Getter>,
}

fn float(v: &Value) -> Result<f64, &'static str> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err("a number"),
    }
}

fn uint(v: &Value) -> Result<u64, &'static str> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        Value::Float(x) if *x >= 0.0 && x.fract() == 0.0 && *x < 9.0e15 => Ok(*x as u64),
        _ => Err("a non-negative integer"),
    }
}

fn small_uint(v: &Value) -> Result<u32, &'static str> {
    uint(v).and_then(|x| u32::try_from(x).map_err(|_| "an integer below 2^32"))
}

fn boolean(v: &Value) -> Result<bool, &'static str> {
    v.as_bool().ok_or("true or false")
}

fn floats(v: &Value) -> Result<Vec<f64>, &'static str> {
    match v {
        Value::Array(items) => items
            .iter()
            .map(float)
            .collect::<Result<_, _>>()
            .map_err(|_| "a list of numbers"),
        other => float(other).map(|x| vec![x]).map_err(|_| "a list of numbers"),
    }
}

fn uints(v: &Value) -> Result<Vec<u32>, &'static str> {
    match v {
        Value::Array(items) => items
            .iter()
            .map(small_uint)
            .collect::<Result<_, _>>()
            .map_err(|_| "a list of non-negative integers"),
        other => small_uint(other)
            .map(|x| vec![x])
            .map_err(|_| "a list of non-negative integers"),
    }
}

/// A number, or the string "none" to leave the quantity unset.
fn optional_float(v: &Value) -> Result<Option<f64>, &'static str> {
    match v {
        Value::String(s) if s.eq_ignore_ascii_case("none") => Ok(None),
        other => float(other).map(Some).map_err(|_| "a number or \"none\""),
    }
}

fn tolerance(v: &Value) -> Result<Tolerance, &'static str> {
    const EXPECTED: &str = "\"sigma:<k>\" or \"rel:<r>\"";
    let s = v.as_str().ok_or(EXPECTED)?;
    let (kind, num) = s.split_once(':').ok_or(EXPECTED)?;
    let x: f64 = num.trim().parse().map_err(|_| EXPECTED)?;
    if !(x >= 0.0) {
        return Err(EXPECTED);
    }
    match kind.trim() {
        "sigma" => Ok(Tolerance::Sigma(x)),
        "rel" => Ok(Tolerance::Relative(x)),
        _ => Err(EXPECTED),
    }
}

fn text(v: &Value) -> Result<&str, &'static str> {
    v.as_str().ok_or("a string")
}

/// Formats a number so that it reads back to the same value.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-3..1e7).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn fmt_list<T: Copy>(xs: &[T], f: impl Fn(T) -> String) -> String {
    format!("[{}]", xs.iter().map(|&x| f(x)).collect::<Vec<_>>().join(", "))
}

fn fmt_tolerance(t: Tolerance) -> String {
    match t {
        Tolerance::Sigma(k) => format!("\"sigma:{}\"", fmt_num(k)),
        Tolerance::Relative(r) => format!("\"rel:{}\"", fmt_num(r)),
    }
}

macro_rules! float_key {
    ($name:literal, $($field:ident).+) => {
        Key {
            name: $name,
            kind: Kind::Float,
            set: |s, v| {
                s.$($field).+ = float(v)?;
                Ok(())
            },
            get: Some(|s| fmt_num(s.$($field).+)),
        }
    };
    ($name:literal, $($field:ident).+, scale = $scale:expr) => {
        Key {
            name: $name,
            kind: Kind::Float,
            set: |s, v| {
                s.$($field).+ = float(v)? * $scale;
                Ok(())
            },
            get: None,
        }
    };
}

const KM: f64 = 1e3;
const DEG: f64 = std::f64::consts::PI / 180.0;

static KEYS: &[Key] = &[
    float_key!("orbit.altitude_m", repeater.geometry.altitude_m),
    float_key!("orbit.altitude_km", repeater.geometry.altitude_m, scale = KM),
    float_key!("orbit.link_length_m", repeater.geometry.link_length_m),
    float_key!("orbit.link_length_km", repeater.geometry.link_length_m, scale = KM),
    float_key!("orbit.max_zenith_angle_rad", repeater.geometry.max_zenith_rad),
    float_key!(
        "orbit.max_zenith_angle_deg",
        repeater.geometry.max_zenith_rad,
        scale = DEG
    ),
    float_key!("orbit.earth_radius_m", repeater.geometry.earth_radius_m),
    float_key!("orbit.gravitational_parameter_m3_s2", repeater.geometry.mu_m3_s2),
    float_key!("channel.wavelength_m", repeater.channel.wavelength_m),
    float_key!("channel.beam_waist_m", repeater.channel.beam_waist_m),
    float_key!("channel.beam_quality_m2", repeater.channel.beam_quality),
    float_key!("channel.receiver_radius_m", repeater.channel.receiver_radius_m),
    float_key!("channel.pointing_sigma_rad", repeater.channel.pointing_sigma_rad),
    float_key!("channel.zenith_transmittance", repeater.channel.zenith_transmittance),
    float_key!("channel.coupling_efficiency", repeater.channel.coupling_efficiency),
    float_key!("channel.sky_irradiance_w_m2_um_sr", repeater.channel.sky_irradiance),
    float_key!("channel.field_of_view_sr", repeater.channel.field_of_view_sr),
    float_key!("channel.filter_bandwidth_m", repeater.channel.filter_bandwidth_m),
    float_key!("channel.coincidence_window_s", repeater.channel.coincidence_window_s),
    Key {
        name: "channel.aperture_interpretation",
        kind: Kind::Text,
        set: |s, v| {
            s.repeater.channel.aperture = match text(v)? {
                "literal" => ApertureInterpretation::Literal,
                "radius" => ApertureInterpretation::Radius,
                _ => return Err("\"literal\" or \"radius\""),
            };
            Ok(())
        },
        get: Some(|s| match s.repeater.channel.aperture {
            ApertureInterpretation::Literal => "\"literal\"".into(),
            ApertureInterpretation::Radius => "\"radius\"".into(),
        }),
    },
    Key {
        name: "channel.background_units",
        kind: Kind::Text,
        set: |s, v| {
            s.repeater.channel.background_units = match text(v)? {
                "as_printed" => BackgroundUnits::AsPrinted,
                "dimensional" => BackgroundUnits::Dimensional,
                _ => return Err("\"as_printed\" or \"dimensional\""),
            };
            Ok(())
        },
        get: Some(|s| match s.repeater.channel.background_units {
            BackgroundUnits::AsPrinted => "\"as_printed\"".into(),
            BackgroundUnits::Dimensional => "\"dimensional\"".into(),
        }),
    },
    float_key!("source.pair_fidelity", repeater.source.pair_fidelity),
    float_key!("source.repetition_rate_hz", repeater.source.repetition_rate_hz),
    float_key!("source.emission_efficiency", repeater.source.emission_efficiency),
    Key {
        name: "source.mux_channels",
        kind: Kind::Int,
        set: |s, v| {
            s.repeater.source.mux_channels = small_uint(v)?;
            Ok(())
        },
        get: Some(|s| s.repeater.source.mux_channels.to_string()),
    },
    float_key!("source.demux_efficiency", repeater.source.demux_efficiency),
    float_key!(
        "source.direct_repetition_rate_hz",
        repeater.source.direct_repetition_rate_hz
    ),
    Key {
        name: "node.internal_cooperativity",
        kind: Kind::Float,
        set: |s, v| {
            s.repeater.node.internal_cooperativity = optional_float(v)?;
            Ok(())
        },
        get: Some(|s| {
            s.repeater
                .node
                .internal_cooperativity
                .map_or("\"none\"".into(), fmt_num)
        }),
    },
    Key {
        name: "node.caps_efficiency",
        kind: Kind::Float,
        set: |s, v| {
            s.repeater.node.caps_efficiency = optional_float(v)?;
            Ok(())
        },
        get: Some(|s| s.repeater.node.caps_efficiency.map_or("\"none\"".into(), fmt_num)),
    },
    float_key!("node.caps_fidelity", repeater.node.caps_fidelity),
    float_key!("node.rydberg_fidelity", repeater.node.rydberg_fidelity),
    float_key!("node.readout_fidelity", repeater.node.readout_fidelity),
    float_key!("node.detection_efficiency", repeater.node.detection_efficiency),
    float_key!("node.spin_decoherence_rate_hz", repeater.node.spin_decoherence_rate_hz),
    Key {
        name: "repeater.nesting_levels",
        kind: Kind::Int,
        set: |s, v| {
            s.repeater.n_levels = small_uint(v)?;
            Ok(())
        },
        get: Some(|s| s.repeater.n_levels.to_string()),
    },
    float_key!("repeater.gate_efficiency", repeater.gate_efficiency),
    Key {
        name: "repeater.detector_exponent",
        kind: Kind::Int,
        set: |s, v| {
            s.repeater.detector_exponent = match small_uint(v)? {
                1 => 1,
                2 => 2,
                _ => return Err("1 or 2"),
            };
            Ok(())
        },
        get: Some(|s| s.repeater.detector_exponent.to_string()),
    },
    Key {
        name: "quadrature.initial_samples",
        kind: Kind::Int,
        set: |s, v| {
            let n = uint(v)? as usize;
            if n < 3 || n.is_multiple_of(2) {
                return Err("an odd integer >= 3");
            }
            s.repeater.refinement.initial_samples = n;
            Ok(())
        },
        get: Some(|s| s.repeater.refinement.initial_samples.to_string()),
    },
    float_key!("quadrature.rel_tol", repeater.refinement.rel_tol),
    Key {
        name: "quadrature.max_doublings",
        kind: Kind::Int,
        set: |s, v| {
            s.repeater.refinement.max_doublings = uint(v)? as usize;
            Ok(())
        },
        get: Some(|s| s.repeater.refinement.max_doublings.to_string()),
    },
    Key {
        name: "flyby.profile_samples",
        kind: Kind::Int,
        set: |s, v| {
            let n = uint(v)? as usize;
            if n < 3 || n.is_multiple_of(2) {
                return Err("an odd integer >= 3");
            }
            s.profile_samples = n;
            Ok(())
        },
        get: Some(|s| s.profile_samples.to_string()),
    },
    Key {
        name: "sweep.total_distance_km",
        kind: Kind::FloatList,
        set: |s, v| {
            s.sweep.total_distance_km = floats(v)?;
            Ok(())
        },
        get: Some(|s| fmt_list(&s.sweep.total_distance_km, fmt_num)),
    },
    Key {
        name: "sweep.nesting_levels",
        kind: Kind::IntList,
        set: |s, v| {
            s.sweep.nesting_levels = uints(v)?;
            Ok(())
        },
        get: Some(|s| fmt_list(&s.sweep.nesting_levels, |x| x.to_string())),
    },
    Key {
        name: "sweep.include_direct",
        kind: Kind::Bool,
        set: |s, v| {
            s.sweep.include_direct = boolean(v)?;
            Ok(())
        },
        get: Some(|s| s.sweep.include_direct.to_string()),
    },
    float_key!("caps_curve.c_in_min", caps_curve.c_in_min),
    float_key!("caps_curve.c_in_max", caps_curve.c_in_max),
    Key {
        name: "caps_curve.points",
        kind: Kind::Int,
        set: |s, v| {
            s.caps_curve.points = uint(v)? as usize;
            Ok(())
        },
        get: Some(|s| s.caps_curve.points.to_string()),
    },
    Key {
        name: "mc.trials",
        kind: Kind::Int,
        set: |s, v| {
            s.mc.trials = uint(v)?;
            Ok(())
        },
        get: Some(|s| s.mc.trials.to_string()),
    },
    Key {
        name: "mc.seed",
        kind: Kind::Int,
        set: |s, v| {
            s.mc.seed = uint(v)?;
            Ok(())
        },
        get: Some(|s| s.mc.seed.to_string()),
    },
    Key {
        name: "mc.time_model",
        kind: Kind::Text,
        set: |s, v| {
            s.mc.time_model = match text(v)? {
                "constant-p" => TimeModel::ConstantP,
                "time-resolved" => TimeModel::TimeResolved,
                _ => return Err("\"constant-p\" or \"time-resolved\""),
            };
            Ok(())
        },
        get: Some(|s| match s.mc.time_model {
            TimeModel::ConstantP => "\"constant-p\"".into(),
            TimeModel::TimeResolved => "\"time-resolved\"".into(),
        }),
    },
    Key {
        name: "mc.rate_tolerance",
        kind: Kind::Text,
        set: |s, v| {
            s.tolerances.rate = tolerance(v)?;
            Ok(())
        },
        get: Some(|s| fmt_tolerance(s.tolerances.rate)),
    },
    Key {
        name: "mc.pairs_tolerance",
        kind: Kind::Text,
        set: |s, v| {
            s.tolerances.pairs = tolerance(v)?;
            Ok(())
        },
        get: Some(|s| fmt_tolerance(s.tolerances.pairs)),
    },
    Key {
        name: "mc.waiting_time_tolerance",
        kind: Kind::Text,
        set: |s, v| {
            s.tolerances.waiting_time = tolerance(v)?;
            Ok(())
        },
        get: Some(|s| fmt_tolerance(s.tolerances.waiting_time)),
    },
    Key {
        name: "mc.fidelity_tolerance",
        kind: Kind::Text,
        set: |s, v| {
            s.tolerances.fidelity = tolerance(v)?;
            Ok(())
        },
        get: Some(|s| fmt_tolerance(s.tolerances.fidelity)),
    },
];

fn lookup(name: &str) -> Result<&'static Key, ConfigError> {
    KEYS.iter()
        .find(|k| k.name == name)
        .ok_or_else(|| ConfigError::UnknownKey {
            key: name.to_string(),
            suggestion: nearest_key(name),
        })
}

fn nearest_key(name: &str) -> Option<String> {
    KEYS.iter()
        .map(|k| (strsim::jaro_winkler(name, k.name), k.name))
        .filter(|(score, _)| *score > 0.7)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, n)| n.to_string())
}

/// Every key a config file or `--set` accepts.
pub fn known_keys() -> Vec<&'static str> {
    KEYS.iter().map(|k| k.name).collect()
}

/// Scalar numeric keys that `sensitivity` can vary.
pub fn sweepable_keys() -> Vec<&'static str> {
    KEYS.iter()
        .filter(|k| {
            matches!(k.kind, Kind::Float | Kind::Int)
                && !k.name.starts_with("mc.")
                && !k.name.starts_with("quadrature.")
                && !k.name.starts_with("caps_curve.")
                && k.name != "flyby.profile_samples"
        })
        .map(|k| k.name)
        .collect()
}

impl Scenario {
    /// The bundled reference scenario.
    pub fn table1() -> Self {
        Self::from_toml_str(TABLE1_CFG).expect("bundled table1.cfg parses")
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Parses a scenario on top of the built-in defaults.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
        let mut scenario = Self::default();
        for (section, body) in &table {
            let Value::Table(entries) = body else {
                return Err(ConfigError::Syntax(format!(
                    "top-level entry `{section}` must be a [section] table"
                )));
            };
            for (key, value) in entries {
                if value.is_table() {
                    return Err(ConfigError::Syntax(format!(
                        "nested table `{section}.{key}` is not allowed"
                    )));
                }
                scenario.set_value(&format!("{section}.{key}"), value)?;
            }
        }
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn set_value(&mut self, name: &str, value: &Value) -> Result<(), ConfigError> {
        let key = lookup(name)?;
        (key.set)(self, value).map_err(|expected| ConfigError::BadValue {
            key: name.to_string(),
            expected,
            found: value.to_string(),
        })
    }

    /// Applies one `section.key=value` override. Bare words are taken as strings.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (name, raw) = assignment.split_once('=').ok_or_else(|| {
            ConfigError::Syntax(format!("override `{assignment}` is not of the form section.key=value"))
        })?;
        let (name, raw) = (name.trim(), raw.trim());
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        self.set_value(name, &value)
    }

    /// Sets a sweepable numeric key.
    pub fn set_parameter(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        let sweepable = sweepable_keys();
        if !sweepable.contains(&name) {
            return Err(ConfigError::NotSweepable(name.to_string(), sweepable.join(", ")));
        }
        let key = lookup(name)?;
        let v = match key.kind {
            Kind::Int => Value::Integer(value as i64),
            _ => Value::Float(value),
        };
        if key.kind == Kind::Int && value.fract() != 0.0 {
            return Err(ConfigError::BadValue {
                key: name.to_string(),
                expected: "an integer",
                found: value.to_string(),
            });
        }
        self.set_value(name, &v)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.repeater.validate()?;
        if self.mc.trials == 0 {
            return Err(ConfigError::BadValue {
                key: "mc.trials".into(),
                expected: "an integer >= 1",
                found: "0".into(),
            });
        }
        let c = &self.caps_curve;
        if !(c.c_in_min > 0.0 && c.c_in_max > c.c_in_min) {
            return Err(ConfigError::BadValue {
                key: "caps_curve.c_in_max".into(),
                expected: "0 < c_in_min < c_in_max",
                found: format!("[{}, {}]", c.c_in_min, c.c_in_max),
            });
        }
        Ok(())
    }

    /// Every canonical key with its current value, in registry order.
    pub fn resolved(&self) -> Vec<(&'static str, String)> {
        KEYS.iter()
            .filter_map(|k| k.get.map(|get| (k.name, get(self))))
            .collect()
    }

    /// The resolved scenario as a config file that parses back to the same values.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        let mut current = "";
        for (name, value) in self.resolved() {
            let (section, key) = name.split_once('.').expect("dotted key");
            if section != current {
                if !out.is_empty() {
                    out.push('\n');
                }
                out.push_str(&format!("[{section}]\n"));
                current = section;
            }
            out.push_str(&format!("{key} = {value}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_matches_builtin_defaults() {
        assert_eq!(Scenario::table1(), Scenario::default());
    }

    #[test]
    fn round_trip_through_toml() {
        let mut s = Scenario::table1();
        s.apply_override("orbit.altitude_km=1000").unwrap();
        s.apply_override("node.internal_cooperativity=96.5").unwrap();
        s.apply_override("mc.time_model=time-resolved").unwrap();
        s.apply_override("sweep.nesting_levels=[2, 3]").unwrap();
        assert_eq!(Scenario::from_toml_str(&s.to_toml()).unwrap(), s);
    }

    #[test]
    fn unit_aliases_convert() {
        let s = Scenario::from_toml_str("[orbit]\naltitude_km = 500\nmax_zenith_angle_deg = 60\n").unwrap();
        assert_eq!(s.repeater.geometry.altitude_m, 5e5);
        assert!((s.repeater.geometry.max_zenith_rad - 60f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn misspelled_key_gets_a_suggestion() {
        let err = Scenario::from_toml_str("[source]\nrepetition_rate_hzz = 1e7\n").unwrap_err();
        match err {
            ConfigError::UnknownKey { key, suggestion } => {
                assert_eq!(key, "source.repetition_rate_hzz");
                assert_eq!(suggestion.as_deref(), Some("source.repetition_rate_hz"));
            }
            other => panic!("{other}"),
        }
        assert!(matches!(
            Scenario::from_toml_str("[bogus]\nthing = 1\n"),
            Err(ConfigError::UnknownKey { .. })
        ));
    }

    #[test]
    fn bad_values_are_reported() {
        assert!(matches!(
            Scenario::from_toml_str("[channel]\nbackground_units = \"si\"\n"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            Scenario::from_toml_str("[source]\npair_fidelity = 1.5\n"),
            Err(ConfigError::Model(_))
        ));
        assert!(matches!(
            Scenario::from_toml_str("altitude_m = 1\n"),
            Err(ConfigError::Syntax(_))
        ));
        assert!(Scenario::default().apply_override("orbit.altitude_m").is_err());
    }

    #[test]
    fn sensitivity_keys() {
        let keys = sweepable_keys();
        for k in [
            "source.pair_fidelity",
            "node.spin_decoherence_rate_hz",
            "orbit.altitude_m",
            "orbit.altitude_km",
        ] {
            assert!(keys.contains(&k), "{k}");
        }
        let mut s = Scenario::default();
        s.set_parameter("node.spin_decoherence_rate_hz", 1.0).unwrap();
        assert_eq!(s.repeater.node.spin_decoherence_rate_hz, 1.0);
        assert!(matches!(
            s.set_parameter("mc.seed", 1.0),
            Err(ConfigError::NotSweepable(..))
        ));
    }

    #[test]
    fn resolved_lists_canonical_keys_only() {
        let names: Vec<&str> = Scenario::default().resolved().into_iter().map(|(k, _)| k).collect();
        assert!(names.contains(&"orbit.altitude_m"));
        assert!(!names.contains(&"orbit.altitude_km"));
    }

    #[test]
    fn number_formatting_round_trips() {
        for x in [0.0, 1.0, 780e-9, 3.986004418e14, 0.05, 1.5e-5, 96.497] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }
}
