//! CSV emission and atomic file writes.
//!
//! Every CSV starts with one `# params:` comment line holding the fully
//! resolved scenario, so a file can be traced back to the inputs that made it.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::flyby::FlybyProfile;
use crate::node;
use crate::repeater::{RowStatus, Scheme, SweepRow};
use crate::scenario::{fmt_num, Scenario};

pub fn params_header(scenario: &Scenario) -> String {
    let pairs: Vec<String> = scenario
        .resolved()
        .into_iter()
        .map(|(k, v)| format!("{k}={}", v.replace(' ', "")))
        .collect();
    format!("# params: {}\n", pairs.join(" "))
}

pub const PROFILE_COLUMNS: &str = "t_s,d_m,zenith_rad,eta_tr,eta2_tr,f_pair";

pub fn profile_csv(scenario: &Scenario, profile: &FlybyProfile) -> String {
    let mut out = params_header(scenario);
    out.push_str(PROFILE_COLUMNS);
    out.push('\n');
    let at = |v: &[f64], i: usize| v.get(i).map(|&x| fmt_num(x)).unwrap_or_default();
    for i in 0..profile.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_num(profile.times[i]),
            at(&profile.slant_m, i),
            at(&profile.zenith_rad, i),
            at(&profile.eta_tr, i),
            fmt_num(profile.eta2_tr[i]),
            fmt_num(profile.f_pair[i]),
        );
    }
    out
}

/// Column header of a sweep table with fidelity columns `F0..F{max_level}`.
pub fn sweep_header(max_level: u32, leading: &[&str]) -> String {
    let mut cols: Vec<String> = leading.iter().map(|s| s.to_string()).collect();
    cols.extend(
        [
            "L_total_km",
            "n_levels",
            "h_km",
            "L0_km",
            "T_FB_s",
            "P0",
            "F_pair_avg",
            "rate_hz",
            "pairs_per_flyby",
            "fidelity_final",
        ]
        .map(String::from),
    );
    cols.extend((0..=max_level).map(|k| format!("F{k}")));
    cols.push("scheme".into());
    cols.push("status".into());
    cols.join(",")
}

fn sweep_line(row: &SweepRow, max_level: u32, leading: &[String]) -> String {
    let mut fields: Vec<String> = leading.to_vec();
    fields.push(fmt_num(row.total_distance_m / 1e3));
    fields.push(row.n_levels.to_string());
    fields.push(fmt_num(row.altitude_m / 1e3));
    fields.push(fmt_num(row.link_length_m / 1e3));
    match &row.result {
        Some(r) => {
            fields.push(fmt_num(r.aggregates.flyby_time));
            fields.push(fmt_num(r.aggregates.p0));
            fields.push(fmt_num(r.aggregates.f_pair_avg));
            fields.push(fmt_num(r.rate_hz));
            fields.push(fmt_num(r.pairs_per_flyby));
            fields.push(fmt_num(r.fidelity_final));
            for k in 0..=max_level as usize {
                fields.push(r.fidelity_per_level.get(k).map(|&f| fmt_num(f)).unwrap_or_default());
            }
        }
        None => fields.extend(std::iter::repeat_n(String::new(), 6 + max_level as usize + 1)),
    }
    fields.push(
        match row.scheme {
            Scheme::Repeater => "repeater",
            Scheme::Direct => "direct",
        }
        .into(),
    );
    fields.push(row.status.label().into());
    fields.join(",")
}

/// A sweep table; each entry of `groups` carries its own leading column values.
pub fn sweep_csv(scenario: &Scenario, leading: &[&str], groups: &[(Vec<String>, Vec<SweepRow>)]) -> String {
    let max_level = scenario.sweep.nesting_levels.iter().copied().max().unwrap_or(0);
    let mut out = params_header(scenario);
    out.push_str(&sweep_header(max_level, leading));
    out.push('\n');
    for (lead, rows) in groups {
        for row in rows {
            out.push_str(&sweep_line(row, max_level, lead));
            out.push('\n');
            if let RowStatus::Unphysical(msg) = &row.status {
                log::warn!("row at {} km: {msg}", row.total_distance_m / 1e3);
            }
        }
    }
    out
}

/// Loading success on a log-spaced cooperativity grid.
pub fn caps_curve_csv(scenario: &Scenario) -> String {
    let spec = scenario.caps_curve;
    let mut out = params_header(scenario);
    out.push_str("c_in,eta_caps\n");
    let (lo, hi) = (spec.c_in_min.ln(), spec.c_in_max.ln());
    for i in 0..spec.points {
        let frac = if spec.points > 1 {
            i as f64 / (spec.points - 1) as f64
        } else {
            0.0
        };
        let c = (lo + frac * (hi - lo)).exp();
        let _ = writeln!(out, "{},{}", fmt_num(c), fmt_num(node::caps_success(c)));
    }
    out
}

/// Writes to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
