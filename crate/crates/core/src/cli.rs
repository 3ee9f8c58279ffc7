//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 model error,
//! 3 Monte Carlo comparison outside tolerance.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::error::ModelError;
use crate::mc::{self, ComparisonReport, TimeModel};
use crate::output;
use crate::repeater::{self, RepeaterConfig, RowStatus, SweepRow};
use crate::scenario::{fmt_num, ConfigError, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MODEL: i32 = 2;
pub const EXIT_COMPARISON: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "satrep", version, about = "Satellite-assisted quantum repeater simulator")]
pub struct Cli {
    /// Scenario file; the bundled reference scenario is used when absent.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Override one key, e.g. `--set orbit.altitude_km=1000`. Repeatable.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,

    /// Output file; standard output when absent.
    #[arg(long, short, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,

    /// Monte Carlo seed (overrides mc.seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Monte Carlo trial count (overrides mc.trials).
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transmission and pair fidelity over one pass (CSV).
    Flyby {
        /// Number of time samples (odd).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Pairs per flyby and fidelity against total distance (CSV).
    Rates {
        /// Total distances in km, comma separated; empty for a header-only table.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        distances_km: Option<Vec<f64>>,
        /// Nesting levels, comma separated (1 = 2 links, 2 = 4 links, 3 = 8 links).
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<u32>>,
        /// Add direct-transmission rows.
        #[arg(long, conflicts_with = "no_direct")]
        direct: bool,
        /// Leave out direct-transmission rows.
        #[arg(long)]
        no_direct: bool,
    },
    /// Distance sweeps repeated for several values of one parameter (CSV).
    Sensitivity {
        /// Dotted key to vary, e.g. node.spin_decoherence_rate_hz.
        #[arg(long)]
        parameter: String,
        /// Values, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Monte Carlo check of the analytic chain (JSON report).
    Mc {
        #[arg(long, value_enum)]
        time_model: Option<TimeModelArg>,
        /// Also write one CSV line per trial to this file.
        #[arg(long, value_name = "FILE")]
        dump_trials: Option<PathBuf>,
    },
    /// CAPS loading success against internal cooperativity (CSV).
    CapsCurve,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TimeModelArg {
    ConstantP,
    TimeResolved,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("Monte Carlo comparison outside tolerance")]
    Comparison,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Model(_)) => EXIT_MODEL,
            CliError::Config(_) => EXIT_USAGE,
            CliError::Model(_) | CliError::Io { .. } => EXIT_MODEL,
            CliError::Comparison => EXIT_COMPARISON,
        }
    }
}

/// Machine-readable output of the `mc` command.
#[derive(Debug, Serialize)]
pub struct McRun {
    pub seed: u64,
    pub time_model: TimeModel,
    #[serde(flatten)]
    pub report: ComparisonReport,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match run_parsed(&cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn load_scenario(cli: &Cli) -> Result<Scenario, ConfigError> {
    let mut scenario = match &cli.config {
        Some(path) => Scenario::from_file(path)?,
        None => Scenario::table1(),
    };
    for assignment in &cli.overrides {
        scenario.apply_override(assignment)?;
    }
    if let Some(seed) = cli.seed {
        scenario.mc.seed = seed;
    }
    if let Some(trials) = cli.trials {
        scenario.mc.trials = trials;
    }
    scenario.validate()?;
    Ok(scenario)
}

/// What a command produced: the data file and a short human-readable summary.
#[derive(Debug, Default)]
pub struct Outcome {
    pub data: String,
    pub summary: String,
    /// Extra files written besides the main output.
    pub side_files: Vec<(PathBuf, String)>,
    pub comparison_passed: bool,
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    output::write_atomic(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn run_parsed(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let outcome = execute(cli)?;
    let stdout_err = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    for (path, contents) in &outcome.side_files {
        write_file(path, contents)?;
    }
    // the summary goes to stdout unless stdout carries the data itself
    match &cli.output {
        Some(path) => {
            write_file(path, &outcome.data)?;
            stdout.write_all(outcome.summary.as_bytes()).map_err(stdout_err)?;
        }
        None => {
            stdout.write_all(outcome.data.as_bytes()).map_err(stdout_err)?;
            let _ = stderr.write_all(outcome.summary.as_bytes());
        }
    }
    if outcome.comparison_passed {
        Ok(())
    } else {
        Err(CliError::Comparison)
    }
}

fn sweep_templates(scenario: &Scenario, levels: &[u32]) -> Vec<RepeaterConfig> {
    levels.iter().map(|&n| scenario.repeater.with_levels(n)).collect()
}

fn totals_m(scenario: &Scenario) -> Vec<f64> {
    scenario.sweep.total_distance_km.iter().map(|km| km * 1e3).collect()
}

fn sweep_summary(rows: &[SweepRow]) -> String {
    let ok = rows.iter().filter(|r| r.status == RowStatus::Ok).count();
    format!("{} rows, {} ok, {} flagged\n", rows.len(), ok, rows.len() - ok)
}

/// Runs the parsed command without touching the terminal or the file system.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let mut scenario = load_scenario(cli)?;
    let mut outcome = Outcome {
        comparison_passed: true,
        ..Outcome::default()
    };
    match &cli.command {
        Command::Flyby { samples } => {
            if let Some(n) = samples {
                scenario.apply_override(&format!("flyby.profile_samples={n}"))?;
            }
            let cfg = &scenario.repeater;
            let flyby = cfg.flyby()?;
            let profile = flyby.profile(scenario.profile_samples)?;
            let agg = flyby.aggregates(&cfg.refinement)?;
            outcome.data = output::profile_csv(&scenario, &profile);
            outcome.summary = format!(
                "T_FB_s = {}\nP0 = {}\nF_pair_avg = {}\n",
                fmt_num(agg.flyby_time),
                fmt_num(agg.p0),
                fmt_num(agg.f_pair_avg)
            );
        }
        Command::Rates {
            distances_km,
            levels,
            direct,
            no_direct,
        } => {
            if let Some(d) = distances_km {
                scenario.sweep.total_distance_km = d.clone();
            }
            if let Some(l) = levels {
                scenario.sweep.nesting_levels = l.clone();
            }
            if *direct {
                scenario.sweep.include_direct = true;
            }
            if *no_direct {
                scenario.sweep.include_direct = false;
            }
            let templates = sweep_templates(&scenario, &scenario.sweep.nesting_levels);
            let rows = repeater::distance_sweep(&templates, &totals_m(&scenario), scenario.sweep.include_direct);
            outcome.summary = sweep_summary(&rows);
            outcome.data = output::sweep_csv(&scenario, &[], &[(Vec::new(), rows)]);
        }
        Command::Sensitivity { parameter, values } => {
            let mut groups = Vec::with_capacity(values.len());
            let mut all = Vec::new();
            for &v in values {
                let mut s = scenario.clone();
                s.set_parameter(parameter, v)?;
                s.validate()?;
                let templates = sweep_templates(&s, &s.sweep.nesting_levels);
                let rows = repeater::distance_sweep(&templates, &totals_m(&s), s.sweep.include_direct);
                all.extend(rows.iter().cloned());
                groups.push((vec![parameter.clone(), fmt_num(v)], rows));
            }
            outcome.summary = sweep_summary(&all);
            outcome.data = output::sweep_csv(&scenario, &["parameter", "value"], &groups);
        }
        Command::Mc {
            time_model,
            dump_trials,
        } => {
            if let Some(m) = time_model {
                scenario.mc.time_model = match m {
                    TimeModelArg::ConstantP => TimeModel::ConstantP,
                    TimeModelArg::TimeResolved => TimeModel::TimeResolved,
                };
            }
            let cfg = &scenario.repeater;
            let flyby = cfg.flyby()?;
            let agg = flyby.aggregates(&cfg.refinement)?;
            let profile = match scenario.mc.time_model {
                TimeModel::TimeResolved => Some(flyby.profile(scenario.profile_samples)?),
                TimeModel::ConstantP => None,
            };
            let trials = mc::simulate_trials(&scenario.mc, cfg, &agg, profile.as_ref())?;
            if let Some(path) = dump_trials {
                outcome
                    .side_files
                    .push((path.clone(), mc::trials_csv(&trials, cfg.n_levels)));
            }
            let estimate = mc::summarize(cfg, &agg, &trials);
            let analytic = repeater::evaluate_with(cfg, agg)?;
            let report = mc::compare_report(&analytic, &estimate, &scenario.tolerances)?;
            outcome.comparison_passed = report.pass;
            let mut summary = String::new();
            for row in &report.rows {
                summary.push_str(&format!(
                    "{:<16} analytic {:<24} mc {:<24} z {:<10} {}\n",
                    row.quantity,
                    fmt_num(row.analytic),
                    fmt_num(row.mc_mean),
                    row.z.map(|z| format!("{z:.3}")).unwrap_or_else(|| "n/a".into()),
                    if row.pass { "PASS" } else { "FAIL" }
                ));
            }
            outcome.summary = summary;
            let run = McRun {
                seed: scenario.mc.seed,
                time_model: scenario.mc.time_model,
                report,
            };
            outcome.data = serde_json::to_string_pretty(&run).expect("report is plain data") + "\n";
        }
        Command::CapsCurve => {
            outcome.data = output::caps_curve_csv(&scenario);
            let root = crate::node::cooperativity_for(0.75)?;
            outcome.summary = format!("caps_success = 0.75 at c_in = {}\n", fmt_num(root));
        }
    }
    Ok(outcome)
}
