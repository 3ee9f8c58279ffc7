//! Monte Carlo check of the 4-link reference chain against the analytic model.
//!
//! cargo run --release --example monte_carlo

use satrep::mc::{self, McConfig, Tolerances};
use satrep::repeater::{self, RepeaterConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RepeaterConfig::default();
    let agg = cfg.flyby()?.aggregates(&cfg.refinement)?;
    let run = McConfig {
        trials: 100_000,
        seed: 1,
        ..McConfig::default()
    };
    let estimate = mc::simulate_chain(&run, &cfg, &agg, None)?;
    let analytic = repeater::evaluate_with(&cfg, agg)?;
    let report = mc::compare_report(&analytic, &estimate, &Tolerances::default())?;
    for row in &report.rows {
        println!(
            "{:<16} analytic {:>12.6e}  mc {:>12.6e} +- {:<10.2e} {}",
            row.quantity,
            row.analytic,
            row.mc_mean,
            row.mc_stderr.unwrap_or(f64::NAN),
            if row.pass { "pass" } else { "FAIL" }
        );
    }

    // the waiting gap for two independent geometric links, exactly
    let p = cfg.attempt_success(agg.p0)?;
    let tau = 1.0 / cfg.attempt_rate_hz();
    println!(
        "exact E|X - Y| = {:.5} s, analytic T_1 = {:.5} s",
        2.0 * (1.0 - p) / (p * (2.0 - p)) * tau,
        analytic.waiting_time_per_level[0]
    );
    Ok(())
}
