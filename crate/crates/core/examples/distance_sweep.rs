//! Pairs per flyby and final fidelity against total distance for 2-, 4- and
//! 8-link chains, with direct transmission from one satellite for comparison.
//!
//! cargo run --release --example distance_sweep

use satrep::repeater::{self, RepeaterConfig, Scheme};

fn main() {
    let templates: Vec<RepeaterConfig> = (1..=3).map(|n| RepeaterConfig::default().with_levels(n)).collect();
    let totals: Vec<f64> = (1..=10).map(|k| 2000e3 * k as f64).collect();
    let rows = repeater::distance_sweep(&templates, &totals, true);

    println!(
        "{:>8} {:>6} {:>8} {:>12} {:>9}  status",
        "L [km]", "links", "scheme", "pairs/flyby", "F"
    );
    for row in rows {
        let links = if row.scheme == Scheme::Direct {
            1
        } else {
            1 << row.n_levels
        };
        let (pairs, f) = row
            .result
            .as_ref()
            .map(|r| (format!("{:.1}", r.pairs_per_flyby), format!("{:.4}", r.fidelity_final)))
            .unwrap_or_default();
        println!(
            "{:>8.0} {:>6} {:>8} {:>12} {:>9}  {}",
            row.total_distance_m / 1e3,
            links,
            format!("{:?}", row.scheme).to_lowercase(),
            pairs,
            f,
            row.status.label()
        );
    }
}
