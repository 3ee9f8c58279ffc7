//! Loading a scenario, overriding keys and evaluating it.
//!
//! cargo run --example scenario_config

use satrep::repeater;
use satrep::scenario::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut scenario = Scenario::from_toml_str(
        r#"
        [orbit]
        altitude_km = 1000
        link_length_km = 2500

        [repeater]
        nesting_levels = 3
        "#,
    )?;
    scenario.apply_override("node.spin_decoherence_rate_hz=0.1")?;

    let r = repeater::evaluate(&scenario.repeater)?;
    println!(
        "{} links over {:.0} km: {:.1} pairs per flyby, F = {:.4}",
        1 << r.n_levels,
        r.total_distance_m / 1e3,
        r.pairs_per_flyby,
        r.fidelity_final
    );

    if let Err(e) = Scenario::from_toml_str("[node]\nspin_decoherence_hz = 1\n") {
        println!("rejected: {e}");
    }
    print!("{}", scenario.to_toml());
    Ok(())
}
