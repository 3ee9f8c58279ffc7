//! Final fidelity at 20000 km for two source fidelities and two spin
//! decoherence rates.
//!
//! cargo run --release --example sensitivity

use satrep::repeater;
use satrep::scenario::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = Scenario::table1();
    for (key, values) in [
        ("source.pair_fidelity", [0.998, 0.99]),
        ("node.spin_decoherence_rate_hz", [0.05, 1.0]),
    ] {
        println!("{key}");
        for v in values {
            let mut s = base.clone();
            s.set_parameter(key, v)?;
            for n in [2, 3] {
                let cfg = s.repeater.with_levels(n).spanning(20_000e3);
                let r = repeater::evaluate(&cfg)?;
                println!("  {v:>6} {}-link: F = {:.4}", 1 << n, r.fidelity_final);
            }
        }
    }
    Ok(())
}
