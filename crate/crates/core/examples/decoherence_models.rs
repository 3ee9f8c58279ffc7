//! The element-wise density-matrix decay map next to the scalar Werner
//! fidelity law used by the repeater recursion.
//!
//! cargo run --example decoherence_models

use satrep::node;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (gamma, gamma_star) = (0.01, 0.02);
    let times = [0.0, 1.0, 5.0, 10.0, 30.0, 100.0];
    println!(
        "{:>7} {:>10} {:>16} {:>14}",
        "t [s]", "trace", "singlet fraction", "scalar law"
    );
    for row in node::compare_decoherence_models(0.95, gamma, gamma_star, &times)? {
        println!(
            "{:>7.1} {:>10.6} {:>16.6} {:>14.6}",
            row.t_s, row.trace_matrix_map, row.singlet_fraction_matrix_map, row.fidelity_scalar_law
        );
    }

    let rho = node::source_state(0.998)?;
    println!("source state eigenvalues: {:?}", rho.eigenvalues());
    Ok(())
}
