//! Memory-loading success against internal cooperativity, and the
//! cooperativity needed for the reference efficiency.
//!
//! cargo run --example caps_curve

use satrep::node::{self, CavityParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for c in [1.0, 10.0, 30.0, 100.0, 300.0, 1000.0] {
        println!("C_in = {c:>6}: eta_CAPS = {:.4}", node::caps_success(c));
    }
    let c = node::cooperativity_for(0.75)?;
    println!("eta_CAPS = 0.75 needs C_in = {c:.3}");

    // a cavity with that cooperativity, coupled at the optimum
    let gamma = 2.0 * std::f64::consts::PI * 3e6;
    let kappa_in = 2.0 * std::f64::consts::PI * 1e6;
    let g = (2.0 * c * kappa_in * gamma).sqrt();
    let cavity = CavityParams {
        g,
        kappa_in,
        kappa_ex: 0.0,
        gamma,
    }
    .optimally_coupled();
    let (r0, r1) = node::reflectivities(&cavity);
    println!(
        "kappa_ex/kappa_in = {:.3}, r0 = {r0:.6}, r1 = {r1:.6}, success = {:.4}",
        cavity.kappa_ex / kappa_in,
        (r0 * r0 + r1 * r1) / 2.0
    );
    Ok(())
}
