//! Transmission and pair fidelity over one pass, for two orbit altitudes.
//!
//! cargo run --example flyby_profile

use satrep::channel::ChannelParams;
use satrep::orbit::OrbitGeometry;
use satrep::quadrature::Refinement;
use satrep::Flyby;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for altitude_km in [500.0, 1500.0] {
        let geometry = OrbitGeometry::default()
            .with_altitude(altitude_km * 1e3)
            .with_link_length(2000e3);
        let flyby = Flyby::new(geometry, ChannelParams::default(), 0.998)?;
        let agg = flyby.aggregates(&Refinement::default())?;
        println!(
            "h = {altitude_km} km: T_FB = {:.1} s, P0 = {:.4e}, mean F_pair = {:.5}",
            agg.flyby_time, agg.p0, agg.f_pair_avg
        );

        let profile = flyby.profile(11)?;
        println!(
            "  {:>8} {:>12} {:>10} {:>12}",
            "t [s]", "d [km]", "theta [deg]", "eta_tr^2"
        );
        for i in 0..profile.len() {
            println!(
                "  {:>8.1} {:>12.1} {:>10.2} {:>12.4e}",
                profile.times[i],
                profile.slant_m[i] / 1e3,
                profile.zenith_rad[i].to_degrees(),
                profile.eta2_tr[i]
            );
        }
    }
    Ok(())
}
