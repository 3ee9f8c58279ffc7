//! Acceptance suite. Prints one PASS/FAIL line per criterion (with sub-checks
//! indented below it) and exits non-zero if any criterion fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use satrep::flyby::{self, FlybyProfile};
use satrep::mc::{self, McConfig, Tolerance, Tolerances};
use satrep::node::{self, CavityParams};
use satrep::orbit::{self, OrbitGeometry, PassTiming};
use satrep::quadrature::{doubled, Refinement};
use satrep::repeater::{self, RepeaterConfig, RowStatus};
use satrep::scenario::Scenario;

// Tolerances and bands, pinned.
const ABSTRACT_MIN_PAIRS: f64 = 10_000.0;
const ABSTRACT_MIN_FIDELITY: f64 = 0.90;
const FOUR_LINK_20000_FIDELITY: (f64, f64) = (0.82, 0.86);
const EIGHT_LINK_20000_FIDELITY: (f64, f64) = (0.79, 0.83);
const EIGHT_LINK_H1000_PAIRS: (f64, f64) = (1500.0, 6000.0);
const FOUR_LINK_20000_PAIRS: (f64, f64) = (150.0, 600.0);
const CAPS_ROOT: f64 = 96.49;
const CAPS_ROOT_TOL: f64 = 0.05;
const REFLECTIVITY_SUM_TOL: f64 = 1e-12;
const CAVITY_DRAWS: usize = 1000;
const T0_REL_TOL: f64 = 1e-6;
const SYMMETRY_REL_TOL: f64 = 1e-9;
const QUADRATURE_REL_TOL: f64 = 1e-6;
const MC_TRIALS: u64 = 100_000;
const MC_SIGMA: f64 = 3.0;
const MC_FIDELITY_REL: f64 = 0.01;
const MC_GAP_REL: f64 = 0.15;
const SEMIGROUP_TOL: f64 = 1e-12;
const STATE_DRAWS: usize = 1000;

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

fn in_band(x: f64, (lo, hi): (f64, f64)) -> bool {
    x >= lo && x <= hi
}

fn table1() -> RepeaterConfig {
    Scenario::table1().repeater
}

fn chain(n_levels: u32, altitude_m: f64, total_m: f64) -> RepeaterConfig {
    let mut cfg = table1().with_levels(n_levels).spanning(total_m);
    cfg.geometry.altitude_m = altitude_m;
    cfg
}

fn criterion_1() -> Vec<Check> {
    let mut out = Vec::new();
    for exponent in [1, 2] {
        let mut cfg = chain(2, 1.5e6, 10_000e3);
        cfg.detector_exponent = exponent;
        let r = repeater::evaluate(&cfg).expect("headline configuration evaluates");
        out.push(check(
            format!("eta_d^{exponent}: pairs_per_flyby > {ABSTRACT_MIN_PAIRS}"),
            r.pairs_per_flyby > ABSTRACT_MIN_PAIRS,
            format!("{:.1}", r.pairs_per_flyby),
        ));
        out.push(check(
            format!("eta_d^{exponent}: fidelity > {ABSTRACT_MIN_FIDELITY}"),
            r.fidelity_final > ABSTRACT_MIN_FIDELITY,
            format!("{:.4}", r.fidelity_final),
        ));
    }
    out
}

fn criterion_2() -> Vec<Check> {
    let four = repeater::evaluate(&chain(2, 1.5e6, 20_000e3)).unwrap();
    let eight = repeater::evaluate(&chain(3, 1.5e6, 20_000e3)).unwrap();
    vec![
        check(
            format!("4-link fidelity in {FOUR_LINK_20000_FIDELITY:?}"),
            in_band(four.fidelity_final, FOUR_LINK_20000_FIDELITY),
            format!("{:.4}", four.fidelity_final),
        ),
        check(
            format!("8-link fidelity in {EIGHT_LINK_20000_FIDELITY:?}"),
            in_band(eight.fidelity_final, EIGHT_LINK_20000_FIDELITY),
            format!("{:.4}", eight.fidelity_final),
        ),
    ]
}

fn criterion_3() -> Vec<Check> {
    let r = repeater::evaluate(&chain(3, 1.0e6, 20_000e3)).unwrap();
    vec![check(
        format!("8-link h = 1000 km pairs in {EIGHT_LINK_H1000_PAIRS:?}"),
        in_band(r.pairs_per_flyby, EIGHT_LINK_H1000_PAIRS),
        format!("{:.1}", r.pairs_per_flyby),
    )]
}

fn criterion_4() -> Vec<Check> {
    let r = repeater::evaluate(&chain(2, 1.5e6, 20_000e3)).unwrap();
    vec![check(
        format!("4-link h = 1500 km pairs in {FOUR_LINK_20000_PAIRS:?}"),
        in_band(r.pairs_per_flyby, FOUR_LINK_20000_PAIRS),
        format!("{:.1}", r.pairs_per_flyby),
    )]
}

fn criterion_5() -> Vec<Check> {
    let root = node::cooperativity_for(0.75).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..CAVITY_DRAWS {
        // log-uniform rates over three decades each
        let mut draw = |lo: f64, hi: f64| (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp();
        let cavity = CavityParams {
            g: draw(1e6, 1e9),
            kappa_in: draw(1e5, 1e8),
            kappa_ex: 0.0,
            gamma: draw(1e5, 1e8),
        }
        .optimally_coupled();
        let (r0, r1) = node::reflectivities(&cavity);
        worst = worst.max((r0 + r1).abs());
    }
    vec![
        check(
            format!("caps_success root at {CAPS_ROOT} +- {CAPS_ROOT_TOL}"),
            (root - CAPS_ROOT).abs() <= CAPS_ROOT_TOL,
            format!("c_in = {root:.5}"),
        ),
        check(
            format!("|r0 + r1| < {REFLECTIVITY_SUM_TOL:e} over {CAVITY_DRAWS} cavities"),
            worst < REFLECTIVITY_SUM_TOL,
            format!("max {worst:.3e}"),
        ),
    ]
}

/// Half-window by bisection on the offset from culmination.
fn numeric_half_window(geom: &OrbitGeometry) -> f64 {
    let span = 0.999 * std::f64::consts::PI / orbit::angular_speed(geom);
    let timing = PassTiming::from_half(span);
    let inside = |s: f64| {
        let d = orbit::slant_distance(geom, &timing, span - s).unwrap();
        matches!(orbit::zenith_angle(geom, d), Ok(theta) if theta <= geom.max_zenith_rad)
    };
    if !inside(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_6() -> Vec<Check> {
    let mut worst_t0 = 0.0f64;
    let mut worst_sym = 0.0f64;
    let mut visible = 0;
    let mut points = 0;
    for h_km in [500.0, 1000.0, 1500.0, 2000.0, 2500.0] {
        for l0_km in [500.0, 1000.0, 2000.0, 3000.0, 4000.0] {
            for theta_deg in [60.0f64, 70.0, 75.0, 80.0] {
                points += 1;
                let geom = OrbitGeometry::new(h_km * 1e3, l0_km * 1e3, theta_deg.to_radians()).unwrap();
                let closed = orbit::half_flyby_time(&geom).unwrap();
                let numeric = numeric_half_window(&geom);
                let err = if closed == 0.0 {
                    numeric
                } else {
                    (closed - numeric).abs() / closed
                };
                worst_t0 = worst_t0.max(err);
                if closed > 0.0 {
                    visible += 1;
                    let timing = PassTiming::from_half(closed);
                    for k in 1..=20 {
                        let frac = k as f64 / 20.0;
                        let a = orbit::slant_distance(&geom, &timing, closed * (1.0 - frac)).unwrap();
                        let b = orbit::slant_distance(&geom, &timing, closed * (1.0 + frac)).unwrap();
                        worst_sym = worst_sym.max((a - b).abs() / a);
                    }
                }
            }
        }
    }
    vec![
        check(
            format!("closed-form t0 vs bisection, {points}-point grid, rel < {T0_REL_TOL:e}"),
            worst_t0 < T0_REL_TOL && points == 100,
            format!("max rel {worst_t0:.2e} ({visible} visible points)"),
        ),
        check(
            format!("d(t0 - s) = d(t0 + s), rel < {SYMMETRY_REL_TOL:e}"),
            worst_sym < SYMMETRY_REL_TOL,
            format!("max rel {worst_sym:.2e}"),
        ),
    ]
}

fn criterion_7() -> Vec<Check> {
    let cfg = table1();
    let fb = cfg.flyby().unwrap();
    let refinement = Refinement::default();
    let agg = fb.aggregates(&refinement).unwrap();
    let mut n = refinement.initial_samples;
    let mut worst = 0.0f64;
    for _ in 0..2 {
        n = doubled(n);
        let profile = fb.profile(n).unwrap();
        let p0 = flyby::average_two_photon(&profile).unwrap();
        let f = flyby::average_pair_fidelity(&profile).unwrap();
        worst = worst
            .max((p0 - agg.p0).abs() / agg.p0)
            .max((f - agg.f_pair_avg).abs() / agg.f_pair_avg);
    }
    let t_fb = agg.flyby_time;
    let synthetic = FlybyProfile::synthetic(
        t_fb,
        refinement.initial_samples,
        |t| (std::f64::consts::PI * t / t_fb).sin(),
        |_| 1.0,
    )
    .unwrap();
    let mean_sin = flyby::average_two_photon(&synthetic).unwrap();
    let expected = 2.0 / std::f64::consts::PI;
    vec![
        check(
            format!("P0 and F_pair_avg stable under two doublings, rel < {QUADRATURE_REL_TOL:e}"),
            worst < QUADRATURE_REL_TOL,
            format!("max rel {worst:.2e}"),
        ),
        check(
            format!("mean of sin(pi t / T_FB) = 2/pi within {QUADRATURE_REL_TOL:e}"),
            (mean_sin - expected).abs() < QUADRATURE_REL_TOL,
            format!("{mean_sin:.12} vs {expected:.12}"),
        ),
    ]
}

fn mc_run(cfg: &RepeaterConfig, tol: &Tolerances) -> mc::ComparisonReport {
    let agg = cfg.flyby().unwrap().aggregates(&cfg.refinement).unwrap();
    let run = McConfig {
        trials: MC_TRIALS,
        ..Scenario::table1().mc
    };
    let est = mc::simulate_chain(&run, cfg, &agg, None).unwrap();
    let analytic = repeater::evaluate_with(cfg, agg).unwrap();
    mc::compare_report(&analytic, &est, tol).unwrap()
}

fn row_check(report: &mc::ComparisonReport, quantity: &str, label: &str) -> Check {
    let row = report.row(quantity).expect("row present");
    let z = row.z.map(|z| format!("{z:.2}")).unwrap_or_else(|| "n/a".into());
    check(
        format!("n = {}: {label} {quantity}", report.n_levels),
        row.pass,
        format!("analytic {:.6e}, mc {:.6e}, z {z}", row.analytic, row.mc_mean),
    )
}

fn criterion_8() -> Vec<Check> {
    let mut out = Vec::new();
    let sigma = Tolerances {
        rate: Tolerance::Sigma(MC_SIGMA),
        pairs: Tolerance::Sigma(MC_SIGMA),
        waiting_time: Tolerance::Relative(MC_GAP_REL),
        fidelity: Tolerance::Sigma(MC_SIGMA),
    };
    for n in [1, 2] {
        let mut cfg = table1().with_levels(n);
        cfg.node.spin_decoherence_rate_hz = 0.0;
        cfg.node.rydberg_fidelity = 1.0;
        cfg.node.readout_fidelity = 1.0;
        let report = mc_run(&cfg, &sigma);
        out.push(row_check(&report, "pairs_per_flyby", "gamma_s = 0, 3 sigma:"));
        out.push(row_check(&report, &format!("F_{n}"), "gamma_s = 0, 3 sigma:"));
    }
    let relative = Tolerances {
        fidelity: Tolerance::Relative(MC_FIDELITY_REL),
        ..sigma
    };
    for n in [1, 2] {
        let report = mc_run(&table1().with_levels(n), &relative);
        out.push(row_check(&report, &format!("F_{n}"), "gamma_s = 50 mHz, 1% relative:"));
    }
    let report = mc_run(&table1().with_levels(3), &relative);
    for k in 1..=3 {
        out.push(row_check(&report, &format!("T_{k}"), "mean waiting gap within 15% of"));
    }
    out
}

fn criterion_9() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_semigroup = 0.0f64;
    for _ in 0..STATE_DRAWS {
        let f = rng.gen_range(-1.0 / 3.0..=1.0);
        let g = rng.gen_range(0.0..5.0);
        let (t1, t2) = (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
        let two_step = node::werner_fidelity_decay(node::werner_fidelity_decay(f, g, t1), g, t2);
        worst_semigroup = worst_semigroup.max((two_step - node::werner_fidelity_decay(f, g, t1 + t2)).abs());
    }
    let mut state_ok = true;
    let mut worst_trace = 0.0f64;
    let mut min_eig = f64::INFINITY;
    for _ in 0..STATE_DRAWS {
        let fs = rng.gen_range(0.25..=1.0);
        match node::source_state(fs) {
            Ok(rho) => {
                state_ok &= rho.is_hermitian(1e-12);
                worst_trace = worst_trace.max((rho.trace() - 1.0).abs());
                min_eig = min_eig.min(rho.min_eigenvalue());
            }
            Err(_) => state_ok = false,
        }
    }
    let mut trace_exact = true;
    for _ in 0..STATE_DRAWS {
        let f = rng.gen_range(-1.0 / 3.0..=1.0);
        let rho = node::werner_matrix(f).unwrap();
        let after = node::decohere_matrix(&rho, 0.0, rng.gen_range(0.0..2.0), rng.gen_range(0.0..20.0)).unwrap();
        trace_exact &= after.trace() == rho.trace() && (after.trace() - 1.0).abs() <= 4.0 * f64::EPSILON;
    }
    vec![
        check(
            format!("decay composition exact to {SEMIGROUP_TOL:e}"),
            worst_semigroup <= SEMIGROUP_TOL,
            format!("max {worst_semigroup:.2e}"),
        ),
        check(
            format!("source_state Hermitian, unit trace, PSD over {STATE_DRAWS} draws"),
            state_ok && worst_trace < 1e-12 && min_eig > -1e-12,
            format!("max |tr - 1| {worst_trace:.1e}, min eigenvalue {min_eig:.2e}"),
        ),
        check(
            "decohere_matrix keeps the trace when gamma = 0",
            trace_exact,
            format!("{STATE_DRAWS} draws"),
        ),
    ]
}

fn final_fidelities(scenario: &Scenario, n_levels: u32) -> Vec<Option<f64>> {
    let totals: Vec<f64> = scenario.sweep.total_distance_km.iter().map(|km| km * 1e3).collect();
    repeater::distance_sweep(&[scenario.repeater.with_levels(n_levels)], &totals, false)
        .into_iter()
        .map(|row| match row.status {
            RowStatus::Ok => row.result.map(|r| r.fidelity_final),
            _ => None,
        })
        .collect()
}

fn dominates(better: &[Option<f64>], worse: &[Option<f64>]) -> (bool, usize) {
    let mut compared = 0;
    let mut ok = true;
    for (a, b) in better.iter().zip(worse) {
        match (a, b) {
            (Some(a), Some(b)) => {
                compared += 1;
                ok &= a > b;
            }
            (None, None) => {}
            _ => ok = false,
        }
    }
    (ok && compared > 0, compared)
}

fn criterion_10() -> Vec<Check> {
    let base = Scenario::table1();
    let mut out = Vec::new();
    for (key, better, worse) in [
        ("node.spin_decoherence_rate_hz", 0.05, 1.0),
        ("source.pair_fidelity", 0.998, 0.99),
    ] {
        for n in [2, 3] {
            let mut hi = base.clone();
            hi.set_parameter(key, better).unwrap();
            let mut lo = base.clone();
            lo.set_parameter(key, worse).unwrap();
            let (ok, compared) = dominates(&final_fidelities(&hi, n), &final_fidelities(&lo, n));
            out.push(check(
                format!("{}-link: {key} = {better} above {worse}", 1 << n),
                ok,
                format!("{compared} grid points"),
            ));
        }
    }
    out
}

type Criterion = (u32, &'static str, fn() -> Vec<Check>);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "headline: > 10000 pairs and F > 0.90 over 10000 km", criterion_1),
        (2, "fidelity anchors at 20000 km", criterion_2),
        (3, "8-link pairs at h = 1000 km, 20000 km", criterion_3),
        (4, "4-link pairs at h = 1500 km, 20000 km", criterion_4),
        (5, "CAPS consistency", criterion_5),
        (6, "orbit oracle", criterion_6),
        (7, "quadrature convergence", criterion_7),
        (8, "Monte Carlo equivalence", criterion_8),
        (9, "semigroup and state identities", criterion_9),
        (10, "sensitivity orderings", criterion_10),
    ];
    let mut failed = Vec::new();
    for (id, title, run) in criteria {
        let checks = run();
        let pass = checks.iter().all(|c| c.pass);
        println!("{} criterion {id}: {title}", if pass { "PASS" } else { "FAIL" });
        for c in &checks {
            println!("    {} {} [{}]", if c.pass { "ok  " } else { "FAIL" }, c.name, c.detail);
        }
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: {} of 10 criteria fail: {failed:?}", failed.len());
        std::process::exit(1);
    }
}
