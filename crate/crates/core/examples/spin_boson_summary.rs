//! Minimal library walkthrough: integrate the spin-boson Redfield dynamics,
//! detect complete-positivity violations along the trajectory and repair
//! them, then summarize what the repair did.

use choireg::choi::{check_physical, choi_from_superop};
use choireg::diagnostics::{blp_monotonicity, distinguishability, DistinguishabilitySeries};
use choireg::models::{computational_projector, spin_boson_assemble, SpinBosonParams};
use choireg::ode::OdeOptions;
use choireg::projection::{regularize_trajectory, ProjectionOptions};
use choireg::redfield::GeneratorMode;

fn main() {
    let params = SpinBosonParams {
        epsilon: 1.0,
        delta: 0.7,
        gamma: 1.5,
        mu: 0.1,
        omega0: 1.0,
    };
    let generator = spin_boson_assemble(&params, false).expect("valid parameters");
    let grid: Vec<f64> = (0..400).map(|i| 40.0 * i as f64 / 399.0).collect();

    let propagators = generator
        .evolve_propagator(&grid, &OdeOptions::default(), GeneratorMode::Raw)
        .expect("integration succeeds");
    let chois: Vec<_> = propagators.iter().map(choi_from_superop).collect();

    let unphysical = chois
        .iter()
        .filter(|p| !check_physical(p, 1e-9).is_physical)
        .count();
    println!("{unphysical} of {} time steps violate physicality", grid.len());

    let results = regularize_trajectory(&chois, &ProjectionOptions::default());
    let (peak_idx, peak) = results
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.delta_norm))
        .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    println!(
        "largest repair ‖Δ‖ = {peak:.3e} at t = {:.2}",
        grid[peak_idx]
    );

    let rho = computational_projector(2, 0);
    let sigma = computational_projector(2, 1);
    let raw_max = chois
        .iter()
        .map(|p| distinguishability(p, &rho, &sigma).unwrap())
        .fold(0.0f64, f64::max);
    let repaired: Vec<f64> = results
        .iter()
        .map(|r| distinguishability(&r.projected, &rho, &sigma).unwrap())
        .collect();
    let repaired_max = repaired.iter().cloned().fold(0.0f64, f64::max);
    println!("max distinguishability: raw {raw_max:.4}, repaired {repaired_max:.4}");

    let report = blp_monotonicity(&DistinguishabilitySeries {
        grid,
        values: repaired,
        rho,
        sigma,
    })
    .unwrap();
    println!(
        "repaired dynamics keeps {} revival interval(s), so it stays non-Markovian",
        report.violation_intervals.len()
    );
}
