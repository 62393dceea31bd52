//! Rotational nonlinearity: |U| stays put while its phase turns like
//! |P0|²/2 · log t. Matches P0 at the last sample and fits the phase.
//!
//! cargo run --release --example rotational_phase

use semiwave::asymptotics::{extract_ray, fit_phase_slope, fit_profile_p0, verify_profile_convergence};
use semiwave::nonlinearity::CubicNonlinearity;
use semiwave::solver::{run, BumpShape, Grid, InitialData, RadialGrid, Recorder, Schedule, WaveField};

fn main() -> semiwave::Result<()> {
    let (radius, eps, t_end) = (1.0, 0.3, 2000.0);
    let dr = radius / 32.0;
    let nl = CubicNonlinearity::rotational();
    let grid = RadialGrid::with_spacing(t_end + radius + 8.0 * dr, dr, 1.0)?.with_window(4.0)?;
    let data = InitialData::new(BumpShape::Polynomial, radius, eps)?;
    let mut field = WaveField::init(&data, Grid::Radial(grid), nl.clone())?;
    let sched = Schedule {
        energy_every: 1000,
        snapshot_times: vec![],
    }
    .log_snapshots(2.0, t_end, 150);
    let mut rec = Recorder::default();
    run(&mut field, t_end, &sched, &mut rec)?;
    println!("energy drift {:.2e}", rec.energy.relative_drift());

    let f_hat = nl.at_angle(0.0);
    for sigma in [-0.5, 0.0, 0.5] {
        let ray = extract_ray(&rec.snapshots, sigma, 0.0)?;
        let t_match = *ray.times.last().expect("samples");
        let p0 = fit_profile_p0(&ray, f_hat, t_match)?;
        let phase = fit_phase_slope(&ray, p0, f_hat, 0.15)?;
        let prof = verify_profile_convergence(&ray, p0, f_hat, t_match)?;
        println!(
            "σ = {sigma:>4}: P0 = {p0:.5}, phase slope {:.5} (|P0|²/2 = {:.5}), residual slope {:.3}",
            phase.slope,
            0.5 * p0.norm_sqr(),
            prof.slope
        );
    }
    Ok(())
}
