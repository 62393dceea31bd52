//! A dissipative radial run: energy trace and the decay of |U| on the
//! outgoing ray σ = 0.
//!
//! cargo run --release --example radial_run

use semiwave::asymptotics::extract_ray;
use semiwave::nonlinearity::CubicNonlinearity;
use semiwave::solver::{run, BumpShape, Grid, InitialData, RadialGrid, Recorder, Schedule, WaveField};

fn main() -> semiwave::Result<()> {
    let (radius, eps, t_end) = (0.05, 0.3, 500.0);
    let dr = radius / 16.0;
    let grid = RadialGrid::with_spacing(t_end + radius + 8.0 * dr, dr, 1.0)?.with_window(2.0)?;
    let data = InitialData::new(BumpShape::Polynomial, radius, eps)?;
    let mut field = WaveField::init(&data, Grid::Radial(grid), CubicNonlinearity::dissipative())?;
    let sched = Schedule {
        energy_every: 400,
        snapshot_times: vec![],
    }
    .log_snapshots(2.0, t_end, 60);
    let mut rec = Recorder::default();
    let status = run(&mut field, t_end, &sched, &mut rec)?;
    println!("{status:?}; {} cells, dt = {}", grid.n_r, grid.dt);

    let e = &rec.energy;
    println!("E(t): first {:.6e}, last {:.6e}, non-increasing {}", e.energy_sq[0], e.energy_sq[e.len() - 1], e.is_non_increasing(4.0));

    let ray = extract_ray(&rec.snapshots, 0.0, 0.0)?;
    println!("{:>10} {:>12}", "t", "|U|");
    for k in (0..ray.len()).step_by(6) {
        println!("{:>10.2} {:>12.6}", ray.times[k], ray.u_values[k].norm());
    }
    Ok(())
}
