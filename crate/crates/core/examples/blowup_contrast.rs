//! (∂_t u)³ against −|∂_t u|²∂_t u from the same data.
//!
//! cargo run --release --example blowup_contrast

use semiwave::nonlinearity::CubicNonlinearity;
use semiwave::solver::{run, BumpShape, Grid, InitialData, RadialGrid, Recorder, Schedule, WaveField};

fn main() -> semiwave::Result<()> {
    let (radius, t_end) = (0.05, 50.0);
    let grid = RadialGrid::with_spacing(t_end + 1.0, radius / 16.0, 1.0)?.with_window(2.0)?;
    for eps in [0.05, 0.2, 0.5] {
        let data = InitialData::new(BumpShape::Polynomial, radius, eps)?;
        for name in ["antidissipative", "dissipative"] {
            let mut field = WaveField::init(&data, Grid::Radial(grid), CubicNonlinearity::preset(name)?)?;
            let status = run(&mut field, t_end, &Schedule::default(), &mut Recorder::default())?;
            println!("ε = {eps:<5} {name:<16} {status:?}");
        }
    }
    Ok(())
}
