//! The profile flow along one ray: closed form against RK4, and the three
//! regimes (dissipative, rotational, anti-dissipative).
//!
//! cargo run --release --example profile_flow

use semiwave::profile::{explicit_profile, integrate_profile, phase_theta, ProfileParams};
use semiwave::C64;

fn main() -> semiwave::Result<()> {
    let p0 = C64::new(0.6, 0.2);
    for (name, f_hat) in [
        ("dissipative", C64::new(1.0, 0.0)),
        ("rotational", C64::new(0.0, -1.0)),
        ("mixed", C64::new(0.5, 1.5)),
    ] {
        let params = ProfileParams::new(f_hat, p0);
        println!("{name}: F(ω̂) = {f_hat}");
        println!("  {:>8} {:>12} {:>12} {:>12} {:>10}", "tau", "|P|", "arg P", "tau |P|^2", "rk4 err");
        for tau in [0.0, 1.0, 10.0, 100.0, 1000.0] {
            let p = explicit_profile(&params, tau)?;
            let err = (integrate_profile(&params, tau, 1e-2)? - p).norm();
            println!(
                "  {tau:>8} {:>12.6} {:>12.6} {:>12.6} {err:>10.1e}",
                p.norm(),
                p.arg(),
                tau * p.norm_sqr()
            );
        }
        println!("  Θ(100) = {:.6}", phase_theta(&params, 100.0)?);
    }

    let anti = ProfileParams::new(C64::new(-1.0, 0.0), p0);
    let tb = anti.blowup_time().expect("anti-dissipative");
    println!("anti-dissipative: profile blows up at τ = {tb:.4}");
    match explicit_profile(&anti, tb + 0.1) {
        Ok(p) => println!("  unexpected value {p}"),
        Err(e) => println!("  past it: {e}"),
    }
    Ok(())
}
