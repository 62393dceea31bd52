//! Null-circle traces and structural flags of the built-in nonlinearities
//! and of a hand-built tensor.
//!
//! cargo run --release --example classify_nonlinearity

use semiwave::nonlinearity::CubicNonlinearity;
use semiwave::C64;

fn main() -> semiwave::Result<()> {
    let mut cases: Vec<(String, CubicNonlinearity)> = CubicNonlinearity::preset_names()
        .iter()
        .map(|n| Ok((n.to_string(), CubicNonlinearity::preset(n)?)))
        .collect::<semiwave::Result<_>>()?;
    // Dissipative plus an angle-dependent correction: Re F(ω̂) = 1 − cos²θ/2.
    let mixed = CubicNonlinearity::from_terms(&[
        (0, 0, 0, C64::new(-1.0, 0.0)),
        (1, 0, 1, C64::new(0.5, 0.3)),
        (2, 0, 2, C64::new(0.0, 0.5)),
    ])?;
    cases.push(("mixed".into(), mixed));

    println!("{:<22} {:>6} {:>6} {:>6} {:>6} {:>10}", "name", "null", "agemi", "diss", "rot", "c0");
    for (name, f) in &cases {
        let c = f.classify(1024, 1e-10)?;
        println!(
            "{name:<22} {:>6} {:>6} {:>6} {:>6} {:>10.6}",
            c.satisfies_null_condition, c.satisfies_agemi, c.strictly_dissipative, c.purely_rotational, c.c0
        );
    }

    let (_, mixed) = cases.last().expect("non-empty");
    println!("\nF(ω̂) for the mixed tensor:");
    for (theta, v) in mixed.circle_trace(8)? {
        println!("  θ = {theta:.4}  F = {:.4} {:+.4}i", v.re, v.im);
    }
    println!("\n{}", mixed.to_json_string());
    Ok(())
}
