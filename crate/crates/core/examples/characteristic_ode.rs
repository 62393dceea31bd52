//! The forced model ODE along a characteristic: extraction of the limiting
//! profile and the residual decay rate. Writes the trajectory to
//! `target/characteristic_ode.csv`.
//!
//! cargo run --release --example characteristic_ode

use std::fs::File;
use std::io::BufWriter;

use semiwave::char_ode::{
    dissipative_power_law_preset, extract_profile, log_samples, solve_xi_eta, verify_asymptotic_bound,
    write_trajectory_csv, Stepping, DEFAULT_SLOPE_SLACK, DEFAULT_TAIL_TOL,
};

fn main() -> semiwave::Result<()> {
    let prob = dissipative_power_law_preset();
    let hyp = prob.check_hypotheses(&log_samples(prob.t0, 1e6, 5));
    println!("hypotheses: {hyp:?}");

    let st = Stepping::Logarithmic(1e-3);
    let prof = extract_profile(&prob, 1e8, st, DEFAULT_TAIL_TOL)?;
    println!("p0 = {:.8}, z+ = {:.8}, tail bound {:.2e}", prof.p0, prof.z_plus, prof.tail_bound);
    println!("eta_inf(t) = {:.6} + {:.6} log t", prof.eta_inf_a, prof.eta_inf_b);

    let fit = verify_asymptotic_bound(&prob, &prof, &log_samples(1e2, 1e6, 10), st, DEFAULT_SLOPE_SLACK)?;
    println!("residual slope {:.4} (theory {}), {:?}", fit.slope, prob.bounds.convergence_exponent(), fit.verdict);

    let states = solve_xi_eta(&prob, 1e6, Stepping::Logarithmic(1e-2))?;
    std::fs::create_dir_all("target").ok();
    let path = "target/characteristic_ode.csv";
    let file = File::create(path).map_err(|e| semiwave::Error::Config(format!("{path}: {e}")))?;
    write_trajectory_csv(BufWriter::new(file), &states).map_err(|e| semiwave::Error::Config(e.to_string()))?;
    println!("{} states written to {path}", states.len());
    Ok(())
}
