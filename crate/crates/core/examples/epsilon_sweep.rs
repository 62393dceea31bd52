//! Runner API: an ε-sweep of a preset on the thread pool, persisted and
//! summarised. Artifacts go to `target/sweep`.
//!
//! cargo run --release --example epsilon_sweep

use std::path::PathBuf;

use semiwave::runner::{preset, report, run_experiment, RunOptions};

fn main() -> semiwave::Result<()> {
    let mut cfg = preset("null-form-radial-default")?;
    cfg.name = "null-form-sweep".into();
    cfg.run.eps = vec![0.1, 0.2, 0.3];
    let out = PathBuf::from("target/sweep");
    let opts = RunOptions {
        threads: Some(3),
        deterministic: false,
        out: Some(out.clone()),
    };
    for art in run_experiment(&cfg, &opts)? {
        let l2 = art.profile.as_ref().map_or(0.0, |p| p.p0_values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        println!("ε = {}: passed {}, |P0| l2 over rays {l2:.5}", art.eps, art.passed());
    }
    for row in report(&out)? {
        println!("{} {} {:?}: {} checks", row.dir.display(), row.passed, row.status, row.checks.len());
    }
    Ok(())
}
