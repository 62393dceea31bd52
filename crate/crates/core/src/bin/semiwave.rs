use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use semiwave::nonlinearity::CubicNonlinearity;
use semiwave::runner::suite::run_ode_suite;
use semiwave::runner::{
    analyze, load_artifact, preset, preset_names, report, run_experiment, write_artifact, ArtifactStatus, Check,
    ExperimentConfig, RunArtifact, RunOptions,
};

#[derive(Parser)]
#[command(name = "semiwave", version, about = "Cubic derivative wave equations in 2D: runs, fits and reports")]
struct Cli {
    /// Worker threads for ε-sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run sweep entries sequentially in input order.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Output root for artifacts and reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML experiment config or a named preset.
    Run { config: String },
    /// Re-run the analysis on a stored run directory.
    Analyze { dir: PathBuf },
    /// Classify a nonlinearity given as JSON (`{"p_abc": {...}}`) or a preset name.
    Classify { file: String },
    /// Randomized checks of the profile equation and the model ODE.
    OdeSuite {
        #[arg(long, default_value_t = 20240101)]
        seed: u64,
    },
    /// Summarise every run directory below a path.
    Report { dir: PathBuf },
    /// List the built-in experiment presets; with `--out`, write each as TOML.
    Presets,
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("  {tag} {}: {:?} (expected {:?}) {}", c.name, c.outcome, c.expect, c.detail);
    }
}

fn status_line(s: &ArtifactStatus) -> String {
    match s {
        ArtifactStatus::Completed { t } => format!("completed at t = {t}"),
        ArtifactStatus::Blowup { t, max_abs } => format!("blow-up at t = {t} (max |u| {max_abs:.3e})"),
        ArtifactStatus::Error { message } => format!("error: {message}"),
    }
}

fn print_artifact(art: &RunArtifact) {
    let verdict = if art.passed() { "PASS" } else { "FAIL" };
    println!("{verdict} {} eps = {}: {}", art.config.name, art.eps, status_line(&art.status));
    if let Some(d) = &art.dir {
        println!("  artifacts in {}", d.display());
    }
    print_checks(&art.checks);
}

fn run(cli: &Cli, arg: &str) -> Result<bool> {
    let cfg = ExperimentConfig::load_or_preset(arg)?;
    let opts = RunOptions {
        threads: cli.threads,
        deterministic: cli.deterministic,
        out: cli.out.clone(),
    };
    let arts = run_experiment(&cfg, &opts)?;
    for a in &arts {
        print_artifact(a);
    }
    Ok(arts.iter().all(RunArtifact::passed))
}

fn analyze_cmd(cli: &Cli, dir: &Path) -> Result<bool> {
    let mut art = load_artifact(dir)?;
    analyze(&mut art)?;
    let target = cli.out.clone().unwrap_or_else(|| dir.to_path_buf());
    art.dir = Some(write_artifact(&art, &target)?);
    print_artifact(&art);
    Ok(art.passed())
}

fn classify(arg: &str) -> Result<bool> {
    let path = Path::new(arg);
    let f = if path.is_file() {
        CubicNonlinearity::load(path)?
    } else {
        CubicNonlinearity::preset(arg).with_context(|| format!("`{arg}` is neither a file nor a preset"))?
    };
    let class = f.classify(1024, 1e-10)?;
    println!("{}", serde_json::to_string_pretty(&class)?);
    Ok(true)
}

fn ode_suite(cli: &Cli, seed: u64) -> Result<bool> {
    let rep = run_ode_suite(seed);
    for e in &rep.entries {
        let tag = if e.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} {}: value {:.3e} threshold {:.3e} ({:.2} s) {}",
            e.name, e.value, e.threshold, e.seconds, e.detail
        );
    }
    if let Some(out) = &cli.out {
        std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        let path = out.join("ode_suite.json");
        std::fs::write(&path, serde_json::to_string_pretty(&rep)?).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(rep.passed())
}

fn report_cmd(cli: &Cli, dir: &Path) -> Result<bool> {
    let rows = report(dir)?;
    for r in &rows {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {} eps = {}: {} [{}]", r.name, r.eps, status_line(&r.status), r.dir.display());
        print_checks(&r.checks);
    }
    if let Some(out) = &cli.out {
        std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        let path = out.join("report.json");
        std::fs::write(&path, serde_json::to_string_pretty(&rows)?).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(rows.iter().all(|r| r.passed))
}

fn presets(cli: &Cli) -> Result<bool> {
    for name in preset_names() {
        match &cli.out {
            Some(out) => {
                std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
                let path = out.join(format!("{name}.toml"));
                std::fs::write(&path, preset(name)?.to_toml()).with_context(|| format!("writing {}", path.display()))?;
                println!("{}", path.display());
            }
            None => println!("{name}"),
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Run { config } => run(&cli, config),
        Command::Analyze { dir } => analyze_cmd(&cli, dir),
        Command::Classify { file } => classify(file),
        Command::OdeSuite { seed } => ode_suite(&cli, *seed),
        Command::Report { dir } => report_cmd(&cli, dir),
        Command::Presets => presets(&cli),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
