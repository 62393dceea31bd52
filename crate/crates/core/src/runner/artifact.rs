//! Per-run directories:
//!
//! ```text
//! config.toml   status.json   energy.csv   fits.json   profile.csv
//! rays/sigma_<σ>.csv
//! snapshots/<step>.bin + <step>.json
//! ```
//!
//! Snapshot arrays are little-endian `f64`, complex values interleaved
//! `re, im`, first all of `u` then all of `∂_t u`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ArtifactStatus, Check, ExperimentConfig, RunArtifact};
use crate::asymptotics::EnergyTrace;
use crate::error::{Error, Result};
use crate::fit::DecayFit;
use crate::solver::{Layout, Snapshot};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StatusFile {
    name: String,
    eps: f64,
    #[serde(flatten)]
    status: ArtifactStatus,
    passed: bool,
    checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SnapshotSidecar {
    step: usize,
    t: f64,
    layout: Layout,
    len: usize,
    fields: Vec<String>,
    dtype: String,
    endianness: String,
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn snapshot_bytes(s: &Snapshot) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 * s.u.len());
    for z in s.u.iter().chain(&s.ut) {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn snapshot_from_bytes(side: SnapshotSidecar, bytes: &[u8], path: &Path) -> Result<Snapshot> {
    if bytes.len() != 32 * side.len {
        return Err(Error::Serde(format!(
            "{}: {} bytes for {} complex pairs",
            path.display(),
            bytes.len(),
            side.len
        )));
    }
    let vals: Vec<C64> = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            C64::new(re, im)
        })
        .collect();
    let (u, ut) = vals.split_at(side.len);
    Ok(Snapshot {
        step: side.step,
        t: side.t,
        layout: side.layout,
        u: u.to_vec(),
        ut: ut.to_vec(),
    })
}

/// Writes every file of the artifact into `dir`; returns `dir`.
pub fn write_artifact(art: &RunArtifact, dir: &Path) -> Result<PathBuf> {
    mkdir(dir)?;
    write_text(&dir.join("config.toml"), &art.config.to_toml())?;
    let status = StatusFile {
        name: art.config.name.clone(),
        eps: art.eps,
        status: art.status.clone(),
        passed: art.passed(),
        checks: art.checks.clone(),
    };
    write_text(&dir.join("status.json"), &serde_json::to_string_pretty(&status)?)?;
    write_text(&dir.join("fits.json"), &serde_json::to_string_pretty(&art.fits)?)?;

    let path = dir.join("energy.csv");
    let mut w = create(&path)?;
    art.energy.write_csv(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(&path, e))?;

    if !art.rays.is_empty() {
        let rays = dir.join("rays");
        mkdir(&rays)?;
        for ray in &art.rays {
            let path = rays.join(format!("sigma_{}.csv", ray.sigma));
            let mut w = create(&path)?;
            ray.write_csv(&mut w)?;
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
    }
    if let Some(p) = &art.profile {
        p.save_csv(&dir.join("profile.csv"))?;
    }
    if art.config.run.save_snapshots && !art.snapshots.is_empty() {
        let snaps = dir.join("snapshots");
        mkdir(&snaps)?;
        for s in &art.snapshots {
            let side = SnapshotSidecar {
                step: s.step,
                t: s.t,
                layout: s.layout,
                len: s.u.len(),
                fields: vec!["u".into(), "ut".into()],
                dtype: "f64, complex interleaved re/im".into(),
                endianness: "little".into(),
            };
            let stem = format!("{:09}", s.step);
            write_text(&snaps.join(format!("{stem}.json")), &serde_json::to_string_pretty(&side)?)?;
            let bin = snaps.join(format!("{stem}.bin"));
            fs::write(&bin, snapshot_bytes(s)).map_err(|e| Error::io(&bin, e))?;
        }
    }
    Ok(dir.to_path_buf())
}

fn read_energy(path: &Path) -> Result<EnergyTrace> {
    let mut tr = EnergyTrace::default();
    for (n, line) in read_text(path)?.lines().enumerate().skip(1) {
        let mut cols = line.split(',').map(|c| c.trim().parse::<f64>());
        match (cols.next(), cols.next(), cols.next()) {
            (Some(Ok(t)), Some(Ok(e)), None) => tr.push(t, e),
            _ => return Err(Error::Serde(format!("{}: bad line {}", path.display(), n + 1))),
        }
    }
    Ok(tr)
}

/// Loads config, status, energy and snapshots of a run directory.
pub fn load_artifact(dir: &Path) -> Result<RunArtifact> {
    let config = ExperimentConfig::load(&dir.join("config.toml"))?;
    let status: StatusFile = serde_json::from_str(&read_text(&dir.join("status.json"))?)?;
    let energy = read_energy(&dir.join("energy.csv"))?;
    let mut snapshots = Vec::new();
    let snaps = dir.join("snapshots");
    if snaps.is_dir() {
        let mut sides: Vec<PathBuf> = fs::read_dir(&snaps)
            .map_err(|e| Error::io(&snaps, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        sides.sort();
        for side_path in sides {
            let side: SnapshotSidecar = serde_json::from_str(&read_text(&side_path)?)?;
            let bin = side_path.with_extension("bin");
            let bytes = fs::read(&bin).map_err(|e| Error::io(&bin, e))?;
            snapshots.push(snapshot_from_bytes(side, &bytes, &bin)?);
        }
    }
    Ok(RunArtifact {
        eps: status.eps,
        config,
        status: status.status,
        energy,
        snapshots,
        rays: Vec::new(),
        profile: None,
        fits: Vec::new(),
        checks: Vec::new(),
        dir: Some(dir.to_path_buf()),
    })
}

/// One line of `report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dir: PathBuf,
    pub name: String,
    pub eps: f64,
    pub status: ArtifactStatus,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub fits: Vec<DecayFit>,
}

fn collect_status_files(dir: &Path, depth: usize, out: &mut Vec<PathBuf>) -> Result<()> {
    let file = dir.join("status.json");
    if file.is_file() {
        out.push(dir.to_path_buf());
        return Ok(());
    }
    if depth == 0 {
        return Ok(());
    }
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    entries.sort();
    for e in entries {
        collect_status_files(&e, depth - 1, out)?;
    }
    Ok(())
}

/// Run directories under `dir` (or `dir` itself), with their stored results.
pub fn report(dir: &Path) -> Result<Vec<ReportRow>> {
    let mut dirs = Vec::new();
    collect_status_files(dir, 3, &mut dirs)?;
    if dirs.is_empty() {
        return Err(Error::Config(format!("no run artifacts found under {}", dir.display())));
    }
    dirs.into_iter()
        .map(|d| {
            let status: StatusFile = serde_json::from_str(&read_text(&d.join("status.json"))?)?;
            let fits_path = d.join("fits.json");
            let fits = if fits_path.is_file() {
                serde_json::from_str(&read_text(&fits_path)?)?
            } else {
                Vec::new()
            };
            Ok(ReportRow {
                dir: d,
                name: status.name,
                eps: status.eps,
                status: status.status,
                passed: status.passed,
                checks: status.checks,
                fits,
            })
        })
        .collect()
}
