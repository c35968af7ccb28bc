//! Map dumps: one binary PGM (P5) per channel plus a JSON sidecar.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::render::ObservationSet;
use crate::error::Result;
use crate::geom::Pose2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSidecar {
    pub w: usize,
    pub resolution: f64,
    /// Agent-frame offset of cell (0, 0).
    pub origin: [f64; 2],
    pub agent_id: usize,
    pub time_step: u64,
    pub agent_pose: Pose2,
    /// Value represented by grey level 255, per channel.
    pub scales: Scales,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    pub d: f64,
    pub s: f64,
    pub r: f64,
    pub v: [f64; 2],
    pub p: f64,
}

/// Writes an 8-bit binary PGM; `pixels` is row-major with row 0 written first.
pub fn write_pgm(path: &Path, w: usize, h: usize, pixels: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    write!(f, "P5\n{w} {h}\n255\n")?;
    f.write_all(pixels)?;
    Ok(())
}

fn scale(values: impl Iterator<Item = f64>, lo: f64, hi: f64) -> Vec<u8> {
    let span = if hi > lo { hi - lo } else { 1.0 };
    values.map(|v| (((v - lo) / span) * 255.0).round().clamp(0.0, 255.0) as u8).collect()
}

/// Writes `{prefix}_{d,s,r,v,p}.pgm` and `{prefix}.json` into `dir`.
pub fn dump_observation(obs: &ObservationSet, dir: &Path, prefix: &str) -> Result<MapSidecar> {
    fs::create_dir_all(dir)?;
    let w = obs.frame.w;
    let d_max = obs.d.cells.iter().cloned().fold(0.0, f64::max);
    let v_lo = obs.v.cells.iter().cloned().fold(f64::INFINITY, f64::min);
    let v_hi = obs.v.cells.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let channels: [(&str, Vec<u8>); 5] = [
        ("d", scale(obs.d.cells.iter().cloned(), 0.0, d_max)),
        ("s", obs.s.cells.iter().map(|&l| l * 63).collect()),
        ("r", obs.r.cells.iter().map(|&b| b * 255).collect()),
        ("v", scale(obs.v.cells.iter().cloned(), v_lo, v_hi)),
        ("p", scale(obs.p.grid.cells.iter().cloned(), 0.0, 1.0)),
    ];
    for (name, px) in &channels {
        write_pgm(&dir.join(format!("{prefix}_{name}.pgm")), w, w, px)?;
    }
    let origin = obs.frame.origin();
    let sidecar = MapSidecar {
        w,
        resolution: obs.frame.resolution,
        origin: [origin.x, origin.y],
        agent_id: obs.agent_id,
        time_step: obs.time_step,
        agent_pose: obs.frame.agent,
        scales: Scales {
            d: d_max,
            s: 4.0,
            r: 1.0,
            v: [v_lo, v_hi],
            p: 1.0,
        },
    };
    fs::write(dir.join(format!("{prefix}.json")), serde_json::to_string_pretty(&sidecar)?)?;
    Ok(sidecar)
}
