//! Gauges, frame snapshots, axis slices and cavitation metrics, with their
//! on-disk formats.
//!
//! Frames are a JSON header plus a raw little-endian `f64` payload holding the
//! arrays `rho, mom_r, mom_z, E, p` in that order, each with the radial index
//! varying fastest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::GaugeConfig;
use crate::domain::{GridSpec, MaterialMap};
use crate::eos::{pa_to_gauge_psi, raw_pressure, Material, MaterialParams};
use crate::error::{ConfigError, SimError};
use crate::stepper::SimulationState;

pub const FRAME_VARIABLES: [&str; 5] = ["rho", "mom_r", "mom_z", "E", "p"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeSpec {
    pub id: String,
    pub r: f64,
    pub z: f64,
    /// Resolved cell.
    pub i: usize,
    pub j: usize,
    pub material: Material,
    /// Set when the gauge sits inside the solid inclusion; it is still recorded.
    pub irrelevant: bool,
}

pub fn resolve_gauges(cfgs: &[GaugeConfig], grid: &GridSpec, map: &MaterialMap) -> Result<Vec<GaugeSpec>, ConfigError> {
    cfgs.iter()
        .map(|g| {
            let (i, j) = grid.nearest_cell(g.r, g.z).ok_or_else(|| {
                ConfigError::Invalid(format!("gauge {} at (r={}, z={}) lies outside the domain", g.id, g.r, g.z))
            })?;
            let material = map.get(i, j);
            Ok(GaugeSpec {
                id: g.id.clone(),
                r: g.r,
                z: g.z,
                i,
                j,
                material,
                irrelevant: material == Material::Polystyrene,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GaugeSeries {
    pub id: String,
    /// s
    pub t: Vec<f64>,
    /// Pa, absolute
    pub p_abs: Vec<f64>,
}

impl GaugeSeries {
    pub fn new(id: &str) -> Self {
        Self { id: id.to_string(), ..Self::default() }
    }

    pub fn min_pressure(&self) -> f64 {
        self.p_abs.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Append the current pressure at each gauge. Reads the state only.
pub fn record_gauges(s: &SimulationState, mats: &[MaterialParams; 3], specs: &[GaugeSpec], series: &mut [GaugeSeries]) {
    for (g, out) in specs.iter().zip(series.iter_mut()) {
        if out.t.last().is_some_and(|&t| t >= s.time) {
            continue;
        }
        out.t.push(s.time);
        out.p_abs.push(s.pressure(g.i, g.j, mats));
    }
}

pub fn write_gauges(series: &GaugeSeries, path: &Path) -> Result<(), SimError> {
    let mut s = String::with_capacity(64 * (series.t.len() + 1));
    s.push_str("t_us,p_abs_pa,p_gauge_psi\n");
    for (t, p) in series.t.iter().zip(&series.p_abs) {
        let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", t * 1e6, p, pa_to_gauge_psi(*p));
    }
    fs::write(path, s).map_err(|e| SimError::io(path, e))
}

/// Parse a gauge CSV back into `(t_us, p_abs_pa, p_gauge_psi)` rows.
pub fn read_gauges(path: &Path) -> Result<Vec<[f64; 3]>, SimError> {
    let text = fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
    let bad = || SimError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, "malformed gauge row"));
    text.lines()
        .skip(1)
        .map(|line| {
            let mut row = [0.0; 3];
            let mut parts = line.split(',');
            for v in &mut row {
                *v = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            }
            Ok(row)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CavitationEntry {
    pub frame: usize,
    /// s
    pub time: f64,
    /// Minimum absolute pressure over water cells, Pa.
    pub min_water_pressure: f64,
    pub below_vapor: usize,
    pub water_cells: usize,
    /// Water cells below `p_vapor`, radial index fastest.
    #[serde(skip)]
    pub mask: Vec<bool>,
}

pub fn cavitation_metrics(
    s: &SimulationState,
    mats: &[MaterialParams; 3],
    p_vapor: f64,
    frame: usize,
) -> CavitationEntry {
    let water = &mats[Material::Water.index()];
    let mut e = CavitationEntry {
        frame,
        time: s.time,
        min_water_pressure: f64::INFINITY,
        below_vapor: 0,
        water_cells: 0,
        mask: vec![false; s.q.len()],
    };
    for (k, (q, m)) in s.q.iter().zip(s.materials.as_slice()).enumerate() {
        if *m != Material::Water {
            continue;
        }
        let p = raw_pressure(q, water);
        e.water_cells += 1;
        e.min_water_pressure = e.min_water_pressure.min(p);
        if p < p_vapor {
            e.below_vapor += 1;
            e.mask[k] = true;
        }
    }
    e
}

/// Minimum pressure over water cells, or `None` when there is no water.
pub fn min_water_pressure(s: &SimulationState, mats: &[MaterialParams; 3]) -> Option<f64> {
    let water = &mats[Material::Water.index()];
    s.q.iter()
        .zip(s.materials.as_slice())
        .filter(|(_, m)| **m == Material::Water)
        .map(|(q, _)| raw_pressure(q, water))
        .reduce(f64::min)
}

pub fn write_cavitation(entries: &[CavitationEntry], p_vapor: f64, path: &Path) -> Result<(), SimError> {
    let mut s = String::from("frame,t_us,min_water_p_pa,below_vapor_cells,water_cells,p_vapor_pa\n");
    for e in entries {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{},{},{:.16e}",
            e.frame,
            e.time * 1e6,
            e.min_water_pressure,
            e.below_vapor,
            e.water_cells,
            p_vapor
        );
    }
    fs::write(path, s).map_err(|e| SimError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameHeader {
    pub index: usize,
    /// `[n_r, n_z]`
    pub shape: [usize; 2],
    /// `[d_r, d_z]`, m
    pub spacing: [f64; 2],
    pub r_origin: f64,
    pub z_origin: f64,
    /// s
    pub time: f64,
    pub time_us: f64,
    pub step: u64,
    pub variables: Vec<String>,
    pub layout: String,
    pub dtype: String,
    pub endianness: String,
    pub payload: String,
}

pub fn frame_paths(dir: &Path, index: usize) -> (PathBuf, PathBuf) {
    (dir.join(format!("frame_{index:04}.json")), dir.join(format!("frame_{index:04}.bin")))
}

fn pressures(s: &SimulationState, mats: &[MaterialParams; 3]) -> Vec<f64> {
    s.q.iter().zip(s.materials.as_slice()).map(|(q, m)| raw_pressure(q, &mats[m.index()])).collect()
}

/// Frame payload bytes for `s`.
pub fn frame_payload(s: &SimulationState, mats: &[MaterialParams; 3]) -> Vec<u8> {
    let n = s.q.len();
    let mut buf = Vec::with_capacity(5 * n * 8);
    for k in 0..4 {
        for q in &s.q {
            let v = [q.rho, q.mom_r, q.mom_z, q.energy][k];
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    for p in pressures(s, mats) {
        buf.extend_from_slice(&p.to_le_bytes());
    }
    buf
}

/// Write `frame_####.json` and `frame_####.bin` under `dir`.
pub fn write_frame(
    s: &SimulationState,
    mats: &[MaterialParams; 3],
    dir: &Path,
    index: usize,
) -> Result<FrameHeader, SimError> {
    let (json_path, bin_path) = frame_paths(dir, index);
    let g = &s.grid;
    let header = FrameHeader {
        index,
        shape: [g.n_r, g.n_z],
        spacing: [g.d_r, g.d_z],
        r_origin: 0.0,
        z_origin: g.z_origin,
        time: s.time,
        time_us: s.time * 1e6,
        step: s.step,
        variables: FRAME_VARIABLES.iter().map(|v| v.to_string()).collect(),
        layout: "radial index fastest; arrays concatenated in variable order".into(),
        dtype: "f64".into(),
        endianness: "little".into(),
        payload: bin_path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
    };
    fs::write(&bin_path, frame_payload(s, mats)).map_err(|e| SimError::io(&bin_path, e))?;
    let json = serde_json::to_string_pretty(&header).expect("header serializes");
    fs::write(&json_path, json).map_err(|e| SimError::io(&json_path, e))?;
    Ok(header)
}

/// Header plus the five arrays of a frame.
pub fn read_frame(json_path: &Path) -> Result<(FrameHeader, Vec<Vec<f64>>), SimError> {
    let invalid = |msg: String| SimError::io(json_path, std::io::Error::new(std::io::ErrorKind::InvalidData, msg));
    let text = fs::read_to_string(json_path).map_err(|e| SimError::io(json_path, e))?;
    let header: FrameHeader = serde_json::from_str(&text).map_err(|e| invalid(e.to_string()))?;
    let bin = json_path.with_file_name(&header.payload);
    let bytes = fs::read(&bin).map_err(|e| SimError::io(&bin, e))?;
    let n = header.shape[0] * header.shape[1];
    if bytes.len() != header.variables.len() * n * 8 {
        return Err(invalid(format!("payload has {} bytes, expected {}", bytes.len(), header.variables.len() * n * 8)));
    }
    let arrays = bytes
        .chunks_exact(n * 8)
        .map(|chunk| chunk.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect())
        .collect();
    Ok((header, arrays))
}

/// On-axis slice `axis_####.csv`, one row per axial cell.
pub fn write_axis_slice(
    s: &SimulationState,
    mats: &[MaterialParams; 3],
    dir: &Path,
    index: usize,
) -> Result<(), SimError> {
    let path = dir.join(format!("axis_{index:04}.csv"));
    let g = &s.grid;
    let mut out = String::from("z_m,material,rho,u_z,p_abs_pa,p_gauge_psi\n");
    for j in 0..g.n_z {
        let q = s.at(0, j);
        let p = s.pressure(0, j, mats);
        let _ = writeln!(
            out,
            "{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            g.z_center(j),
            s.material(0, j).name(),
            q.rho,
            q.mom_z / q.rho,
            p,
            pa_to_gauge_psi(p)
        );
    }
    fs::write(&path, out).map_err(|e| SimError::io(&path, e))
}

/// `(t, value)` pairs as a two-column CSV.
pub fn write_series(header: &str, rows: &[(f64, f64)], path: &Path) -> Result<(), SimError> {
    let mut s = String::from(header);
    s.push('\n');
    for (t, v) in rows {
        let _ = writeln!(s, "{:.16e},{:.16e}", t * 1e6, v);
    }
    fs::write(path, s).map_err(|e| SimError::io(path, e))
}
