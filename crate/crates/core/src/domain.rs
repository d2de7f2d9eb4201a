//! Grid, material layout and incident-shock description of the shock-tube
//! cross section.

use serde::{Deserialize, Serialize};

use crate::config::{Config, HydrophoneEntry, ProfileKind};
use crate::eos::{Material, MaterialParams, PrimitiveState};
use crate::error::ConfigError;

/// Uniform cell-centred grid over `r in [0, n_r d_r]`, `z in [z_origin, z_origin + n_z d_z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_r: usize,
    pub n_z: usize,
    pub d_r: f64,
    pub d_z: f64,
    pub z_origin: f64,
}

impl GridSpec {
    pub fn new(n_r: usize, n_z: usize, d_r: f64, d_z: f64, z_origin: f64) -> Result<Self, ConfigError> {
        if n_r < 4 || n_z < 4 {
            return Err(ConfigError::Invalid(format!("grid needs at least 4x4 cells, got {n_r}x{n_z}")));
        }
        Self::checked(n_r, n_z, d_r, d_z, z_origin)
    }

    /// A single radial cell: a one-dimensional column along z.
    pub fn single_column(n_z: usize, d_r: f64, d_z: f64, z_origin: f64) -> Result<Self, ConfigError> {
        if n_z < 4 {
            return Err(ConfigError::Invalid(format!("column needs at least 4 cells, got {n_z}")));
        }
        Self::checked(1, n_z, d_r, d_z, z_origin)
    }

    fn checked(n_r: usize, n_z: usize, d_r: f64, d_z: f64, z_origin: f64) -> Result<Self, ConfigError> {
        if !(d_r > 0.0 && d_z > 0.0) || !d_r.is_finite() || !d_z.is_finite() || !z_origin.is_finite() {
            return Err(ConfigError::Invalid("cell sizes must be positive and finite".into()));
        }
        Ok(Self { n_r, n_z, d_r, d_z, z_origin })
    }

    pub fn cells(&self) -> usize {
        self.n_r * self.n_z
    }

    #[inline]
    pub fn r_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.d_r
    }

    #[inline]
    pub fn z_center(&self, j: usize) -> f64 {
        self.z_origin + (j as f64 + 0.5) * self.d_z
    }

    pub fn r_max(&self) -> f64 {
        self.n_r as f64 * self.d_r
    }

    pub fn z_max(&self) -> f64 {
        self.z_origin + self.n_z as f64 * self.d_z
    }

    /// Radial index varies fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n_r + i
    }

    /// Nearest cell centre along one axis; exact ties go to the lower index.
    fn nearest(coord: f64, origin: f64, d: f64, n: usize) -> usize {
        let x = (coord - origin) / d - 0.5;
        let lower = x.floor();
        let idx = if x - lower > 0.5 { lower + 1.0 } else { lower };
        idx.clamp(0.0, (n - 1) as f64) as usize
    }

    pub fn nearest_cell(&self, r: f64, z: f64) -> Option<(usize, usize)> {
        if !(r >= 0.0 && r <= self.r_max() && z >= self.z_origin && z <= self.z_max()) {
            return None;
        }
        Some((Self::nearest(r, 0.0, self.d_r, self.n_r), Self::nearest(z, self.z_origin, self.d_z, self.n_z)))
    }

    /// Index of the cell edge closest to `coord`.
    fn snap_edge(coord: f64, origin: f64, d: f64) -> usize {
        ((coord - origin) / d).round().max(0.0) as usize
    }
}

/// Requested and snapped positions of the material boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioGeometry {
    pub domain_r: [f64; 2],
    pub domain_z: [f64; 2],
    /// Snapped axial extent of the water region.
    pub transwell_z: [f64; 2],
    pub transwell_radius: f64,
    pub hydrophone: Option<HydrophoneGeometry>,
    /// Largest distance any requested boundary moved when snapped to an edge.
    pub max_snap_displacement: f64,
    /// Edge indices: `[j_start, j_end)` and `i_end` of the water block.
    pub transwell_edges: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HydrophoneGeometry {
    pub radius: f64,
    pub z: [f64; 2],
    /// `[j_lo, j_hi)` and `i_end`.
    pub edges: [usize; 3],
}

/// Static per-cell material layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaterialMap {
    n_r: usize,
    n_z: usize,
    cells: Vec<Material>,
}

impl MaterialMap {
    pub fn uniform(grid: &GridSpec, m: Material) -> Self {
        Self { n_r: grid.n_r, n_z: grid.n_z, cells: vec![m; grid.cells()] }
    }

    pub fn from_fn(grid: &GridSpec, f: impl Fn(usize, usize) -> Material) -> Self {
        let mut cells = Vec::with_capacity(grid.cells());
        for j in 0..grid.n_z {
            for i in 0..grid.n_r {
                cells.push(f(i, j));
            }
        }
        Self { n_r: grid.n_r, n_z: grid.n_z, cells }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Material {
        self.cells[j * self.n_r + i]
    }

    pub fn as_slice(&self) -> &[Material] {
        &self.cells
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_r, self.n_z)
    }

    pub fn count(&self, m: Material) -> usize {
        self.cells.iter().filter(|&&c| c == m).count()
    }

    pub fn distinct(&self) -> Vec<Material> {
        let mut v: Vec<Material> = Material::ALL.iter().copied().filter(|m| self.cells.contains(m)).collect();
        v.sort();
        v
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub grid: GridSpec,
    pub map: MaterialMap,
    pub geometry: ScenarioGeometry,
}

/// Axisymmetric transwell (and optional hydrophone rod) in the tube cross section.
///
/// The polystyrene transwell wall is not represented; the water block is in
/// direct contact with air.
pub fn build_scenario(cfg: &Config) -> Result<Scenario, ConfigError> {
    let g = &cfg.grid;
    if !(g.r_max > 0.0 && g.z_max > g.z_min) {
        return Err(ConfigError::Invalid("domain extents must be positive".into()));
    }
    let grid =
        GridSpec::new(g.n_r, g.n_z, g.r_max / g.n_r.max(1) as f64, (g.z_max - g.z_min) / g.n_z.max(1) as f64, g.z_min)?;

    let t = &cfg.transwell;
    if !(t.radius > 0.0) || !(t.length > 0.0) {
        return Err(ConfigError::Invalid("transwell radius and length must be positive".into()));
    }
    let z_end = t.z_start + t.length;
    if !(t.z_start > g.z_min && z_end < g.z_max && t.radius < g.r_max) {
        return Err(ConfigError::Invalid(format!(
            "transwell z in [{}, {}] r < {} does not fit strictly inside the domain",
            t.z_start, z_end, t.radius
        )));
    }

    let j_a = GridSpec::snap_edge(t.z_start, grid.z_origin, grid.d_z);
    let j_b = GridSpec::snap_edge(z_end, grid.z_origin, grid.d_z);
    let i_w = GridSpec::snap_edge(t.radius, 0.0, grid.d_r);
    if i_w == 0 || j_b <= j_a || j_a == 0 || j_b >= grid.n_z || i_w >= grid.n_r {
        return Err(ConfigError::Invalid("grid too coarse to resolve the transwell".into()));
    }
    let edge_z = |j: usize| grid.z_origin + j as f64 * grid.d_z;
    let edge_r = |i: usize| i as f64 * grid.d_r;
    let mut snap = (edge_z(j_a) - t.z_start).abs().max((edge_z(j_b) - z_end).abs()).max((edge_r(i_w) - t.radius).abs());

    let hydrophone = if cfg.hydrophone.enabled {
        let h = &cfg.hydrophone;
        let tip = h.tip_z.unwrap_or(t.z_start + 0.5 * t.length);
        if !(h.radius > 0.0) || !(h.radius < t.radius) || !(tip > t.z_start && tip < z_end) {
            return Err(ConfigError::Invalid("hydrophone must lie inside the transwell water".into()));
        }
        let i_h = GridSpec::snap_edge(h.radius, 0.0, grid.d_r);
        if i_h < 2 {
            return Err(ConfigError::Invalid(format!(
                "hydrophone radius {} m needs at least 2 radial cells (d_r = {} m)",
                h.radius, grid.d_r
            )));
        }
        let j_t = GridSpec::snap_edge(tip, grid.z_origin, grid.d_z);
        if i_h >= i_w || j_t <= j_a || j_t >= j_b {
            return Err(ConfigError::Invalid("hydrophone collapses onto the transwell boundary".into()));
        }
        snap = snap.max((edge_r(i_h) - h.radius).abs()).max((edge_z(j_t) - tip).abs());
        let (lo, hi) = match h.entry {
            HydrophoneEntry::Distal => (j_t, j_b),
            HydrophoneEntry::Proximal => (j_a, j_t),
        };
        Some(HydrophoneGeometry { radius: edge_r(i_h), z: [edge_z(lo), edge_z(hi)], edges: [lo, hi, i_h] })
    } else {
        None
    };

    let map = MaterialMap::from_fn(&grid, |i, j| {
        if let Some(h) = &hydrophone {
            if i < h.edges[2] && j >= h.edges[0] && j < h.edges[1] {
                return Material::Polystyrene;
            }
        }
        if i < i_w && j >= j_a && j < j_b {
            Material::Water
        } else {
            Material::Air
        }
    });

    let geometry = ScenarioGeometry {
        domain_r: [0.0, grid.r_max()],
        domain_z: [grid.z_origin, grid.z_max()],
        transwell_z: [edge_z(j_a), edge_z(j_b)],
        transwell_radius: edge_r(i_w),
        hydrophone,
        max_snap_displacement: snap,
        transwell_edges: [j_a, j_b, i_w],
    };
    Ok(Scenario { grid, map, geometry })
}

/// One-dimensional air | water | air column matching the axial cross section.
pub fn build_layered_column(cfg: &Config, n_z: usize) -> Result<Scenario, ConfigError> {
    let g = &cfg.grid;
    let d_z = (g.z_max - g.z_min) / n_z.max(1) as f64;
    let grid = GridSpec::single_column(n_z, d_z, d_z, g.z_min)?;
    let t = &cfg.transwell;
    let z_end = t.z_start + t.length;
    if !(t.z_start > g.z_min && z_end < g.z_max && t.length > 0.0) {
        return Err(ConfigError::Invalid("water slab does not fit inside the column".into()));
    }
    let j_a = GridSpec::snap_edge(t.z_start, grid.z_origin, d_z);
    let j_b = GridSpec::snap_edge(z_end, grid.z_origin, d_z);
    if j_b <= j_a || j_a == 0 || j_b >= n_z {
        return Err(ConfigError::Invalid("column too coarse to resolve the water slab".into()));
    }
    let edge_z = |j: usize| grid.z_origin + j as f64 * d_z;
    let map = MaterialMap::from_fn(&grid, |_, j| if j >= j_a && j < j_b { Material::Water } else { Material::Air });
    let geometry = ScenarioGeometry {
        domain_r: [0.0, grid.r_max()],
        domain_z: [grid.z_origin, grid.z_max()],
        transwell_z: [edge_z(j_a), edge_z(j_b)],
        transwell_radius: grid.r_max(),
        hydrophone: None,
        max_snap_displacement: (edge_z(j_a) - t.z_start).abs().max((edge_z(j_b) - z_end).abs()),
        transwell_edges: [j_a, j_b, 1],
    };
    Ok(Scenario { grid, map, geometry })
}

/// Incident shock fed through the z-min boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockProfile {
    /// Pa, above ambient.
    pub peak_overpressure: f64,
    pub kind: ProfileKind,
    pub ambient: PrimitiveState,
    /// s
    pub arrival_time: f64,
}

impl ShockProfile {
    pub fn from_config(cfg: &Config) -> Self {
        let air = cfg.materials.air;
        Self {
            peak_overpressure: cfg.peak_overpressure(),
            kind: cfg.shock.profile,
            ambient: air.at_rest(cfg.shock.ambient_pressure),
            arrival_time: cfg.shock.arrival_us * 1e-6,
        }
    }

    /// Overpressure imposed at the inflow boundary at time `t`, zero before arrival.
    pub fn overpressure_at(&self, t: f64) -> f64 {
        if t < self.arrival_time {
            return 0.0;
        }
        match self.kind {
            ProfileKind::StepHold => self.peak_overpressure,
            ProfileKind::StepExponential { tau_us } => {
                self.peak_overpressure * (-(t - self.arrival_time) / (tau_us * 1e-6)).exp()
            }
        }
    }

    /// Boundary state at time `t`.
    pub fn inflow_state_at(&self, t: f64, air: &MaterialParams) -> PrimitiveState {
        let dp = self.overpressure_at(t);
        if dp > 0.0 {
            post_shock_state(&self.ambient, dp, air)
        } else {
            self.ambient
        }
    }
}

/// Post-shock state behind the peak of the profile.
pub fn inflow_state_from_overpressure(profile: &ShockProfile, air: &MaterialParams) -> PrimitiveState {
    post_shock_state(&profile.ambient, profile.peak_overpressure, air)
}

/// Mach number (relative to the quiescent gas) of a shock with the given overpressure.
pub fn shock_mach(ambient: &PrimitiveState, overpressure: f64, m: &MaterialParams) -> f64 {
    let g = m.gamma;
    let ratio = (ambient.p + overpressure + m.p_inf) / (ambient.p + m.p_inf);
    ((g + 1.0) / (2.0 * g) * (ratio - 1.0) + 1.0).sqrt()
}

/// Lab-frame speed of a right-moving shock into gas at rest.
pub fn shock_speed(ambient: &PrimitiveState, overpressure: f64, m: &MaterialParams) -> f64 {
    let c1 = (m.gamma * (ambient.p + m.p_inf) / ambient.rho).sqrt();
    ambient.u_z + shock_mach(ambient, overpressure, m) * c1
}

/// Rankine-Hugoniot state behind a right-moving shock into `ambient`.
pub fn post_shock_state(ambient: &PrimitiveState, overpressure: f64, m: &MaterialParams) -> PrimitiveState {
    let g = m.gamma;
    let ms = shock_mach(ambient, overpressure, m);
    let ms2 = ms * ms;
    let c1 = (g * (ambient.p + m.p_inf) / ambient.rho).sqrt();
    PrimitiveState {
        rho: ambient.rho * (g + 1.0) * ms2 / ((g - 1.0) * ms2 + 2.0),
        u_r: ambient.u_r,
        u_z: ambient.u_z + 2.0 * c1 / (g + 1.0) * (ms - 1.0 / ms),
        p: ambient.p + overpressure,
    }
}
