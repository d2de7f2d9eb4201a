//! One-dimensional air | water | air verification against an exact composite
//! solution built from two Riemann fans.
//!
//! The incident air shock reaches the proximal water face at `t_a` and opens
//! fan A there. The transmitted water shock reaches the distal face at `t_b`
//! and opens fan B, whose left state is the water star state of fan A and
//! whose right state is the quiescent air behind the slab. The composite is
//! exact until the reflected wave of fan B crosses the slab back to the
//! proximal face.

use std::sync::Arc;

use serde::Serialize;

use crate::config::Config;
use crate::domain::{build_layered_column, post_shock_state, shock_speed, ShockProfile};
use crate::eos::{Material, MaterialParams, PrimitiveState, PSI_PA};
use crate::error::SimError;
use crate::riemann::{exact_star, sample_fan, Axis, ExactOptions, NormalState, RiemannFan, RiemannInput, WaveKind};
use crate::stepper::{Boundaries, SimulationState, StepOptions, Stepper};

/// Cells excluded on each side of every shock when integrating errors.
pub const SHOCK_BAND_CELLS: usize = 5;

/// Distance from every wave and material face beyond which a cell counts as
/// lying in a smooth region of the exact solution.
pub const SMOOTH_DISTANCE: f64 = 1.0e-3;

/// Offset after each wave-interaction time at which profiles are compared.
pub const COMPARE_DELAY: f64 = 6.0e-6;

#[derive(Debug, Clone)]
pub struct CompositeSolution {
    pub z_origin: f64,
    pub z_a: f64,
    pub z_b: f64,
    pub ambient_air: PrimitiveState,
    pub ambient_water: PrimitiveState,
    pub incident: PrimitiveState,
    pub incident_speed: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub fan_a: RiemannFan,
    pub fan_b: RiemannFan,
    inp_a: RiemannInput,
    inp_b: RiemannInput,
}

fn normal(w: &PrimitiveState) -> NormalState {
    NormalState::from_primitive(w, Axis::Z)
}

impl CompositeSolution {
    /// Faces are taken at the given positions; pass the grid-snapped ones to
    /// compare with a discrete run.
    pub fn new(cfg: &Config, z_a: f64, z_b: f64) -> Result<Self, SimError> {
        let air = cfg.materials.air;
        let water = cfg.materials.water;
        let profile = ShockProfile::from_config(cfg);
        let ambient_air = profile.ambient;
        let ambient_water = water.at_rest(ambient_air.p);
        let incident = post_shock_state(&ambient_air, profile.peak_overpressure, &air);
        let incident_speed = shock_speed(&ambient_air, profile.peak_overpressure, &air);
        let z_origin = cfg.grid.z_min;
        let t_a = profile.arrival_time + (z_a - z_origin) / incident_speed;

        let opts = ExactOptions { tol: cfg.numerics.exact_tol, max_iter: cfg.numerics.exact_max_iter };
        let solve =
            |inp: &RiemannInput, step: u64| exact_star(inp, &opts).map_err(|source| SimError::Riemann { step, source });
        let inp_a = RiemannInput::new(normal(&incident), air, normal(&ambient_water), water);
        let fan_a = solve(&inp_a, 0)?;
        if fan_a.right.kind != WaveKind::Shock {
            return Err(SimError::Config(crate::error::ConfigError::Invalid(
                "incident wave does not transmit a shock into the water".into(),
            )));
        }
        let t_b = t_a + (z_b - z_a) / fan_a.right.head;

        let water_star = NormalState { rho: fan_a.rho_star_right, un: fan_a.u_star, ut: 0.0, p: fan_a.p_star };
        let inp_b = RiemannInput::new(water_star, water, normal(&ambient_air), air);
        let fan_b = solve(&inp_b, 0)?;
        Ok(Self {
            z_origin,
            z_a,
            z_b,
            ambient_air,
            ambient_water,
            incident,
            incident_speed,
            t_a,
            t_b,
            fan_a,
            fan_b,
            inp_a,
            inp_b,
        })
    }

    /// Latest time at which the composite is exact.
    pub fn valid_until(&self) -> f64 {
        self.t_b + (self.z_b - self.z_a) / self.fan_b.left.head.abs()
    }

    /// Exact state at `(z, t)` seen by a cell of material `mat`.
    ///
    /// Material faces are held at their initial positions in the discrete
    /// model, so each cell is compared with the fan state on its own side of
    /// the contact.
    pub fn sample(&self, z: f64, t: f64, mat: Material) -> PrimitiveState {
        let in_slab = mat == Material::Water;
        if t <= self.t_a {
            let front = self.z_a - self.incident_speed * (self.t_a - t);
            return if in_slab {
                self.ambient_water
            } else if z < front {
                self.incident
            } else {
                self.ambient_air
            };
        }
        let on_side = |fan: &RiemannFan, inp: &RiemannInput, xi: f64, left: bool| -> PrimitiveState {
            let s = if left && xi > fan.u_star {
                NormalState { rho: fan.rho_star_left, un: fan.u_star, ut: inp.left.ut, p: fan.p_star }
            } else if !left && xi <= fan.u_star {
                NormalState { rho: fan.rho_star_right, un: fan.u_star, ut: inp.right.ut, p: fan.p_star }
            } else {
                sample_fan(fan, inp, xi)
            };
            s.to_primitive(Axis::Z)
        };
        let xi_a = (z - self.z_a) / (t - self.t_a);
        if z < self.z_a && !in_slab {
            return on_side(&self.fan_a, &self.inp_a, xi_a, true);
        }
        if z >= self.z_b && !in_slab {
            if t <= self.t_b {
                return self.ambient_air;
            }
            return on_side(&self.fan_b, &self.inp_b, (z - self.z_b) / (t - self.t_b), false);
        }
        // water slab
        if t <= self.t_b {
            return on_side(&self.fan_a, &self.inp_a, xi_a, false);
        }
        on_side(&self.fan_b, &self.inp_b, (z - self.z_b) / (t - self.t_b), true)
    }

    /// Positions of every shock present at time `t`.
    pub fn shock_positions(&self, t: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if t <= self.t_a {
            out.push(self.z_a - self.incident_speed * (self.t_a - t));
            return out;
        }
        let dta = t - self.t_a;
        if self.fan_a.left.kind == WaveKind::Shock {
            out.push(self.z_a + self.fan_a.left.head * dta);
        }
        if t <= self.t_b {
            out.push(self.z_a + self.fan_a.right.head * dta);
            return out;
        }
        let dtb = t - self.t_b;
        if self.fan_b.left.kind == WaveKind::Shock {
            out.push(self.z_b + self.fan_b.left.head * dtb);
        }
        if self.fan_b.right.kind == WaveKind::Shock {
            out.push(self.z_b + self.fan_b.right.head * dtb);
        }
        out
    }

    /// Shocks, rarefaction edges and material faces present at time `t`.
    pub fn wave_features(&self, t: f64) -> Vec<f64> {
        let mut out = self.shock_positions(t);
        out.extend([self.z_a, self.z_b]);
        let mut fan_edges = |fan: &RiemannFan, z0: f64, dt: f64| {
            for w in [fan.left, fan.right] {
                if w.kind == WaveKind::Rarefaction {
                    out.extend([z0 + w.head * dt, z0 + w.tail * dt]);
                }
            }
        };
        if t > self.t_a {
            fan_edges(&self.fan_a, self.z_a, t - self.t_a);
        }
        if t > self.t_b {
            fan_edges(&self.fan_b, self.z_b, t - self.t_b);
        }
        out
    }

    /// Gauge overpressure of the air shock leaving the distal face, psi.
    pub fn transmitted_overpressure_psi(&self) -> f64 {
        (self.fan_b.p_star - self.ambient_air.p) / PSI_PA
    }

    /// Density jump across the incident air shock; the error scale.
    pub fn jump_scale(&self) -> f64 {
        self.incident.rho - self.ambient_air.rho
    }
}

/// Numerical column profile at one instant.
#[derive(Debug, Clone, Serialize)]
pub struct ColumnProfile {
    pub time: f64,
    pub z: Vec<f64>,
    pub material: Vec<Material>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub rho_exact: Vec<f64>,
    pub u_exact: Vec<f64>,
    pub p_exact: Vec<f64>,
    /// Cells inside a shock exclusion band.
    pub excluded: Vec<bool>,
    /// Cells at least `SMOOTH_DISTANCE` from every wave and face.
    pub smooth: Vec<bool>,
}

impl ColumnProfile {
    fn mean_abs(num: &[f64], exact: &[f64], keep: impl Fn(usize) -> bool) -> f64 {
        let (mut sum, mut n) = (0.0, 0usize);
        for k in 0..num.len() {
            if keep(k) {
                sum += (num[k] - exact[k]).abs();
                n += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// Mean absolute density error over the cells outside the shock bands.
    pub fn l1_density_error(&self) -> f64 {
        Self::mean_abs(&self.rho, &self.rho_exact, |k| !self.excluded[k])
    }

    pub fn l1_pressure_error(&self) -> f64 {
        Self::mean_abs(&self.p, &self.p_exact, |k| !self.excluded[k])
    }

    pub fn smooth_density_error(&self) -> f64 {
        Self::mean_abs(&self.rho, &self.rho_exact, |k| self.smooth[k])
    }

    pub fn smooth_pressure_error(&self) -> f64 {
        Self::mean_abs(&self.p, &self.p_exact, |k| self.smooth[k])
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<(), SimError> {
        use std::fmt::Write as _;
        let mut s = String::from("z_m,material,rho,u,p,rho_exact,u_exact,p_exact,excluded,smooth\n");
        for k in 0..self.z.len() {
            let _ = writeln!(
                s,
                "{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                self.z[k],
                self.material[k].name(),
                self.rho[k],
                self.u[k],
                self.p[k],
                self.rho_exact[k],
                self.u_exact[k],
                self.p_exact[k],
                u8::from(self.excluded[k]),
                u8::from(self.smooth[k])
            );
        }
        std::fs::write(path, s).map_err(|e| SimError::io(path, e))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verify1dReport {
    pub n_z: usize,
    pub t_a: f64,
    pub t_b: f64,
    pub jump_scale: f64,
    pub l1_density_a: f64,
    pub l1_density_b: f64,
    /// L1 error divided by the jump scale.
    pub relative_l1_a: f64,
    pub relative_l1_b: f64,
    pub transmitted_psi_numeric: f64,
    pub transmitted_psi_exact: f64,
    pub steps: u64,
    /// At `t_a`, `t_a + 6 us`, `t_b`, `t_b + 6 us`.
    #[serde(skip)]
    pub profiles: [ColumnProfile; 4],
}

/// Relative L1 tolerance at each comparison time.
pub const L1_TOLERANCE: f64 = 0.01;
/// Reference transmitted overpressure and relative tolerance.
pub const TRANSMITTED_REFERENCE_PSI: f64 = 0.013;
pub const TRANSMITTED_TOLERANCE: f64 = 0.30;

impl Verify1dReport {
    pub fn l1_within_tolerance(&self) -> bool {
        self.relative_l1_a <= L1_TOLERANCE && self.relative_l1_b <= L1_TOLERANCE
    }

    pub fn transmitted_within_tolerance(&self) -> bool {
        (self.transmitted_psi_numeric - TRANSMITTED_REFERENCE_PSI).abs()
            <= TRANSMITTED_TOLERANCE * TRANSMITTED_REFERENCE_PSI
    }
}

/// Column driven by the configured shock, with planar numerics.
pub struct ColumnRun {
    pub stepper: Stepper,
    pub state: SimulationState,
    pub exact: CompositeSolution,
    pub cfl: f64,
}

impl ColumnRun {
    pub fn new(cfg: &Config, n_z: usize) -> Result<Self, SimError> {
        let sc = build_layered_column(cfg, n_z)?;
        let mats = cfg.materials.table();
        let exact = CompositeSolution::new(cfg, sc.geometry.transwell_z[0], sc.geometry.transwell_z[1])?;
        let opts = StepOptions { source: false, transverse: false, ..StepOptions::from_config(cfg) };
        let mut stepper =
            Stepper::new(sc.grid, mats, Boundaries::SHOCK_TUBE, opts).with_profile(ShockProfile::from_config(cfg));
        if let Some(n) = cfg.numerics.threads {
            stepper = stepper.with_threads(n);
        }
        let state = SimulationState::quiescent(sc.grid, Arc::new(sc.map), &mats, cfg.shock.ambient_pressure)
            .map_err(|source| SimError::Positivity { i: 0, j: 0, step: 0, source })?;
        Ok(Self { stepper, state, exact, cfl: cfg.numerics.cfl })
    }

    pub fn advance_to(&mut self, t: f64) -> Result<(), SimError> {
        self.stepper.advance_to(&mut self.state, t, self.cfl, |_| {})
    }

    pub fn profile(&self) -> ColumnProfile {
        let g = self.state.grid;
        let t = self.state.time;
        let shocks = self.exact.shock_positions(t);
        let features = self.exact.wave_features(t);
        let band = SHOCK_BAND_CELLS as f64 * g.d_z;
        let mats: &[MaterialParams; 3] = &self.stepper.mats;
        let mut prof = ColumnProfile {
            time: t,
            z: Vec::with_capacity(g.n_z),
            material: Vec::with_capacity(g.n_z),
            rho: Vec::with_capacity(g.n_z),
            u: Vec::with_capacity(g.n_z),
            p: Vec::with_capacity(g.n_z),
            rho_exact: Vec::with_capacity(g.n_z),
            u_exact: Vec::with_capacity(g.n_z),
            p_exact: Vec::with_capacity(g.n_z),
            excluded: Vec::with_capacity(g.n_z),
            smooth: Vec::with_capacity(g.n_z),
        };
        for j in 0..g.n_z {
            let z = g.z_center(j);
            let mat = self.state.material(0, j);
            let q = self.state.at(0, j);
            let ex = self.exact.sample(z, t, mat);
            prof.z.push(z);
            prof.material.push(mat);
            prof.rho.push(q.rho);
            prof.u.push(q.mom_z / q.rho);
            prof.p.push(self.state.pressure(0, j, mats));
            prof.rho_exact.push(ex.rho);
            prof.u_exact.push(ex.u_z);
            prof.p_exact.push(ex.p);
            prof.excluded.push(shocks.iter().any(|s| (z - s).abs() < band));
            prof.smooth.push(features.iter().all(|f| (z - f).abs() >= SMOOTH_DISTANCE));
        }
        prof
    }

    /// Mean air overpressure between the distal face and the transmitted
    /// shock, outside the shock band, in psi.
    pub fn transmitted_overpressure_psi(&self, prof: &ColumnProfile) -> f64 {
        let g = self.state.grid;
        let z_b = self.exact.z_b;
        let band = SHOCK_BAND_CELLS as f64 * g.d_z;
        let front = self.exact.shock_positions(prof.time).into_iter().fold(f64::NEG_INFINITY, f64::max);
        let (mut sum, mut n) = (0.0, 0usize);
        for k in 0..prof.z.len() {
            let z = prof.z[k];
            if prof.material[k] == Material::Air && z > z_b + 2.0 * g.d_z && z < front - band {
                sum += prof.p[k] - self.exact.ambient_air.p;
                n += 1;
            }
        }
        if n == 0 {
            f64::NAN
        } else {
            sum / n as f64 / PSI_PA
        }
    }
}

pub fn verify1d(cfg: &Config, n_z: usize) -> Result<Verify1dReport, SimError> {
    let mut run = ColumnRun::new(cfg, n_z)?;
    let (t_a, t_b) = (run.exact.t_a, run.exact.t_b);
    run.advance_to(t_a)?;
    let at_a = run.profile();
    run.advance_to(t_a + COMPARE_DELAY)?;
    let prof_a = run.profile();
    run.advance_to(t_b)?;
    let at_b = run.profile();
    run.advance_to(t_b + COMPARE_DELAY)?;
    let prof_b = run.profile();
    let jump = run.exact.jump_scale();
    let (la, lb) = (prof_a.l1_density_error(), prof_b.l1_density_error());
    Ok(Verify1dReport {
        n_z,
        t_a,
        t_b,
        jump_scale: jump,
        l1_density_a: la,
        l1_density_b: lb,
        relative_l1_a: la / jump,
        relative_l1_b: lb / jump,
        transmitted_psi_numeric: run.transmitted_overpressure_psi(&prof_b),
        transmitted_psi_exact: run.exact.transmitted_overpressure_psi(),
        steps: run.state.step,
        profiles: [at_a, prof_a, at_b, prof_b],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub resolutions: Vec<usize>,
    /// Density error outside the shock bands at the second comparison time.
    pub l1_density: Vec<f64>,
    pub l1_pressure: Vec<f64>,
    /// Errors restricted to smooth regions.
    pub smooth_pressure: Vec<f64>,
    pub smooth_density: Vec<f64>,
    /// Observed orders between successive resolutions.
    pub smooth_pressure_orders: Vec<f64>,
    pub smooth_density_orders: Vec<f64>,
    #[serde(skip)]
    pub profiles: Vec<ColumnProfile>,
}

fn observed_orders(errors: &[f64], resolutions: &[usize]) -> Vec<f64> {
    errors
        .windows(2)
        .zip(resolutions.windows(2))
        .map(|(e, n)| (e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln())
        .collect()
}

impl ConvergenceReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.l1_density.windows(2).all(|w| w[1] < w[0]) && self.l1_pressure.windows(2).all(|w| w[1] < w[0])
    }
}

pub fn converge(cfg: &Config, resolutions: &[usize]) -> Result<ConvergenceReport, SimError> {
    let mut rep = ConvergenceReport {
        resolutions: resolutions.to_vec(),
        l1_density: Vec::new(),
        l1_pressure: Vec::new(),
        smooth_pressure: Vec::new(),
        smooth_density: Vec::new(),
        smooth_pressure_orders: Vec::new(),
        smooth_density_orders: Vec::new(),
        profiles: Vec::new(),
    };
    for &n in resolutions {
        let [_, _, _, prof] = verify1d(cfg, n)?.profiles;
        rep.l1_density.push(prof.l1_density_error());
        rep.l1_pressure.push(prof.l1_pressure_error());
        rep.smooth_pressure.push(prof.smooth_pressure_error());
        rep.smooth_density.push(prof.smooth_density_error());
        rep.profiles.push(prof);
    }
    rep.smooth_pressure_orders = observed_orders(&rep.smooth_pressure, resolutions);
    rep.smooth_density_orders = observed_orders(&rep.smooth_density, resolutions);
    Ok(rep)
}
