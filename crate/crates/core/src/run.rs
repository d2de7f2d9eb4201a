//! Scenario driver: builds the transwell problem from a configuration, steps it
//! to the end time while hitting every frame time exactly, and collects the
//! gauge, frame and cavitation observables.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use crate::config::Config;
use crate::domain::{build_scenario, Scenario, ShockProfile};
use crate::eos::MaterialParams;
use crate::error::SimError;
use crate::observables::{
    cavitation_metrics, min_water_pressure, record_gauges, resolve_gauges, write_axis_slice, write_cavitation,
    write_frame, write_gauges, write_series, CavitationEntry, GaugeSeries, GaugeSpec,
};
use crate::stepper::{Boundaries, SimulationState, StepOptions, Stepper};

/// Receives each frame snapshot as the run reaches it.
pub trait FrameSink {
    fn frame(&mut self, index: usize, s: &SimulationState, mats: &[MaterialParams; 3]) -> Result<(), SimError>;
}

/// Discards frames.
pub struct NoFrames;

impl FrameSink for NoFrames {
    fn frame(&mut self, _: usize, _: &SimulationState, _: &[MaterialParams; 3]) -> Result<(), SimError> {
        Ok(())
    }
}

/// Keeps every frame snapshot in memory.
#[derive(Default)]
pub struct KeepFrames(pub Vec<SimulationState>);

impl FrameSink for KeepFrames {
    fn frame(&mut self, _: usize, s: &SimulationState, _: &[MaterialParams; 3]) -> Result<(), SimError> {
        self.0.push(s.clone());
        Ok(())
    }
}

/// Writes `frame_####` and `axis_####` files into a directory.
pub struct DiskFrames {
    pub dir: PathBuf,
}

impl FrameSink for DiskFrames {
    fn frame(&mut self, index: usize, s: &SimulationState, mats: &[MaterialParams; 3]) -> Result<(), SimError> {
        write_frame(s, mats, &self.dir, index)?;
        write_axis_slice(s, mats, &self.dir, index)
    }
}

pub struct Simulation {
    pub config: Config,
    pub scenario: Scenario,
    pub stepper: Stepper,
    pub state: SimulationState,
    pub gauges: Vec<GaugeSpec>,
}

impl Simulation {
    pub fn new(cfg: &Config) -> Result<Self, SimError> {
        cfg.validate()?;
        let scenario = build_scenario(cfg)?;
        let mats = cfg.materials.table();
        let gauges = resolve_gauges(&cfg.resolved_gauges(), &scenario.grid, &scenario.map)?;
        let mut stepper = Stepper::new(scenario.grid, mats, Boundaries::SHOCK_TUBE, StepOptions::from_config(cfg))
            .with_profile(ShockProfile::from_config(cfg));
        if let Some(n) = cfg.numerics.threads {
            stepper = stepper.with_threads(n);
        }
        let state = SimulationState::quiescent(
            scenario.grid,
            Arc::new(scenario.map.clone()),
            &mats,
            cfg.shock.ambient_pressure,
        )
        .map_err(|source| SimError::Positivity { i: 0, j: 0, step: 0, source })?;
        Ok(Self { config: cfg.clone(), scenario, stepper, state, gauges })
    }

    /// Frame times in seconds, limited to the end time.
    pub fn frame_times(&self) -> Vec<f64> {
        let t_end = self.config.t_end_us;
        self.config.frame_times_us.iter().filter(|t| **t <= t_end).map(|t| t / 1e6).collect()
    }

    /// Step to the end time. The state is left at the last stable step when an
    /// error is returned in `RunOutput::failure`.
    pub fn run(&mut self, sink: &mut dyn FrameSink) -> RunOutput {
        let mats = self.stepper.mats;
        let p_vapor = self.config.p_vapor;
        let cfl = self.config.numerics.cfl;
        let mut out =
            RunOutput { gauges: self.gauges.iter().map(|g| GaugeSeries::new(&g.id)).collect(), ..RunOutput::default() };
        let on_step = |s: &SimulationState, out: &mut RunOutput| {
            record_gauges(s, &mats, &self.gauges, &mut out.gauges);
            if let Some(p) = min_water_pressure(s, &mats) {
                out.water_min.push((s.time, p));
            }
        };
        on_step(&self.state, &mut out);

        let mut targets: Vec<(f64, Option<usize>)> =
            self.frame_times().into_iter().enumerate().map(|(k, t)| (t, Some(k + 1))).collect();
        let t_end = self.config.t_end_us / 1e6;
        if targets.last().is_none_or(|(t, _)| *t < t_end) {
            targets.push((t_end, None));
        }
        for (t, frame) in targets {
            let res = self.stepper.advance_to(&mut self.state, t, cfl, |s| on_step(s, &mut out));
            if let Err(e) = res {
                out.failure = Some(e);
                break;
            }
            if let Some(index) = frame {
                out.cavitation.push(cavitation_metrics(&self.state, &mats, p_vapor, index));
                out.frame_times.push((index, self.state.time));
                if let Err(e) = sink.frame(index, &self.state, &mats) {
                    out.failure = Some(e);
                    break;
                }
            }
        }
        out.steps = self.state.step;
        out
    }
}

#[derive(Debug, Default)]
pub struct RunOutput {
    pub gauges: Vec<GaugeSeries>,
    pub cavitation: Vec<CavitationEntry>,
    /// `(t, min water pressure)` after every step.
    pub water_min: Vec<(f64, f64)>,
    pub frame_times: Vec<(usize, f64)>,
    pub steps: u64,
    pub failure: Option<SimError>,
}

impl RunOutput {
    /// Lowest water pressure reached for `t` in `[t0, t1]`.
    pub fn min_water_pressure_between(&self, t0: f64, t1: f64) -> Option<f64> {
        self.water_min.iter().filter(|(t, _)| *t >= t0 && *t <= t1).map(|(_, p)| *p).reduce(f64::min)
    }

    pub fn gauge(&self, id: &str) -> Option<&GaugeSeries> {
        self.gauges.iter().find(|g| g.id == id)
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub program: &'static str,
    pub version: &'static str,
    pub status: &'a str,
    pub error: Option<String>,
    pub config: &'a Config,
    pub grid: GridSummary,
    pub transwell_z: [f64; 2],
    pub transwell_radius: f64,
    pub hydrophone: Option<HydrophoneSummary>,
    pub max_snap_displacement: f64,
    pub gauges: &'a [GaugeSpec],
    pub frames: Vec<FrameSummary>,
    pub steps: u64,
    pub final_time_us: f64,
    pub cavitation_file: &'static str,
    pub water_min_file: &'static str,
}

#[derive(Debug, Serialize)]
pub struct GridSummary {
    pub n_r: usize,
    pub n_z: usize,
    pub d_r: f64,
    pub d_z: f64,
    pub z_origin: f64,
}

#[derive(Debug, Serialize)]
pub struct HydrophoneSummary {
    pub radius: f64,
    pub z: [f64; 2],
}

#[derive(Debug, Serialize)]
pub struct FrameSummary {
    pub index: usize,
    pub time_us: f64,
    pub header: String,
}

/// Write gauges, cavitation metrics, the water-minimum series and the
/// manifest. Called after success and after a numerical failure alike.
pub fn write_run_outputs(sim: &Simulation, out: &RunOutput, dir: &Path) -> Result<(), SimError> {
    for g in &out.gauges {
        write_gauges(g, &dir.join(format!("gauge_{}.csv", g.id)))?;
    }
    write_cavitation(&out.cavitation, sim.config.p_vapor, &dir.join("cavitation.csv"))?;
    write_series("t_us,min_water_p_pa", &out.water_min, &dir.join("water_min.csv"))?;

    let g = &sim.scenario.grid;
    let geo = &sim.scenario.geometry;
    let failure = out.failure.as_ref().map(|e| e.to_string());
    let manifest = Manifest {
        program: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        status: if failure.is_some() { "failed" } else { "ok" },
        error: failure,
        config: &sim.config,
        grid: GridSummary { n_r: g.n_r, n_z: g.n_z, d_r: g.d_r, d_z: g.d_z, z_origin: g.z_origin },
        transwell_z: geo.transwell_z,
        transwell_radius: geo.transwell_radius,
        hydrophone: geo.hydrophone.as_ref().map(|h| HydrophoneSummary { radius: h.radius, z: h.z }),
        max_snap_displacement: geo.max_snap_displacement,
        gauges: &sim.gauges,
        frames: out
            .frame_times
            .iter()
            .map(|(k, t)| FrameSummary { index: *k, time_us: t * 1e6, header: format!("frame_{k:04}.json") })
            .collect(),
        steps: out.steps,
        final_time_us: sim.state.time * 1e6,
        cavitation_file: "cavitation.csv",
        water_min_file: "water_min.csv",
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text).map_err(|e| SimError::io(&path, e))
}
