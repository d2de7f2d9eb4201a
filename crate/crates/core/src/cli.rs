//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification threshold missed, 2 configuration
//! error, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Config;
use crate::error::{ConfigError, SimError};
use crate::run::{write_run_outputs, DiskFrames, Simulation};
use crate::verify::{converge, verify1d, L1_TOLERANCE, TRANSMITTED_REFERENCE_PSI, TRANSMITTED_TOLERANCE};

pub const EXIT_THRESHOLD: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "shockcell", version, about = "Shock propagation through a water-filled transwell in a shock tube")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the axisymmetric transwell scenario.
    Run(RunArgs),
    /// Compare the 1D air|water|air column against the exact solution.
    Verify1d(VerifyArgs),
    /// Convergence study of the 1D column over several resolutions.
    Converge(ConvergeArgs),
    /// Parse and validate a configuration file.
    Validate { config: PathBuf },
}

#[derive(Args, Debug)]
pub struct Common {
    /// Output directory (overrides `output_dir` in the config).
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, env = "SHOCKCELL_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// JSON configuration; defaults apply when omitted.
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub with_hydrophone: bool,
    /// Grid as NRxNZ, e.g. 200x400.
    #[arg(long, value_parser = parse_resolution)]
    pub resolution: Option<(usize, usize)>,
    #[arg(long)]
    pub peak_psi: Option<f64>,
    #[arg(long)]
    pub t_end_us: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 800)]
    pub cells: usize,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', default_values_t = vec![200, 400, 800])]
    pub cells: Vec<usize>,
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NRxNZ, got {s:?}"))?;
    let n_r = a.trim().parse().map_err(|_| format!("bad radial cell count {a:?}"))?;
    let n_z = b.trim().parse().map_err(|_| format!("bad axial cell count {b:?}"))?;
    Ok((n_r, n_z))
}

fn load(path: Option<&Path>) -> Result<Config, ConfigError> {
    match path {
        Some(p) => Config::from_path(p),
        None => Ok(Config::default()),
    }
}

fn apply_common(cfg: &mut Config, c: &Common) {
    if let Some(t) = c.threads {
        cfg.numerics.threads = Some(t);
    }
    if let Some(d) = &c.output_dir {
        cfg.output_dir = Some(d.to_string_lossy().into_owned());
    }
}

fn output_dir(cfg: &Config, default: &str) -> Result<PathBuf, SimError> {
    let dir = PathBuf::from(cfg.output_dir.clone().unwrap_or_else(|| default.to_string()));
    std::fs::create_dir_all(&dir).map_err(|e| SimError::io(&dir, e))?;
    Ok(dir)
}

fn exit_for(e: &SimError) -> ExitCode {
    match e {
        SimError::Config(_) => ExitCode::from(EXIT_CONFIG),
        // unwritable output is reported like a bad configuration
        SimError::Io { .. } => ExitCode::from(EXIT_CONFIG),
        _ => ExitCode::from(EXIT_NUMERICAL),
    }
}

fn fail(e: SimError) -> ExitCode {
    eprintln!("error: {e}");
    exit_for(&e)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), SimError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    std::fs::write(path, text).map_err(|e| SimError::io(path, e))
}

fn cmd_run(a: &RunArgs) -> ExitCode {
    let mut cfg = match load(a.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return fail(e.into()),
    };
    apply_common(&mut cfg, &a.common);
    if a.with_hydrophone {
        cfg.hydrophone.enabled = true;
    }
    if let Some((n_r, n_z)) = a.resolution {
        cfg.grid.n_r = n_r;
        cfg.grid.n_z = n_z;
    }
    if let Some(p) = a.peak_psi {
        cfg.shock.peak_psi = p;
    }
    if let Some(t) = a.t_end_us {
        cfg.t_end_us = t;
        cfg.frame_times_us.retain(|f| *f <= t);
    }
    let mut sim = match Simulation::new(&cfg) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let dir = match output_dir(&cfg, "shockcell_run") {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    let mut sink = DiskFrames { dir: dir.clone() };
    let out = sim.run(&mut sink);
    if out.failure.is_some() {
        // the state is the last stable one
        let mats = sim.stepper.mats;
        if let Err(e) = crate::observables::write_frame(&sim.state, &mats, &dir, 0)
            .and_then(|_| crate::observables::write_axis_slice(&sim.state, &mats, &dir, 0))
        {
            eprintln!("error: could not flush last stable frame: {e}");
        }
    }
    if let Err(e) = write_run_outputs(&sim, &out, &dir) {
        return fail(e);
    }
    match out.failure {
        Some(e) => {
            eprintln!("error: {e} (last stable state written as frame_0000)");
            exit_for(&e)
        }
        None => {
            println!(
                "{} steps to t = {:.3} us; {} frames, {} gauges written to {}",
                out.steps,
                sim.state.time * 1e6,
                out.frame_times.len(),
                out.gauges.len(),
                dir.display()
            );
            ExitCode::SUCCESS
        }
    }
}

fn cmd_verify1d(a: &VerifyArgs) -> ExitCode {
    if a.cells < 100 {
        return fail(ConfigError::Invalid(format!("--cells must be at least 100, got {}", a.cells)).into());
    }
    let mut cfg = match load(a.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return fail(e.into()),
    };
    apply_common(&mut cfg, &a.common);
    let result = (|| {
        let dir = output_dir(&cfg, "shockcell_verify1d")?;
        let rep = verify1d(&cfg, a.cells)?;
        for (name, prof) in ["a", "a_plus_6us", "b", "b_plus_6us"].iter().zip(&rep.profiles) {
            prof.write_csv(&dir.join(format!("profile_{name}.csv")))?;
        }
        let summary = serde_json::json!({
            "report": &rep,
            "l1_tolerance_relative": L1_TOLERANCE,
            "transmitted_reference_psi": TRANSMITTED_REFERENCE_PSI,
            "transmitted_tolerance_relative": TRANSMITTED_TOLERANCE,
            "l1_within_tolerance": rep.l1_within_tolerance(),
            "transmitted_within_tolerance": rep.transmitted_within_tolerance(),
            "config": &cfg,
        });
        write_json(&dir.join("verify1d.json"), &summary)?;
        Ok::<_, SimError>(rep)
    })();
    match result {
        Err(e) => fail(e),
        Ok(rep) => {
            println!(
                "N={} L1(A+6us)={:.3e} L1(B+6us)={:.3e} (relative to jump {:.4} kg/m^3, tolerance {}); \
                 transmitted {:.5} psi (exact {:.5}, reference {} +-{}%)",
                rep.n_z,
                rep.relative_l1_a,
                rep.relative_l1_b,
                rep.jump_scale,
                L1_TOLERANCE,
                rep.transmitted_psi_numeric,
                rep.transmitted_psi_exact,
                TRANSMITTED_REFERENCE_PSI,
                TRANSMITTED_TOLERANCE * 100.0
            );
            if rep.l1_within_tolerance() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_THRESHOLD)
            }
        }
    }
}

fn cmd_converge(a: &ConvergeArgs) -> ExitCode {
    if a.cells.len() < 2 {
        return fail(ConfigError::Invalid("--cells needs at least two resolutions".into()).into());
    }
    if a.cells.windows(2).any(|w| w[1] <= w[0]) || a.cells[0] < 10 {
        return fail(ConfigError::Invalid("--cells must be increasing and at least 10".into()).into());
    }
    let mut cfg = match load(a.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return fail(e.into()),
    };
    apply_common(&mut cfg, &a.common);
    let result = (|| {
        let dir = output_dir(&cfg, "shockcell_converge")?;
        let rep = converge(&cfg, &a.cells)?;
        for (n, prof) in a.cells.iter().zip(&rep.profiles) {
            prof.write_csv(&dir.join(format!("profile_{n}.csv")))?;
        }
        let summary = serde_json::json!({
            "report": &rep,
            "strictly_decreasing": rep.strictly_decreasing(),
            "smooth_distance_m": crate::verify::SMOOTH_DISTANCE,
            "config": &cfg,
        });
        write_json(&dir.join("converge.json"), &summary)?;
        Ok::<_, SimError>(rep)
    })();
    match result {
        Err(e) => fail(e),
        Ok(rep) => {
            for (k, n) in rep.resolutions.iter().enumerate() {
                println!(
                    "N={n:5} L1 rho {:.4e}  L1 p {:.4e} Pa  smooth p {:.4e} Pa",
                    rep.l1_density[k], rep.l1_pressure[k], rep.smooth_pressure[k]
                );
            }
            println!("smooth-region pressure orders {:?}", rep.smooth_pressure_orders);
            if rep.strictly_decreasing() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_THRESHOLD)
            }
        }
    }
}

fn cmd_validate(path: &Path) -> ExitCode {
    let res = Config::from_path(path).map_err(SimError::from).and_then(|cfg| {
        let sc = crate::domain::build_scenario(&cfg)?;
        crate::observables::resolve_gauges(&cfg.resolved_gauges(), &sc.grid, &sc.map)?;
        Ok(sc)
    });
    match res {
        Ok(sc) => {
            println!(
                "ok: {}x{} grid, transwell z [{}, {}] m, r < {} m, snapping <= {:.3e} m",
                sc.grid.n_r,
                sc.grid.n_z,
                sc.geometry.transwell_z[0],
                sc.geometry.transwell_z[1],
                sc.geometry.transwell_radius,
                sc.geometry.max_snap_displacement
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

pub fn run(cli: Cli) -> ExitCode {
    match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Verify1d(a) => cmd_verify1d(a),
        Command::Converge(a) => cmd_converge(a),
        Command::Validate { config } => cmd_validate(config),
    }
}
