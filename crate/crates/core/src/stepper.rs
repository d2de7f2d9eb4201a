//! Unsplit high-resolution wave-propagation update on the `(r, z)` grid.
//!
//! One step applies, from the same old state, an r-sweep and a z-sweep of
//! hybrid normal Riemann solves. Each sweep contributes first-order
//! fluctuations, limited second-order correction fluxes along its own
//! direction, and acoustic transverse contributions to the correction fluxes of
//! the other direction. The geometric source terms follow as a fractional step.

use std::sync::Arc;

use rayon::prelude::*;

use crate::axisource::{source_step, SourceForm};
use crate::config::Config;
use crate::domain::{GridSpec, MaterialMap, ShockProfile};
use crate::eos::{energy_from_primitive, ConservedState, Material, MaterialParams, PrimitiveState};
use crate::error::{SimError, StateError};
use crate::riemann::{
    hybrid_edge_solve, to_grid_order, Axis, EdgeKind, ExactOptions, Fluctuations, NormalState, RiemannInput, Vec4,
};
use crate::transverse::{transverse_split, TransverseInput};

/// Number of ghost layers on every side.
pub const GHOSTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Mirror state with the normal momentum negated.
    Reflect,
    /// Zero-order extrapolation.
    Outflow,
    /// Dirichlet state from the shock profile (z-min only).
    Inflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Boundaries {
    pub r_lo: BoundaryKind,
    pub r_hi: BoundaryKind,
    pub z_lo: BoundaryKind,
    pub z_hi: BoundaryKind,
}

impl Boundaries {
    /// Shock tube: inflow at z-min, symmetry axis at r = 0, open elsewhere.
    pub const SHOCK_TUBE: Boundaries = Boundaries {
        r_lo: BoundaryKind::Reflect,
        r_hi: BoundaryKind::Outflow,
        z_lo: BoundaryKind::Inflow,
        z_hi: BoundaryKind::Outflow,
    };

    pub const CLOSED: Boundaries = Boundaries {
        r_lo: BoundaryKind::Reflect,
        r_hi: BoundaryKind::Reflect,
        z_lo: BoundaryKind::Reflect,
        z_hi: BoundaryKind::Reflect,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    pub limiter: bool,
    pub transverse: bool,
    pub source: bool,
    pub source_form: SourceForm,
    /// Half source step, homogeneous step, half source step.
    pub strang: bool,
    pub exact: ExactOptions,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            limiter: true,
            transverse: true,
            source: true,
            source_form: SourceForm::Conservative,
            strang: false,
            exact: ExactOptions::default(),
        }
    }
}

impl StepOptions {
    pub fn from_config(cfg: &Config) -> Self {
        let n = &cfg.numerics;
        Self {
            limiter: n.limiter,
            transverse: n.transverse,
            source: n.source,
            source_form: n.source_form,
            strang: n.strang,
            exact: ExactOptions { tol: n.exact_tol, max_iter: n.exact_max_iter },
        }
    }

    /// Homogeneous planar update only; used by the 1D verification runs.
    pub fn one_dimensional() -> Self {
        Self { transverse: false, source: false, ..Self::default() }
    }
}

/// Conserved field plus clock. Owned exclusively by the stepping loop.
#[derive(Debug, Clone)]
pub struct SimulationState {
    pub grid: GridSpec,
    pub materials: Arc<MaterialMap>,
    /// Interior cells, radial index fastest.
    pub q: Vec<ConservedState>,
    pub time: f64,
    pub step: u64,
}

impl SimulationState {
    /// Every cell at rest at pressure `p` with its material's reference density.
    pub fn quiescent(
        grid: GridSpec,
        map: Arc<MaterialMap>,
        mats: &[MaterialParams; 3],
        p: f64,
    ) -> Result<Self, StateError> {
        Self::from_fn(grid, map, mats, |_, _, m| m.at_rest(p))
    }

    pub fn from_fn(
        grid: GridSpec,
        map: Arc<MaterialMap>,
        mats: &[MaterialParams; 3],
        f: impl Fn(usize, usize, &MaterialParams) -> PrimitiveState,
    ) -> Result<Self, StateError> {
        let mut q = Vec::with_capacity(grid.cells());
        for j in 0..grid.n_z {
            for i in 0..grid.n_r {
                let m = &mats[map.get(i, j).index()];
                q.push(energy_from_primitive(&f(i, j, m), m)?);
            }
        }
        Ok(Self { grid, materials: map, q, time: 0.0, step: 0 })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &ConservedState {
        &self.q[self.grid.index(i, j)]
    }

    pub fn material(&self, i: usize, j: usize) -> Material {
        self.materials.get(i, j)
    }

    pub fn pressure(&self, i: usize, j: usize, mats: &[MaterialParams; 3]) -> f64 {
        crate::eos::raw_pressure(self.at(i, j), &mats[self.material(i, j).index()])
    }

    /// Sum of each conserved component over the grid (planar quadrature).
    pub fn totals(&self) -> Vec4 {
        let mut t = [0.0; 4];
        for c in &self.q {
            t[0] += c.rho;
            t[1] += c.mom_r;
            t[2] += c.mom_z;
            t[3] += c.energy;
        }
        t
    }
}

/// Primitive view of one padded cell.
#[derive(Debug, Clone, Copy, Default)]
struct Cell {
    rho: f64,
    u_r: f64,
    u_z: f64,
    p: f64,
    c: f64,
    mat: u8,
}

impl Cell {
    #[inline]
    fn normal(&self, axis: Axis) -> NormalState {
        match axis {
            Axis::R => NormalState { rho: self.rho, un: self.u_r, ut: self.u_z, p: self.p },
            Axis::Z => NormalState { rho: self.rho, un: self.u_z, ut: self.u_r, p: self.p },
        }
    }
}

/// Output of one sweep line (a row for the r-sweep, a column for the z-sweep).
struct LineOut {
    /// First-order increment for each interior cell on the line.
    delta: Vec<Vec4>,
    /// Limited correction flux at each interior edge, grid ordering.
    corr: Vec<Vec4>,
    /// Transverse pieces leaving each interior cell upward / downward, grid ordering.
    up: Vec<Vec4>,
    down: Vec<Vec4>,
}

/// Monotonized-central limiter.
#[inline]
fn mc_limiter(theta: f64) -> f64 {
    0.0f64.max((0.5 * (1.0 + theta)).min(2.0).min(2.0 * theta))
}

/// Dot product with per-component weights. The limiter measures waves in
/// units of rho, rho*c and rho*c^2 so no one component swamps the others.
#[inline]
fn dot_scaled(a: &Vec4, b: &Vec4, w: &Vec4) -> f64 {
    w[0] * a[0] * b[0] + w[1] * a[1] * b[1] + w[2] * a[2] * b[2] + w[3] * a[3] * b[3]
}

/// Time-stepping engine. Immutable during a run; shareable across threads.
pub struct Stepper {
    pub grid: GridSpec,
    pub mats: [MaterialParams; 3],
    pub boundaries: Boundaries,
    pub opts: StepOptions,
    pub profile: Option<ShockProfile>,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl Stepper {
    pub fn new(grid: GridSpec, mats: [MaterialParams; 3], boundaries: Boundaries, opts: StepOptions) -> Self {
        Self { grid, mats, boundaries, opts, profile: None, pool: None }
    }

    pub fn with_profile(mut self, profile: ShockProfile) -> Self {
        self.profile = Some(profile);
        self
    }

    /// Run sweeps on a dedicated pool with `threads` workers. Results do not
    /// depend on the thread count.
    pub fn with_threads(mut self, threads: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().expect("thread pool");
        self.pool = Some(Arc::new(pool));
        self
    }

    fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }

    fn material(&self, m: Material) -> &MaterialParams {
        &self.mats[m.index()]
    }

    /// `dt = cfl * min(d_r, d_z) / max(|u| + c)` over the interior.
    pub fn stable_dt(&self, s: &SimulationState, cfl: f64) -> Result<f64, SimError> {
        let g = &self.grid;
        let speeds: Result<Vec<f64>, SimError> = self.install(|| {
            (0..g.n_z)
                .into_par_iter()
                .map(|j| {
                    let mut smax = 0.0f64;
                    for i in 0..g.n_r {
                        let m = self.material(s.material(i, j));
                        let w = crate::eos::primitive_from_conserved(s.at(i, j), m)
                            .map_err(|e| SimError::Positivity { i, j, step: s.step, source: e })?;
                        let c = crate::eos::raw_sound_speed(w.rho, w.p, m);
                        smax = smax.max((w.u_r * w.u_r + w.u_z * w.u_z).sqrt() + c);
                    }
                    Ok(smax)
                })
                .collect()
        });
        let smax = speeds?.into_iter().fold(0.0f64, f64::max);
        Ok(cfl * g.d_r.min(g.d_z) / smax)
    }

    /// Padded primitive field with ghost cells filled for time `t`.
    fn padded(&self, s: &SimulationState) -> Result<(Vec<Cell>, usize, usize), SimError> {
        let g = &self.grid;
        let w = g.n_r + 2 * GHOSTS;
        let h = g.n_z + 2 * GHOSTS;
        let mut cells = vec![Cell::default(); w * h];

        for j in 0..g.n_z {
            for i in 0..g.n_r {
                let mat = s.material(i, j);
                let m = self.material(mat);
                let q = s.at(i, j);
                let p = crate::eos::pressure_from_conserved(q, m).map_err(|e| SimError::Positivity {
                    i,
                    j,
                    step: s.step,
                    source: e,
                })?;
                cells[(j + GHOSTS) * w + i + GHOSTS] = Cell {
                    rho: q.rho,
                    u_r: q.mom_r / q.rho,
                    u_z: q.mom_z / q.rho,
                    p,
                    c: crate::eos::raw_sound_speed(q.rho, p, m),
                    mat: mat.index() as u8,
                };
            }
        }

        // z ghosts on interior columns
        let inflow = self.profile.map(|prof| {
            let air = self.material(Material::Air);
            let st = prof.inflow_state_at(s.time, air);
            Cell {
                rho: st.rho,
                u_r: st.u_r,
                u_z: st.u_z,
                p: st.p,
                c: crate::eos::raw_sound_speed(st.rho, st.p, air),
                mat: Material::Air.index() as u8,
            }
        });
        for i in GHOSTS..GHOSTS + g.n_r {
            for k in 0..GHOSTS {
                // below: ghost row GHOSTS-1-k mirrors interior row GHOSTS+k
                let lo_ghost = (GHOSTS - 1 - k) * w + i;
                let lo_src = match self.boundaries.z_lo {
                    BoundaryKind::Reflect => (GHOSTS + k) * w + i,
                    _ => GHOSTS * w + i,
                };
                cells[lo_ghost] = match self.boundaries.z_lo {
                    BoundaryKind::Inflow => inflow.unwrap_or(cells[lo_src]),
                    BoundaryKind::Reflect => Cell { u_z: -cells[lo_src].u_z, ..cells[lo_src] },
                    BoundaryKind::Outflow => cells[lo_src],
                };
                let hi_ghost = (GHOSTS + g.n_z + k) * w + i;
                let hi_src = match self.boundaries.z_hi {
                    BoundaryKind::Reflect => (GHOSTS + g.n_z - 1 - k) * w + i,
                    _ => (GHOSTS + g.n_z - 1) * w + i,
                };
                cells[hi_ghost] = match self.boundaries.z_hi {
                    BoundaryKind::Inflow => inflow.unwrap_or(cells[hi_src]),
                    BoundaryKind::Reflect => Cell { u_z: -cells[hi_src].u_z, ..cells[hi_src] },
                    BoundaryKind::Outflow => cells[hi_src],
                };
            }
        }
        // r ghosts on every row, corners included
        for jj in 0..h {
            let row = jj * w;
            for k in 0..GHOSTS {
                let lo_ghost = row + GHOSTS - 1 - k;
                let lo_src = match self.boundaries.r_lo {
                    BoundaryKind::Reflect => row + GHOSTS + k,
                    _ => row + GHOSTS,
                };
                cells[lo_ghost] = match self.boundaries.r_lo {
                    BoundaryKind::Reflect => Cell { u_r: -cells[lo_src].u_r, ..cells[lo_src] },
                    _ => cells[lo_src],
                };
                let hi_ghost = row + GHOSTS + g.n_r + k;
                let hi_src = match self.boundaries.r_hi {
                    BoundaryKind::Reflect => row + GHOSTS + g.n_r - 1 - k,
                    _ => row + GHOSTS + g.n_r - 1,
                };
                cells[hi_ghost] = match self.boundaries.r_hi {
                    BoundaryKind::Reflect => Cell { u_r: -cells[hi_src].u_r, ..cells[hi_src] },
                    _ => cells[hi_src],
                };
            }
        }
        Ok((cells, w, h))
    }

    /// Sweep one line of padded cells. `at(k)` returns the padded cell at
    /// position `k` along the line, `side(k, dir)` its transverse neighbour.
    #[allow(clippy::too_many_arguments)]
    fn sweep_line(
        &self,
        axis: Axis,
        n: usize,
        dtdx: f64,
        at: impl Fn(usize) -> Cell,
        below: impl Fn(usize) -> Cell,
        above: impl Fn(usize) -> Cell,
    ) -> Result<LineOut, crate::error::RiemannError> {
        // padded positions 0..n+4; edge e (1..n+4) lies between k = e-1 and e
        let np = n + 2 * GHOSTS;
        let mut fl: Vec<Fluctuations> = Vec::with_capacity(np);
        fl.push(Fluctuations::zero(EdgeKind::SameMaterial));
        for e in 1..np {
            let a = at(e - 1);
            let b = at(e);
            let inp =
                RiemannInput::new(a.normal(axis), self.mats[a.mat as usize], b.normal(axis), self.mats[b.mat as usize]);
            fl.push(hybrid_edge_solve(&inp, &self.opts.exact)?);
        }

        let mut out = LineOut {
            delta: vec![[0.0; 4]; n],
            corr: vec![[0.0; 4]; n + 1],
            up: vec![[0.0; 4]; n],
            down: vec![[0.0; 4]; n],
        };
        for i in 0..n {
            // interior cell i sits at padded k = i + GHOSTS, between edges k and k+1
            let k = i + GHOSTS;
            let ap = &fl[k].apdq;
            let am = &fl[k + 1].amdq;
            let d = [ap[0] + am[0], ap[1] + am[1], ap[2] + am[2], ap[3] + am[3]];
            out.delta[i] = to_grid_order([-dtdx * d[0], -dtdx * d[1], -dtdx * d[2], -dtdx * d[3]], axis);
        }

        if self.opts.limiter {
            for i in 0..=n {
                let e = i + GHOSTS;
                let f = &fl[e];
                if f.kind == EdgeKind::Interface {
                    continue;
                }
                let wt = {
                    let (a, b) = (at(e - 1), at(e));
                    let rho = 0.5 * (a.rho + b.rho);
                    let z = rho * 0.5 * (a.c + b.c);
                    let zc = z * 0.5 * (a.c + b.c);
                    [1.0 / (rho * rho), 1.0 / (z * z), 1.0 / (z * z), 1.0 / (zc * zc)]
                };
                let mut c = [0.0; 4];
                for p in 0..4 {
                    let s = f.speeds[p];
                    let wv = &f.waves[p];
                    let norm2 = dot_scaled(wv, wv, &wt);
                    if norm2 == 0.0 || s == 0.0 {
                        continue;
                    }
                    let upwind = if s > 0.0 { &fl[e - 1].waves[p] } else { &fl[e + 1].waves[p] };
                    let phi = mc_limiter(dot_scaled(upwind, wv, &wt) / norm2);
                    let coef = 0.5 * s.abs() * (1.0 - dtdx * s.abs()) * phi;
                    for k in 0..4 {
                        c[k] += coef * wv[k];
                    }
                }
                out.corr[i] = to_grid_order(c, axis);
            }
        }

        if self.opts.transverse {
            for i in 0..n {
                let k = i + GHOSTS;
                let mid = at(k).c;
                let (lo, hi) = (below(k).c, above(k).c);
                let mut up = [0.0; 4];
                let mut down = [0.0; 4];
                for fluct in [&fl[k].apdq, &fl[k + 1].amdq] {
                    let sp = transverse_split(&TransverseInput { fluct: *fluct, c_below: lo, c_mid: mid, c_above: hi });
                    for q in 0..4 {
                        up[q] += sp.up[q];
                        down[q] += sp.down[q];
                    }
                }
                // the split is in (rho, n, t, E) of this sweep; the transverse
                // momentum is the other sweep's normal momentum
                out.up[i] = to_grid_order(up, axis);
                out.down[i] = to_grid_order(down, axis);
            }
        }
        Ok(out)
    }

    fn homogeneous(&self, s: &SimulationState, dt: f64) -> Result<Vec<ConservedState>, SimError> {
        let g = self.grid;
        let (cells, w, h) = self.padded(s)?;
        let (nr, nz) = (g.n_r, g.n_z);
        let step = s.step;
        let dtdr = dt / g.d_r;
        let dtdz = dt / g.d_z;
        let cells = &cells;

        // r-sweep over padded rows GHOSTS-1 ..= GHOSTS+nz (j = -1 ..= nz)
        let rows: Result<Vec<LineOut>, _> = self.install(|| {
            (GHOSTS - 1..GHOSTS + nz + 1)
                .into_par_iter()
                .map(|jj| {
                    self.sweep_line(
                        Axis::R,
                        nr,
                        dtdr,
                        |k| cells[jj * w + k],
                        |k| cells[(jj - 1) * w + k],
                        |k| cells[(jj + 1) * w + k],
                    )
                })
                .collect()
        });
        let rows = rows.map_err(|e| SimError::Riemann { step, source: e })?;

        // z-sweep over padded columns (i = -1 ..= nr)
        let cols: Result<Vec<LineOut>, _> = self.install(|| {
            (GHOSTS - 1..GHOSTS + nr + 1)
                .into_par_iter()
                .map(|ii| {
                    self.sweep_line(
                        Axis::Z,
                        nz,
                        dtdz,
                        |k| cells[k * w + ii],
                        |k| cells[k * w + ii - 1],
                        |k| cells[k * w + ii + 1],
                    )
                })
                .collect()
        });
        let cols = cols.map_err(|e| SimError::Riemann { step, source: e })?;
        debug_assert_eq!(h, nz + 2 * GHOSTS);

        // rows[j + 1] is row j; cols[i + 1] is column i
        let half_r = 0.5 * dtdr;
        let half_z = 0.5 * dtdz;
        let (rows, cols) = (&rows, &cols);
        let out: Vec<ConservedState> = self.install(|| {
            (0..nz)
                .into_par_iter()
                .flat_map_iter(|j| {
                    let row = &rows[j + 1];
                    let row_below = &rows[j];
                    let row_above = &rows[j + 2];
                    (0..nr).map(move |i| {
                        let col = &cols[i + 1];
                        let col_left = &cols[i];
                        let col_right = &cols[i + 2];
                        let q = s.at(i, j).to_array();

                        // r-edge correction fluxes at i-1/2 and i+1/2, with
                        // transverse pieces from the z-sweep
                        let f_lo = {
                            let mut f = row.corr[i];
                            for k in 0..4 {
                                f[k] -= half_z * (col_left.up[j][k] + col.down[j][k]);
                            }
                            f
                        };
                        let f_hi = {
                            let mut f = row.corr[i + 1];
                            for k in 0..4 {
                                f[k] -= half_z * (col.up[j][k] + col_right.down[j][k]);
                            }
                            f
                        };
                        let g_lo = {
                            let mut f = col.corr[j];
                            for k in 0..4 {
                                f[k] -= half_r * (row_below.up[i][k] + row.down[i][k]);
                            }
                            f
                        };
                        let g_hi = {
                            let mut f = col.corr[j + 1];
                            for k in 0..4 {
                                f[k] -= half_r * (row.up[i][k] + row_above.down[i][k]);
                            }
                            f
                        };
                        let mut nq = [0.0; 4];
                        for k in 0..4 {
                            nq[k] = q[k] + row.delta[i][k] + col.delta[j][k]
                                - dtdr * (f_hi[k] - f_lo[k])
                                - dtdz * (g_hi[k] - g_lo[k]);
                        }
                        ConservedState::from_array(nq)
                    })
                })
                .collect()
        });
        Ok(out)
    }

    fn apply_source(&self, q: &mut [ConservedState], s: &SimulationState, dt: f64) -> Result<(), SimError> {
        let g = self.grid;
        let step = s.step;
        let map = &s.materials;
        self.install(|| {
            q.par_chunks_mut(g.n_r).enumerate().try_for_each(|(j, row)| {
                for (i, c) in row.iter_mut().enumerate() {
                    let m = &self.mats[map.get(i, j).index()];
                    *c = source_step(self.opts.source_form, c, m, g.r_center(i), dt)
                        .map_err(|e| SimError::Positivity { i, j, step, source: e })?;
                }
                Ok(())
            })
        })
    }

    fn check_admissible(&self, s: &SimulationState) -> Result<(), SimError> {
        let g = self.grid;
        for j in 0..g.n_z {
            for i in 0..g.n_r {
                let m = self.material(s.material(i, j));
                crate::eos::pressure_from_conserved(s.at(i, j), m).map_err(|e| SimError::Positivity {
                    i,
                    j,
                    step: s.step,
                    source: e,
                })?;
            }
        }
        Ok(())
    }

    /// One full step of size `dt`. On error the state is left untouched.
    pub fn advance(&self, s: &mut SimulationState, dt: f64) -> Result<(), SimError> {
        let mut work;
        let base: &SimulationState = if self.opts.source && self.opts.strang {
            work = s.clone();
            let mut q = std::mem::take(&mut work.q);
            self.apply_source(&mut q, s, 0.5 * dt)?;
            work.q = q;
            &work
        } else {
            s
        };
        let mut q = self.homogeneous(base, dt)?;
        if self.opts.source {
            let h = if self.opts.strang { 0.5 * dt } else { dt };
            self.apply_source(&mut q, s, h)?;
        }
        let next = SimulationState { q, time: s.time + dt, step: s.step + 1, ..s.clone_header() };
        self.check_admissible(&next)?;
        s.q = next.q;
        s.time = next.time;
        s.step = next.step;
        Ok(())
    }

    /// Step until `s.time == t_target` exactly, calling `on_step` after every
    /// step. The last two steps are balanced so no sliver step is taken.
    pub fn advance_to(
        &self,
        s: &mut SimulationState,
        t_target: f64,
        cfl: f64,
        mut on_step: impl FnMut(&SimulationState),
    ) -> Result<(), SimError> {
        while s.time < t_target {
            let remain = t_target - s.time;
            let stable = self.stable_dt(s, cfl)?;
            let last = stable >= remain;
            let dt = if last {
                remain
            } else if 2.0 * stable > remain {
                0.5 * remain
            } else {
                stable
            };
            self.advance(s, dt)?;
            if last {
                s.time = t_target;
            }
            on_step(s);
        }
        Ok(())
    }
}

impl SimulationState {
    fn clone_header(&self) -> SimulationState {
        SimulationState {
            grid: self.grid,
            materials: Arc::clone(&self.materials),
            q: Vec::new(),
            time: self.time,
            step: self.step,
        }
    }
}
