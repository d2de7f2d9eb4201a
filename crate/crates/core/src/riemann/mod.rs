//! Normal Riemann solvers for the Euler equations with a Tammann EOS.
//!
//! Everything here works in the frame of a single sweep direction: vectors are
//! ordered `(rho, normal momentum, transverse momentum, E)`.

mod exact;
mod hllc;

pub use exact::{exact_star, sample_fan, ExactOptions, RiemannFan, SideWave, WaveKind};
pub use hllc::hllc_fluctuations;

use crate::eos::{internal_energy_density, MaterialParams, PrimitiveState};
use crate::error::RiemannError;

pub type Vec4 = [f64; 4];

/// Sweep direction of a one-dimensional Riemann problem on the `(r, z)` grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    R,
    Z,
}

/// Primitive state projected onto a sweep direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormalState {
    pub rho: f64,
    /// velocity along the sweep
    pub un: f64,
    /// velocity across the sweep, carried passively
    pub ut: f64,
    pub p: f64,
}

impl NormalState {
    pub fn from_primitive(w: &PrimitiveState, axis: Axis) -> Self {
        match axis {
            Axis::R => Self { rho: w.rho, un: w.u_r, ut: w.u_z, p: w.p },
            Axis::Z => Self { rho: w.rho, un: w.u_z, ut: w.u_r, p: w.p },
        }
    }

    pub fn to_primitive(&self, axis: Axis) -> PrimitiveState {
        match axis {
            Axis::R => PrimitiveState { rho: self.rho, u_r: self.un, u_z: self.ut, p: self.p },
            Axis::Z => PrimitiveState { rho: self.rho, u_r: self.ut, u_z: self.un, p: self.p },
        }
    }

    /// Conserved vector in sweep ordering.
    #[inline]
    pub fn conserved(&self, m: &MaterialParams) -> Vec4 {
        let kinetic = 0.5 * self.rho * (self.un * self.un + self.ut * self.ut);
        [self.rho, self.rho * self.un, self.rho * self.ut, internal_energy_density(self.p, m) + kinetic]
    }

    /// Physical flux along the sweep.
    #[inline]
    pub fn flux(&self, m: &MaterialParams) -> Vec4 {
        let q = self.conserved(m);
        [q[1], q[1] * self.un + self.p, q[1] * self.ut, self.un * (q[3] + self.p)]
    }

    #[inline]
    pub fn sound_speed(&self, m: &MaterialParams) -> f64 {
        (m.gamma * (self.p + m.p_inf) / self.rho).sqrt()
    }
}

/// Reorders a sweep-frame vector into `(rho, mom_r, mom_z, E)`.
#[inline]
pub fn to_grid_order(v: Vec4, axis: Axis) -> Vec4 {
    match axis {
        Axis::R => v,
        Axis::Z => [v[0], v[2], v[1], v[3]],
    }
}

/// Reorders a `(rho, mom_r, mom_z, E)` vector into sweep order.
#[inline]
pub fn to_sweep_order(v: Vec4, axis: Axis) -> Vec4 {
    // the permutation is an involution
    to_grid_order(v, axis)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannInput {
    pub left: NormalState,
    pub right: NormalState,
    pub left_mat: MaterialParams,
    pub right_mat: MaterialParams,
}

impl RiemannInput {
    pub fn new(left: NormalState, left_mat: MaterialParams, right: NormalState, right_mat: MaterialParams) -> Self {
        Self { left, right, left_mat, right_mat }
    }

    pub fn same_material(left: NormalState, right: NormalState, m: MaterialParams) -> Self {
        Self::new(left, m, right, m)
    }

    pub fn is_material_interface(&self) -> bool {
        self.left_mat != self.right_mat
    }

    /// The mirror image: sides swapped, normal velocities negated.
    pub fn mirrored(&self) -> Self {
        let flip = |s: NormalState| NormalState { un: -s.un, ..s };
        Self::new(flip(self.right), self.right_mat, flip(self.left), self.left_mat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// HLLC between cells of the same material; conservative.
    SameMaterial,
    /// Exact two-material solve with the contact pinned to the edge.
    Interface,
}

/// Wave decomposition of one edge Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fluctuations {
    pub amdq: Vec4,
    pub apdq: Vec4,
    /// Left acoustic, entropy, shear, right acoustic.
    pub waves: [Vec4; 4],
    pub speeds: [f64; 4],
    pub kind: EdgeKind,
}

impl Fluctuations {
    pub fn zero(kind: EdgeKind) -> Self {
        Self { amdq: [0.0; 4], apdq: [0.0; 4], waves: [[0.0; 4]; 4], speeds: [0.0; 4], kind }
    }

    pub fn max_speed(&self) -> f64 {
        self.speeds.iter().fold(0.0f64, |a, s| a.max(s.abs()))
    }
}

/// HLLC at same-material edges, exact two-material solve at interfaces.
///
/// At an interface the contact is held at the edge: the left cell sees the
/// flux of its own material evaluated in the left star state, the right cell
/// the flux of its material in the right star state. No mass crosses the edge
/// from one material into the other.
pub fn hybrid_edge_solve(inp: &RiemannInput, opts: &ExactOptions) -> Result<Fluctuations, RiemannError> {
    if !inp.is_material_interface() {
        return hllc_fluctuations(inp);
    }
    if inp.left == inp.right {
        return Ok(Fluctuations::zero(EdgeKind::Interface));
    }
    let fan = exact_star(inp, opts)?;
    let (lm, rm) = (&inp.left_mat, &inp.right_mat);
    let star_l = NormalState { rho: fan.rho_star_left, un: fan.u_star, ut: inp.left.ut, p: fan.p_star };
    let star_r = NormalState { rho: fan.rho_star_right, un: fan.u_star, ut: inp.right.ut, p: fan.p_star };

    let f_l = inp.left.flux(lm);
    let f_sl = star_l.flux(lm);
    let f_sr = star_r.flux(rm);
    let f_r = inp.right.flux(rm);

    let q_l = inp.left.conserved(lm);
    let q_sl = star_l.conserved(lm);
    let q_sr = star_r.conserved(rm);
    let q_r = inp.right.conserved(rm);

    let mut out = Fluctuations::zero(EdgeKind::Interface);
    for k in 0..4 {
        out.amdq[k] = f_sl[k] - f_l[k];
        out.apdq[k] = f_r[k] - f_sr[k];
        out.waves[0][k] = q_sl[k] - q_l[k];
        out.waves[3][k] = q_r[k] - q_sr[k];
    }
    out.speeds = [fan.left.mean_speed(), 0.0, 0.0, fan.right.mean_speed()];
    Ok(out)
}
