//! Independent oracles shared by the integration and acceptance tests. Nothing
//! here calls into the solver code it is used to check.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use shockcell::eos::{ConservedState, MaterialParams};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

/// Log-uniform sample in `[lo, hi)`.
pub fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn pressure(q: [f64; 4], m: &MaterialParams) -> f64 {
    let ke = 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0];
    (m.gamma - 1.0) * (q[3] - ke) - m.gamma * m.p_inf
}

fn source_rhs(q: [f64; 4], m: &MaterialParams, r: f64) -> [f64; 4] {
    let u_r = q[1] / q[0];
    let p = pressure(q, m);
    [-q[1] / r, -q[1] * u_r / r, -q[2] * u_r / r, -(q[3] + p) * u_r / r]
}

/// Classical RK4 on the geometric source ODE with `n` substeps.
pub fn rk4_source(q: &ConservedState, m: &MaterialParams, r: f64, dt: f64, n: usize) -> ConservedState {
    let mut y = [q.rho, q.mom_r, q.mom_z, q.energy];
    let h = dt / n as f64;
    let axpy = |y: [f64; 4], k: [f64; 4], a: f64| [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2], y[3] + a * k[3]];
    for _ in 0..n {
        let k1 = source_rhs(y, m, r);
        let k2 = source_rhs(axpy(y, k1, 0.5 * h), m, r);
        let k3 = source_rhs(axpy(y, k2, 0.5 * h), m, r);
        let k4 = source_rhs(axpy(y, k3, h), m, r);
        for i in 0..4 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    ConservedState { rho: y[0], mom_r: y[1], mom_z: y[2], energy: y[3] }
}

/// RK4 on the primitive pressure equation that treats the kinetic energy
/// density as a constant: `dp/dt = -(u_r/r) (gamma (p + p_inf) + (gamma - 1) rho |u|^2 / 2)`.
pub fn rk4_primitive_source(q: &ConservedState, m: &MaterialParams, r: f64, dt: f64, n: usize) -> ConservedState {
    let (u_r, u_z) = (q.mom_r / q.rho, q.mom_z / q.rho);
    let s2 = u_r * u_r + u_z * u_z;
    let k = u_r / r;
    let rhs = |y: [f64; 2]| [-k * y[0], -k * (m.gamma * (y[1] + m.p_inf) + 0.5 * (m.gamma - 1.0) * y[0] * s2)];
    let mut y = [q.rho, pressure([q.rho, q.mom_r, q.mom_z, q.energy], m)];
    let h = dt / n as f64;
    let step = |y: [f64; 2], d: [f64; 2], a: f64| [y[0] + a * d[0], y[1] + a * d[1]];
    for _ in 0..n {
        let k1 = rhs(y);
        let k2 = rhs(step(y, k1, 0.5 * h));
        let k3 = rhs(step(y, k2, 0.5 * h));
        let k4 = rhs(step(y, k3, h));
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    let [rho, p] = y;
    ConservedState {
        rho,
        mom_r: rho * u_r,
        mom_z: rho * u_z,
        energy: (p + m.gamma * m.p_inf) / (m.gamma - 1.0) + 0.5 * rho * s2,
    }
}

pub fn stiffened_pressure(q: &ConservedState, m: &MaterialParams) -> f64 {
    pressure([q.rho, q.mom_r, q.mom_z, q.energy], m) + m.p_inf
}

/// One side of a 1D Riemann problem for the bisection oracle.
#[derive(Clone, Copy, Debug)]
pub struct OracleSide {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    pub gamma: f64,
    pub p_inf: f64,
}

impl OracleSide {
    /// Velocity change across the wave connecting this side to pressure `p`.
    pub fn f(&self, p: f64) -> f64 {
        let g = self.gamma;
        let big = self.p + self.p_inf;
        let big_star = p + self.p_inf;
        if p > self.p {
            // Rankine-Hugoniot: mass flux through the shock.
            let a = 2.0 / ((g + 1.0) * self.rho);
            let b = (g - 1.0) / (g + 1.0) * big;
            (p - self.p) * (a / (big_star + b)).sqrt()
        } else {
            let c = (g * big / self.rho).sqrt();
            2.0 * c / (g - 1.0) * ((big_star / big).powf((g - 1.0) / (2.0 * g)) - 1.0)
        }
    }
}

/// Whether the two sides can be joined without opening a vacuum (or, for
/// liquids, exceeding the tension limit `p = -p_inf`).
pub fn has_solution(l: &OracleSide, r: &OracleSide) -> bool {
    let p_min = -l.p_inf.min(r.p_inf);
    l.f(p_min) + r.f(p_min) + (r.u - l.u) < 0.0
}

/// Star pressure by plain bisection on `f_L + f_R + du = 0`.
pub fn bisect_star(l: &OracleSide, r: &OracleSide) -> f64 {
    let g = |p: f64| l.f(p) + r.f(p) + (r.u - l.u);
    // lowest admissible pressure: vacuum on the softer side
    let mut lo = -l.p_inf.min(r.p_inf);
    let mut hi = (l.p + l.p_inf).max(r.p + r.p_inf);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(left, right)` sides of a random two-material problem with a pressure
/// ratio up to `max_ratio`, redrawn until it has a solution.
pub fn random_problem(
    rng: &mut StdRng,
    mats: &[MaterialParams],
    max_ratio: f64,
) -> (OracleSide, MaterialParams, OracleSide, MaterialParams) {
    loop {
        let pr = random_problem_any(rng, mats, max_ratio);
        if has_solution(&pr.0, &pr.2) {
            return pr;
        }
    }
}

fn random_problem_any(
    rng: &mut StdRng,
    mats: &[MaterialParams],
    max_ratio: f64,
) -> (OracleSide, MaterialParams, OracleSide, MaterialParams) {
    let ml = mats[rng.gen_range(0..mats.len())];
    let mr = mats[rng.gen_range(0..mats.len())];
    let side = |rng: &mut StdRng, m: &MaterialParams| {
        let rho = m.rho_ref * log_uniform(rng, 0.5, 2.0);
        let p = 1.0e5 * log_uniform(rng, 1.0, max_ratio.sqrt());
        let c = (m.gamma * (p + m.p_inf) / rho).sqrt();
        let u = uniform(rng, -0.2, 0.2) * c;
        OracleSide { rho, u, p, gamma: m.gamma, p_inf: m.p_inf }
    };
    let l = side(rng, &ml);
    let mut r = side(rng, &mr);
    if rng.gen_bool(0.5) {
        // spread the ratio across the full range rather than its square root
        r.p = 1.0e5 * log_uniform(rng, 1.0, max_ratio);
    }
    (l, ml, r, mr)
}
