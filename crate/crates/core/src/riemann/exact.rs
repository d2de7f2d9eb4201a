//! Exact two-material Riemann solver.
//!
//! The stiffened gas behaves like an ideal gas in the shifted pressure
//! `P = p + p_inf`, so the classical shock and rarefaction branch functions
//! apply per side with that substitution. The star pressure is the root of
//! `g(p) = f_L(p) + f_R(p) + (u_R - u_L)`, found by safeguarded Newton.

use super::{NormalState, RiemannInput};
use crate::eos::MaterialParams;
use crate::error::{RiemannError, StateError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// Residual tolerance on `|g(p*)| / (c_L + c_R)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

/// One of the two nonlinear waves of the fan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideWave {
    pub kind: WaveKind,
    /// Shock speed, or the rarefaction head speed.
    pub head: f64,
    /// Equal to `head` for a shock.
    pub tail: f64,
}

impl SideWave {
    pub fn mean_speed(&self) -> f64 {
        0.5 * (self.head + self.tail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannFan {
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left: SideWave,
    pub right: SideWave,
    pub iterations: usize,
    /// Final `|g(p*)| / (c_L + c_R)`.
    pub residual: f64,
}

/// Per-side data for the branch functions.
struct Side {
    rho: f64,
    p: f64,
    /// p + p_inf
    big_p: f64,
    p_inf: f64,
    gamma: f64,
    c: f64,
    a: f64,
    b: f64,
}

impl Side {
    fn new(s: &NormalState, m: &MaterialParams) -> Result<Self, StateError> {
        if !(s.rho > 0.0) || !s.rho.is_finite() {
            return Err(StateError::NonPositiveDensity(s.rho));
        }
        let big_p = s.p + m.p_inf;
        if !(big_p > 0.0) || !big_p.is_finite() {
            return Err(StateError::NegativeStiffenedPressure { pressure: s.p, p_inf: m.p_inf });
        }
        let g = m.gamma;
        Ok(Self {
            rho: s.rho,
            p: s.p,
            big_p,
            p_inf: m.p_inf,
            gamma: g,
            c: (g * big_p / s.rho).sqrt(),
            a: 2.0 / ((g + 1.0) * s.rho),
            b: (g - 1.0) / (g + 1.0) * big_p,
        })
    }

    /// Branch function and its derivative at star pressure `p`.
    fn f(&self, p: f64) -> (f64, f64) {
        let big = p + self.p_inf;
        if p > self.p {
            let root = (self.a / (big + self.b)).sqrt();
            let f = (p - self.p) * root;
            let df = root * (1.0 - 0.5 * (p - self.p) / (big + self.b));
            (f, df)
        } else {
            let g = self.gamma;
            let ratio = big / self.big_p;
            let f = 2.0 * self.c / (g - 1.0) * (ratio.powf((g - 1.0) / (2.0 * g)) - 1.0);
            let df = if big > 0.0 { ratio.powf(-(g + 1.0) / (2.0 * g)) / (self.rho * self.c) } else { f64::INFINITY };
            (f, df)
        }
    }

    fn star_density(&self, p_star: f64) -> f64 {
        let g = self.gamma;
        let ratio = (p_star + self.p_inf) / self.big_p;
        if p_star > self.p {
            let k = (g - 1.0) / (g + 1.0);
            self.rho * (ratio + k) / (k * ratio + 1.0)
        } else {
            self.rho * ratio.powf(1.0 / g)
        }
    }

    fn star_sound_speed(&self, p_star: f64) -> f64 {
        let g = self.gamma;
        self.c * ((p_star + self.p_inf) / self.big_p).powf((g - 1.0) / (2.0 * g))
    }

    /// Normalised shock speed factor `sqrt((g+1)/(2g) P*/P + (g-1)/(2g))`.
    fn shock_factor(&self, p_star: f64) -> f64 {
        let g = self.gamma;
        ((g + 1.0) / (2.0 * g) * (p_star + self.p_inf) / self.big_p + (g - 1.0) / (2.0 * g)).sqrt()
    }
}

/// Solve for the star state of a (possibly two-material) Riemann problem.
pub fn exact_star(inp: &RiemannInput, opts: &ExactOptions) -> Result<RiemannFan, RiemannError> {
    let l = Side::new(&inp.left, &inp.left_mat)?;
    let r = Side::new(&inp.right, &inp.right_mat)?;
    let du = inp.right.un - inp.left.un;
    let vscale = l.c + r.c;

    let g = |p: f64| {
        let (fl, dfl) = l.f(p);
        let (fr, dfr) = r.f(p);
        (fl + fr + du, dfl + dfr)
    };

    // both sides need p + p_inf > 0
    let p_min = -l.p_inf.min(r.p_inf);
    let (g_min, _) = g(p_min);
    if g_min >= 0.0 {
        return Err(RiemannError::Vacuum { du, limit: du - g_min });
    }

    let p_scale = l.big_p.max(r.big_p);
    // bracket: g(lo) < 0 <= g(hi)
    let mut lo = p_min;
    let mut hi = l.p.max(r.p);
    let mut grow = 0;
    while g(hi).0 < 0.0 {
        hi = p_min + 2.0 * (hi - p_min) + p_scale;
        grow += 1;
        if grow > 200 || !hi.is_finite() {
            return Err(RiemannError::NoConvergence { iterations: 0, residual: f64::INFINITY });
        }
    }

    // linearised acoustic guess
    let zl = l.rho * l.c;
    let zr = r.rho * r.c;
    let mut p = if du == 0.0 && l.p == r.p {
        // exact root: both branch functions vanish at the common pressure
        l.p
    } else {
        (zr * l.p + zl * r.p - zl * zr * du) / (zl + zr)
    };
    if !(p > lo && p < hi) {
        p = 0.5 * (lo + hi);
    }

    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < opts.max_iter {
        iterations += 1;
        let (gv, dg) = g(p);
        residual = gv.abs() / vscale;
        if gv == 0.0 {
            break;
        }
        if gv < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let mut next = p - gv / dg;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - p).abs();
        p = next;
        if residual <= opts.tol && step <= 1e-14 * (p.abs() + p_scale) {
            residual = g(p).0.abs() / vscale;
            break;
        }
        if hi - lo <= 4.0 * f64::EPSILON * (lo.abs() + hi.abs()) {
            residual = g(p).0.abs() / vscale;
            break;
        }
    }
    if !(residual <= opts.tol) {
        return Err(RiemannError::NoConvergence { iterations, residual });
    }

    let (fl, _) = l.f(p);
    let (fr, _) = r.f(p);
    let u_star = 0.5 * (inp.left.un + inp.right.un) + 0.5 * (fr - fl);

    let left = if p > l.p {
        let s = inp.left.un - l.c * l.shock_factor(p);
        SideWave { kind: WaveKind::Shock, head: s, tail: s }
    } else {
        SideWave { kind: WaveKind::Rarefaction, head: inp.left.un - l.c, tail: u_star - l.star_sound_speed(p) }
    };
    let right = if p > r.p {
        let s = inp.right.un + r.c * r.shock_factor(p);
        SideWave { kind: WaveKind::Shock, head: s, tail: s }
    } else {
        SideWave { kind: WaveKind::Rarefaction, head: inp.right.un + r.c, tail: u_star + r.star_sound_speed(p) }
    };

    Ok(RiemannFan {
        p_star: p,
        u_star,
        rho_star_left: l.star_density(p),
        rho_star_right: r.star_density(p),
        left,
        right,
        iterations,
        residual,
    })
}

/// Self-similar solution at `xi = x / t`.
pub fn sample_fan(fan: &RiemannFan, inp: &RiemannInput, xi: f64) -> NormalState {
    if xi <= fan.u_star {
        let s = &inp.left;
        let m = &inp.left_mat;
        match fan.left.kind {
            WaveKind::Shock => {
                if xi < fan.left.head {
                    *s
                } else {
                    NormalState { rho: fan.rho_star_left, un: fan.u_star, ut: s.ut, p: fan.p_star }
                }
            }
            WaveKind::Rarefaction => {
                if xi < fan.left.head {
                    *s
                } else if xi > fan.left.tail {
                    NormalState { rho: fan.rho_star_left, un: fan.u_star, ut: s.ut, p: fan.p_star }
                } else {
                    rarefaction_interior(s, m, xi, 1.0)
                }
            }
        }
    } else {
        let s = &inp.right;
        let m = &inp.right_mat;
        match fan.right.kind {
            WaveKind::Shock => {
                if xi > fan.right.head {
                    *s
                } else {
                    NormalState { rho: fan.rho_star_right, un: fan.u_star, ut: s.ut, p: fan.p_star }
                }
            }
            WaveKind::Rarefaction => {
                if xi > fan.right.head {
                    *s
                } else if xi < fan.right.tail {
                    NormalState { rho: fan.rho_star_right, un: fan.u_star, ut: s.ut, p: fan.p_star }
                } else {
                    rarefaction_interior(s, m, xi, -1.0)
                }
            }
        }
    }
}

/// State inside a centred rarefaction; `sign` is +1 for the left family.
fn rarefaction_interior(s: &NormalState, m: &MaterialParams, xi: f64, sign: f64) -> NormalState {
    let g = m.gamma;
    let c0 = s.sound_speed(m);
    let c = 2.0 / (g + 1.0) * c0 + sign * (g - 1.0) / (g + 1.0) * (s.un - xi);
    let un = 2.0 / (g + 1.0) * (sign * c0 + 0.5 * (g - 1.0) * s.un + xi);
    let ratio = c / c0;
    let rho = s.rho * ratio.powf(2.0 / (g - 1.0));
    let big_p = (s.p + m.p_inf) * ratio.powf(2.0 * g / (g - 1.0));
    NormalState { rho, un, ut: s.ut, p: big_p - m.p_inf }
}
