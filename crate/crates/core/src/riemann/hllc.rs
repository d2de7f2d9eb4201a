use super::{EdgeKind, Fluctuations, NormalState, RiemannInput, Vec4};
use crate::eos::MaterialParams;
use crate::error::{RiemannError, StateError};

fn check(s: &NormalState, m: &MaterialParams) -> Result<(), StateError> {
    if !(s.rho > 0.0) || !s.rho.is_finite() {
        return Err(StateError::NonPositiveDensity(s.rho));
    }
    if !(s.p + m.p_inf > 0.0) || !s.p.is_finite() {
        return Err(StateError::NegativeStiffenedPressure { pressure: s.p, p_inf: m.p_inf });
    }
    Ok(())
}

/// Star state of the HLLC fan on side `s` with outer wave speed `sk`.
#[inline]
fn star_state(s: &NormalState, q: &Vec4, sk: f64, s_star: f64) -> Vec4 {
    // factor is exactly 1 for an isolated stationary contact
    let factor = (sk - s.un) / (sk - s_star);
    let energy = q[3] + (s_star - s.un) * (s.rho * s_star + s.p / (sk - s.un));
    [factor * s.rho, factor * s.rho * s_star, factor * q[2], factor * energy]
}

/// HLLC with Davis wave-speed bounds, returned in wave-propagation form.
///
/// Both sides must be the same material.
pub fn hllc_fluctuations(inp: &RiemannInput) -> Result<Fluctuations, RiemannError> {
    let m = &inp.left_mat;
    let (l, r) = (&inp.left, &inp.right);
    check(l, m)?;
    check(r, &inp.right_mat)?;

    let mut out = Fluctuations::zero(EdgeKind::SameMaterial);
    if l == r {
        return Ok(out);
    }

    let cl = l.sound_speed(m);
    let cr = r.sound_speed(m);
    let sl = (l.un - cl).min(r.un - cr);
    let sr = (l.un + cl).max(r.un + cr);
    let ml = l.rho * (sl - l.un);
    let mr = r.rho * (sr - r.un);
    let s_star = (r.p - l.p + l.un * ml - r.un * mr) / (ml - mr);

    let ql = l.conserved(m);
    let qr = r.conserved(m);
    let qsl = star_state(l, &ql, sl, s_star);
    let qsr = star_state(r, &qr, sr, s_star);

    // the contact carries both a density and a shear jump; they are kept as
    // separate waves so the limiter can treat each on its own
    let rho_sr = qsr[0];
    let shear = [0.0, 0.0, rho_sr * (r.ut - l.ut), 0.5 * rho_sr * (r.ut * r.ut - l.ut * l.ut)];
    let speeds = [sl, s_star, s_star, sr];
    for k in 0..4 {
        out.waves[0][k] = qsl[k] - ql[k];
        out.waves[1][k] = qsr[k] - qsl[k] - shear[k];
        out.waves[2][k] = shear[k];
        out.waves[3][k] = qr[k] - qsr[k];
    }
    out.speeds = speeds;
    for (w, &s) in out.waves.iter().zip(speeds.iter()) {
        for k in 0..4 {
            if s < 0.0 {
                out.amdq[k] += s * w[k];
            } else {
                out.apdq[k] += s * w[k];
            }
        }
    }
    Ok(out)
}
