//! Exact integration of the axisymmetric geometric source terms.
//!
//! With the flux terms dropped, both velocities are constant along the flow of
//! the source ODE and density decays as `exp(-t u_r / r)`. What the pressure
//! does depends on how the energy equation is carried over to primitive
//! variables, see [`SourceForm`].

use serde::{Deserialize, Serialize};

use crate::eos::{internal_energy_density, ConservedState, MaterialParams};
use crate::error::StateError;

/// Which pressure equation the source step integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceForm {
    /// Exact flow of the conservative source ODE. Since `E = rho e + rho |u|^2 / 2`
    /// and the density decays, the kinetic part of `E` decays with it and
    /// `p + p_inf` simply scales by `exp(-gamma t u_r / r)`.
    #[default]
    Conservative,
    /// Closed form of `dp/dt = -(u_r/r) (gamma (p + p_inf) + (gamma - 1) rho |u|^2 / 2)`,
    /// which treats the kinetic energy density as constant. Kept for comparison
    /// with published results; it does not follow the conservative flow.
    Primitive,
}

/// Advance `q` through the source ODE at radius `r` for a time `dt`.
pub fn source_step(
    form: SourceForm,
    q: &ConservedState,
    m: &MaterialParams,
    r: f64,
    dt: f64,
) -> Result<ConservedState, StateError> {
    if !(q.rho > 0.0) {
        return Err(StateError::NonPositiveDensity(q.rho));
    }
    let u_r = q.mom_r / q.rho;
    if u_r == 0.0 {
        return Ok(*q);
    }
    let u_z = q.mom_z / q.rho;
    let speed2 = u_r * u_r + u_z * u_z;
    let p = (m.gamma - 1.0) * (q.energy - 0.5 * q.rho * speed2) - m.gamma * m.p_inf;

    let rate = dt * u_r / r;
    let decay = (-rate).exp();
    let decay_g = (-rate * m.gamma).exp();

    let rho = decay * q.rho;
    // 1 - exp(-x) without cancellation for small x
    let one_minus_g = -(-rate * m.gamma).exp_m1();
    let mut p_new = decay_g * p - m.p_inf * one_minus_g;
    if form == SourceForm::Primitive {
        p_new -= 0.5 * q.rho * speed2 * (decay - decay_g);
    }
    if !(p_new + m.p_inf > 0.0) {
        return Err(StateError::NegativeStiffenedPressure { pressure: p_new, p_inf: m.p_inf });
    }
    Ok(ConservedState {
        rho,
        mom_r: rho * u_r,
        mom_z: rho * u_z,
        energy: internal_energy_density(p_new, m) + 0.5 * rho * speed2,
    })
}

/// [`source_step`] with the conservative form.
pub fn source_step_exact(
    q: &ConservedState,
    m: &MaterialParams,
    r: f64,
    dt: f64,
) -> Result<ConservedState, StateError> {
    source_step(SourceForm::Conservative, q, m, r, dt)
}
