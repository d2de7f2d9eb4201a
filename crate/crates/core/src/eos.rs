//! Tammann (stiffened gas) equation of state.
//!
//! `p = (gamma - 1) * rho * e - gamma * p_inf`, with `p_inf = 0` recovering the
//! ideal-gas law. All pressures are absolute, in Pa.

use serde::{Deserialize, Serialize};

use crate::error::StateError;

/// One atmosphere in Pa.
pub const ATM_PA: f64 = 101_325.0;
/// One psi in Pa.
pub const PSI_PA: f64 = 6_894.757;

/// Absolute pressure (Pa) to gauge psi relative to one atmosphere.
pub fn pa_to_gauge_psi(p_abs: f64) -> f64 {
    (p_abs - ATM_PA) / PSI_PA
}

/// Gauge psi to absolute pressure (Pa).
pub fn gauge_psi_to_pa(psi: f64) -> f64 {
    psi * PSI_PA + ATM_PA
}

/// Identifier of the materials the simulator knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Material {
    Air,
    Water,
    Polystyrene,
}

impl Material {
    pub const ALL: [Material; 3] = [Material::Air, Material::Water, Material::Polystyrene];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Material::Air => "air",
            Material::Water => "water",
            Material::Polystyrene => "polystyrene",
        }
    }
}

/// Tammann EOS parameters plus an ambient density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub label: Material,
    pub gamma: f64,
    /// Pa
    pub p_inf: f64,
    /// kg/m^3
    pub rho_ref: f64,
}

impl MaterialParams {
    pub const fn air() -> Self {
        Self { label: Material::Air, gamma: 1.4, p_inf: 0.0, rho_ref: 1.2 }
    }

    pub const fn water() -> Self {
        Self { label: Material::Water, gamma: 7.15, p_inf: 0.3e9, rho_ref: 1000.0 }
    }

    pub const fn polystyrene() -> Self {
        Self { label: Material::Polystyrene, gamma: 1.1, p_inf: 4.79e9, rho_ref: 1050.0 }
    }

    pub fn default_for(label: Material) -> Self {
        match label {
            Material::Air => Self::air(),
            Material::Water => Self::water(),
            Material::Polystyrene => Self::polystyrene(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma > 1.0) {
            return Err(format!("{}: gamma must exceed 1 (got {})", self.label.name(), self.gamma));
        }
        if !(self.p_inf >= 0.0) || !self.p_inf.is_finite() {
            return Err(format!("{}: p_inf must be >= 0 (got {})", self.label.name(), self.p_inf));
        }
        if !(self.rho_ref > 0.0) || !self.rho_ref.is_finite() {
            return Err(format!("{}: rho_ref must be > 0 (got {})", self.label.name(), self.rho_ref));
        }
        Ok(())
    }

    /// Ambient state at rest at the given absolute pressure.
    pub fn at_rest(&self, p: f64) -> PrimitiveState {
        PrimitiveState { rho: self.rho_ref, u_r: 0.0, u_z: 0.0, p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u_r: f64,
    pub u_z: f64,
    pub p: f64,
}

/// Conserved variables `(rho, rho u_r, rho u_z, E)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConservedState {
    pub rho: f64,
    pub mom_r: f64,
    pub mom_z: f64,
    pub energy: f64,
}

impl ConservedState {
    pub fn to_array(self) -> [f64; 4] {
        [self.rho, self.mom_r, self.mom_z, self.energy]
    }

    pub fn from_array(q: [f64; 4]) -> Self {
        Self { rho: q[0], mom_r: q[1], mom_z: q[2], energy: q[3] }
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * (self.mom_r * self.mom_r + self.mom_z * self.mom_z) / self.rho
    }
}

fn check_pressure(p: f64, m: &MaterialParams) -> Result<(), StateError> {
    if p + m.p_inf > 0.0 {
        Ok(())
    } else {
        Err(StateError::NegativeStiffenedPressure { pressure: p, p_inf: m.p_inf })
    }
}

fn check_density(rho: f64) -> Result<(), StateError> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(StateError::NonPositiveDensity(rho))
    }
}

/// `p = (gamma - 1)(E - 0.5 rho |u|^2) - gamma p_inf`
pub fn pressure_from_conserved(q: &ConservedState, m: &MaterialParams) -> Result<f64, StateError> {
    check_density(q.rho)?;
    let p = raw_pressure(q, m);
    if !p.is_finite() {
        return Err(StateError::NonFinite);
    }
    check_pressure(p, m)?;
    Ok(p)
}

/// Pressure without admissibility checks. Used in hot loops after validation.
#[inline]
pub fn raw_pressure(q: &ConservedState, m: &MaterialParams) -> f64 {
    (m.gamma - 1.0) * (q.energy - q.kinetic_energy()) - m.gamma * m.p_inf
}

/// Internal energy per unit volume, `rho e = (p + gamma p_inf) / (gamma - 1)`.
#[inline]
pub fn internal_energy_density(p: f64, m: &MaterialParams) -> f64 {
    (p + m.gamma * m.p_inf) / (m.gamma - 1.0)
}

pub fn energy_from_primitive(w: &PrimitiveState, m: &MaterialParams) -> Result<ConservedState, StateError> {
    check_density(w.rho)?;
    check_pressure(w.p, m)?;
    Ok(raw_conserved(w, m))
}

#[inline]
pub fn raw_conserved(w: &PrimitiveState, m: &MaterialParams) -> ConservedState {
    let kinetic = 0.5 * w.rho * (w.u_r * w.u_r + w.u_z * w.u_z);
    ConservedState {
        rho: w.rho,
        mom_r: w.rho * w.u_r,
        mom_z: w.rho * w.u_z,
        energy: internal_energy_density(w.p, m) + kinetic,
    }
}

pub fn primitive_from_conserved(q: &ConservedState, m: &MaterialParams) -> Result<PrimitiveState, StateError> {
    let p = pressure_from_conserved(q, m)?;
    Ok(PrimitiveState { rho: q.rho, u_r: q.mom_r / q.rho, u_z: q.mom_z / q.rho, p })
}

/// `c = sqrt(gamma (p + p_inf) / rho)`
pub fn sound_speed(w: &PrimitiveState, m: &MaterialParams) -> Result<f64, StateError> {
    check_density(w.rho)?;
    check_pressure(w.p, m)?;
    Ok(raw_sound_speed(w.rho, w.p, m))
}

#[inline]
pub fn raw_sound_speed(rho: f64, p: f64, m: &MaterialParams) -> f64 {
    (m.gamma * (p + m.p_inf) / rho).sqrt()
}

/// `Z = rho c`
pub fn acoustic_impedance(w: &PrimitiveState, m: &MaterialParams) -> Result<f64, StateError> {
    Ok(w.rho * sound_speed(w, m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn air_pressure_from_internal_energy() {
        let q = ConservedState { rho: 1.2, mom_r: 0.0, mom_z: 0.0, energy: 2.5e5 };
        let p = pressure_from_conserved(&q, &MaterialParams::air()).unwrap();
        assert!((p - 1.0e5).abs() < 1e-9);
    }

    #[test]
    fn water_pressure_is_linear_in_energy() {
        let water = MaterialParams::water();
        let q = energy_from_primitive(&water.at_rest(ATM_PA), &water).unwrap();
        let bumped = ConservedState { energy: q.energy + 1.0e6, ..q };
        let dp = pressure_from_conserved(&bumped, &water).unwrap() - pressure_from_conserved(&q, &water).unwrap();
        assert!((dp - 6.15e6).abs() < 1e-6 * 6.15e6, "dp = {dp}");
    }

    #[test]
    fn rest_energies() {
        let air = MaterialParams::air();
        let e = energy_from_primitive(&air.at_rest(101_325.0), &air).unwrap();
        assert_eq!(e.energy, 101_325.0 / (1.4 - 1.0));
        assert!((e.energy - 253_312.5).abs() < 1e-9);

        let water = MaterialParams::water();
        let e = energy_from_primitive(&water.at_rest(101_325.0), &water).unwrap();
        let expected = (101_325.0 + 7.15 * 3.0e8) / 6.15;
        assert!((e.energy - expected).abs() <= 1e-12 * expected);
        assert!((e.energy - 3.4879e8).abs() < 1e5);
    }

    #[test]
    fn kinetic_energy_adds() {
        let water = MaterialParams::water();
        let rest = energy_from_primitive(&water.at_rest(2.0e5), &water).unwrap();
        let moving = PrimitiveState { rho: 1000.0, u_r: 3.0, u_z: -4.0, p: 2.0e5 };
        let q = energy_from_primitive(&moving, &water).unwrap();
        assert!((q.energy - rest.energy - 0.5 * 1000.0 * 25.0).abs() < 1e-6);
    }

    #[test]
    fn sound_speeds_and_impedances() {
        let air = MaterialParams::air();
        let c = sound_speed(&PrimitiveState { rho: 1.2, p: 101_325.0, ..Default::default() }, &air).unwrap();
        assert!((c - 343.82).abs() < 0.01);

        let water = MaterialParams::water();
        let w = water.at_rest(101_325.0);
        let c = sound_speed(&w, &water).unwrap();
        assert!((c - 1464.83).abs() < 0.01, "c = {c}");
        let z = acoustic_impedance(&w, &water).unwrap();
        assert!((z - 1.47e6).abs() < 0.01e6);

        let ps = MaterialParams::polystyrene();
        let w = ps.at_rest(101_325.0);
        let c = sound_speed(&w, &ps).unwrap();
        assert!((c - 2240.2).abs() < 0.5, "c = {c}");
        let z = acoustic_impedance(&w, &ps).unwrap();
        assert!((z - 2.35e6).abs() < 0.01e6, "z = {z}");
    }

    #[test]
    fn impedance_scales_with_sqrt_density() {
        let water = MaterialParams::water();
        let w = water.at_rest(1.0e5);
        let z1 = acoustic_impedance(&w, &water).unwrap();
        let z2 = acoustic_impedance(&PrimitiveState { rho: 2.0 * w.rho, ..w }, &water).unwrap();
        assert!((z2 / z1 - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn inadmissible_states_are_rejected() {
        let air = MaterialParams::air();
        assert!(matches!(
            sound_speed(&PrimitiveState { rho: 1.0, p: -1.0, ..Default::default() }, &air),
            Err(StateError::NegativeStiffenedPressure { .. })
        ));
        let q = ConservedState { rho: 0.0, mom_r: 0.0, mom_z: 0.0, energy: 1.0 };
        assert!(matches!(pressure_from_conserved(&q, &air), Err(StateError::NonPositiveDensity(_))));
        // tension is fine in water as long as p + p_inf > 0
        let water = MaterialParams::water();
        assert!(energy_from_primitive(&water.at_rest(-1.0e6), &water).is_ok());
        assert!(energy_from_primitive(&water.at_rest(-3.0e8), &water).is_err());
    }

    #[test]
    fn psi_conversion() {
        assert_eq!(pa_to_gauge_psi(ATM_PA), 0.0);
        assert!((gauge_psi_to_pa(13.0) - ATM_PA - 89_631.841).abs() < 1e-6);
    }

    fn material() -> impl Strategy<Value = MaterialParams> {
        prop_oneof![Just(MaterialParams::air()), Just(MaterialParams::water()), Just(MaterialParams::polystyrene()),]
    }

    proptest! {
        #[test]
        fn pressure_round_trip(m in material(), rho_f in 0.5f64..2.0, ur in -300.0f64..300.0,
                               uz in -300.0f64..300.0, p_f in 0.01f64..100.0) {
            let rho = m.rho_ref * rho_f;
            let p = p_f * ATM_PA;
            let w = PrimitiveState { rho, u_r: ur, u_z: uz, p };
            let q = energy_from_primitive(&w, &m).unwrap();
            let back = pressure_from_conserved(&q, &m).unwrap();
            // round-off is relative to the stiffened pressure p + p_inf
            let scale = (p.abs() + m.gamma * m.p_inf + q.kinetic_energy() * (m.gamma - 1.0)).max(p.abs());
            prop_assert!((back - p).abs() <= 4.0 * f64::EPSILON * scale, "{back} vs {p}");
        }

        #[test]
        fn sound_speed_identity(m in material(), rho_f in 0.5f64..2.0, p_f in 0.01f64..100.0) {
            let w = PrimitiveState { rho: m.rho_ref * rho_f, u_r: 0.0, u_z: 0.0, p: p_f * ATM_PA };
            let c = sound_speed(&w, &m).unwrap();
            let lhs = c * c * w.rho;
            let rhs = m.gamma * (w.p + m.p_inf);
            prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs);
        }

        #[test]
        fn ideal_gas_limit(rho in 0.1f64..10.0, p in 1.0e3f64..1.0e7) {
            let air = MaterialParams::air();
            let w = PrimitiveState { rho, u_r: 0.0, u_z: 0.0, p };
            prop_assert_eq!(sound_speed(&w, &air).unwrap(), (1.4 * p / rho).sqrt());
            prop_assert_eq!(energy_from_primitive(&w, &air).unwrap().energy, p / (1.4 - 1.0));
        }
    }
}
