//! Acoustic transverse Riemann solver for heterogeneous media.
//!
//! A normal fluctuation is projected onto its acoustic part (density and
//! transverse momentum) and split into an up-going wave with the sound speed of
//! the cell above and a down-going wave with the sound speed of the cell below.
//! Normal momentum and energy are not transported transversely.

use crate::riemann::Vec4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseInput {
    /// `(rho, normal momentum, transverse momentum, E)` fluctuation.
    pub fluct: Vec4,
    pub c_below: f64,
    pub c_mid: f64,
    pub c_above: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransverseSplit {
    pub up: Vec4,
    pub down: Vec4,
}

#[inline]
pub fn transverse_split(inp: &TransverseInput) -> TransverseSplit {
    let d1 = inp.fluct[0];
    let d3 = inp.fluct[2];
    let (c1, c2, c3) = (inp.c_below, inp.c_mid, inp.c_above);

    let up_amp = c3 * (c2 * d1 + d3) / (c3 + c2);
    let down_amp = -c1 * (c2 * d1 - d3) / (c1 + c2);
    TransverseSplit { up: [up_amp, 0.0, up_amp * c3, 0.0], down: [down_amp, 0.0, -down_amp * c1, 0.0] }
}
