//! Finite-volume simulation of shock waves crossing air, water and solid
//! inclusions in an axisymmetric shock tube.

// `!(x > 0.0)` is used on purpose to reject NaN; index loops mirror the maths.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod axisource;
pub mod cli;
pub mod config;
pub mod domain;
pub mod eos;
pub mod error;
pub mod observables;
pub mod riemann;
pub mod run;
pub mod stepper;
pub mod transverse;
pub mod verify;
