//! Pseudospectral integration of the coupled system on the torus of length
//! `2 pi lambda`, with conservation monitors and the exact coupled linear flow
//! that appears after removing spatial means.
//!
//! Coefficients are normalized so that `u(x) = sum_k c_k e^{i xi_k x}` with
//! `xi_k = k / lambda`. Linear phases follow `e^{i xi^3 t}`, the convention
//! under which `cos(x + t)` solves `u_t + u_xxx = 0`.

mod checkpoint;
mod dispersion;
mod grid;
mod integrate;

use thiserror::Error;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
pub use dispersion::{
    closed_form_eigenvalues, evolve_coupled_linear, linear_operator, linear_phase, mode_dispersion, Channel,
    DispersionMatrix, ModeDispersion,
};
pub use grid::{FieldPair, TorusGrid};
pub use integrate::{
    conserved_quantities, evolve, mean_zero_reduce, ConservedSet, Evolution, MeanZeroReduction, MonitorRow, Scheme,
    SimConfig,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid needs a power-of-two point count of at least 8 and a positive period, got n = {n}, lambda = {lambda}")]
    InvalidGrid { n: usize, lambda: f64 },
    #[error("field has {found} samples, grid has {expected}")]
    LengthMismatch { found: usize, expected: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("coefficient magnitude {magnitude:e} exceeded the overflow guard at t = {time}")]
    BlowupDetected { time: f64, magnitude: f64 },
    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),
}
