//! Numerical and number-theoretic tools for the coupled Majda-Biello KdV system
//!
//! ```text
//! u_t + u_xxx + v v_x = 0
//! v_t + alpha v_xxx + (u v)_x = 0        on T_lambda = [0, 2 pi lambda)
//! ```
//!
//! The crate computes resonance roots and their Diophantine type, integrates
//! the system pseudospectrally, and evaluates Picard iterates and spike
//! families of the bilinear estimates exactly.

pub mod surd;
pub mod real;
pub mod resonance;
pub mod util;
pub mod quadrature;
pub mod diophantine;
pub mod picard;
pub mod spectral;
pub mod bilinear;
pub mod cli;
