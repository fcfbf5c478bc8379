//! Steady-state exciton transport through a chain of two-level molecules
//! coupled to a single lossy cavity mode, with optional quantum-jump
//! feedback on the cavity output.
//!
//! Built around a dense Lindblad master equation on the zero/one-excitation
//! sector: [`hilbert`] holds the truncated basis and operator algebra,
//! [`model`] the physical parameters and Hamiltonian, [`dynamics`] the
//! vectorized generators and steady-state solver, [`observables`] the
//! exciton conductance, and [`experiments`] the sweep drivers.

pub mod dynamics;
pub mod experiments;
pub mod error;
pub mod hilbert;
pub mod model;
pub mod observables;

pub use error::{Error, Result};
