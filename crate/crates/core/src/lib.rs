//! Paraxial optics of a dipole bending magnet, classical and quantum.
//!
//! * [`beamcore`]: configuration, curved-frame geometry, vector potential.
//! * [`classical`]: optical Hamiltonian, Lie operator, 4x4 transfer map.
//! * [`quantum`]: quantum beam-optical Hamiltonian and the transfer map of
//!   expectation values with its `hbar^2` kick.
//! * [`oracles`]: RK4 integration and split-step wavefunction propagation,
//!   used to check the closed forms.
//! * [`cli`]: scenario files and the runner behind the `dipole-optics` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamcore;
pub mod classical;
pub mod cli;
pub mod error;
pub mod oracles;
pub mod quantum;

pub use beamcore::{CartesianPoint, DipoleConfig, FrenetPoint};
pub use classical::{PhaseSpaceRay, TransferMap};
pub use error::{Error, Result};
pub use quantum::{MomentState, QuantumHamiltonianCoeffs};
