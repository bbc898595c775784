//! Independent numerical ground truth for the closed-form maps: Runge-Kutta
//! integration of Hamilton's equations, and split-step spectral propagation
//! of the transverse wavefunction.

mod rk4;
mod wavefunction;

pub use rk4::integrate_hamilton_rk4;
pub use wavefunction::{
    gaussian_state, grid_expectation, split_step_propagate, GaussianSpec, GridSpec, Observable, SplitStepPropagator,
    TransverseWavefunction, BOUNDARY_GUARD, DEFAULT_EXTENT_SIGMA, DEFAULT_GRID_N,
};
