//! Runge-Kutta integration of Hamilton's equations as an independent check
//! on the closed-form map, including its fourth-order step convergence.

use dipole_optics::classical::{dipole_map, ClassicalHamiltonianCoeffs};
use dipole_optics::oracles::integrate_hamilton_rk4;
use dipole_optics::{PhaseSpaceRay, Result};

pub fn run_example() -> Result<()> {
    let h = ClassicalHamiltonianCoeffs::new(1.0, 1.0);
    let ray = PhaseSpaceRay::new(1e-3, 5e-4, -2e-3, 1e-4);
    let ds = 2.0;
    let exact = dipole_map(1.0, ds).apply(&ray).to_vector();

    let mut prev: Option<f64> = None;
    for step in [0.2, 0.1, 0.05, 1e-3] {
        let err = (integrate_hamilton_rk4(&h, &ray, ds, step)?.to_vector() - exact)
            .abs()
            .max();
        match prev {
            Some(p) => println!("h = {step:<6} error = {err:.3e}  ratio = {:.2}", p / err),
            None => println!("h = {step:<6} error = {err:.3e}"),
        }
        prev = Some(err);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
