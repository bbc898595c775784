//! Truncated Lie series of the optical Hamiltonian against the closed form,
//! as a function of the truncation order.

use dipole_optics::classical::{dipole_map, lie_series_map, ClassicalHamiltonianCoeffs};
use dipole_optics::Result;
use std::f64::consts::PI;

pub fn run_example() -> Result<()> {
    let h = ClassicalHamiltonianCoeffs::new(1.0, 1.0);
    for ds in [0.1, 1.0, PI / 2.0, PI] {
        let exact = dipole_map(1.0, ds);
        let errs: Vec<String> = [5, 10, 20, 30]
            .iter()
            .map(|&n| format!("N={n}: {:.2e}", lie_series_map(&h, ds, n).max_abs_diff(&exact)))
            .collect();
        println!("kappa ds = {ds:.4}  {}", errs.join("  "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
