//! Closed-form transfer map of a dipole applied to a few rays.

use dipole_optics::classical::dipole_map;
use dipole_optics::{PhaseSpaceRay, Result};
use std::f64::consts::PI;

pub fn run_example() -> Result<()> {
    let map = dipole_map(1.0, PI / 2.0);
    println!("quarter-turn matrix:\n{}", map.matrix);
    println!(
        "det = {:.3e}, symplectic residual = {:.3e}",
        map.determinant(),
        map.symplectic_residual()
    );

    for r in [
        PhaseSpaceRay::new(1e-3, 0.0, 0.0, 0.0),
        PhaseSpaceRay::new(0.0, 1e-3, 1e-3, 1e-3),
    ] {
        println!("{r:?} -> {:?}", map.apply(&r));
    }

    // two quarter turns make a half turn
    let half = map.then(&map);
    println!(
        "|map o map - map(pi)| = {:.3e}",
        half.max_abs_diff(&dipole_map(1.0, PI))
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
