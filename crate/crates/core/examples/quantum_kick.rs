//! Quantum transfer map of the means: same linear part as the classical
//! map plus an hbar^2 kick, checked against the commutator series.

use dipole_optics::classical::dipole_map;
use dipole_optics::quantum::{quantum_dipole_map, quantum_hamiltonian, quantum_lie_series_map};
use dipole_optics::{DipoleConfig, PhaseSpaceRay, Result};
use std::f64::consts::PI;

pub fn run_example() -> Result<()> {
    let cfg = DipoleConfig::desk(10.0, 1.0, PI)?;
    let map = quantum_dipole_map(&cfg, PI)?;
    let series = quantum_lie_series_map(&quantum_hamiltonian(&cfg), PI, 30);
    println!("kick (closed form) = {:?}", map.kick.as_slice());
    println!("kick (series N=30) = {:?}", series.kick.as_slice());
    println!(
        "linear part vs classical: {:.3e}",
        (map.matrix - dipole_map(1.0, PI).matrix).abs().max()
    );

    // the on-axis ray is moved by exactly the kick
    println!("on-axis ray -> {:?}", map.apply(&PhaseSpaceRay::on_axis()));

    for hbar in [0.0, 0.1, 1.0] {
        let k = quantum_dipole_map(&cfg.with_hbar(hbar)?, PI)?.kick;
        println!("hbar = {hbar:<4} kick_x = {:.6e}", k[0]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
