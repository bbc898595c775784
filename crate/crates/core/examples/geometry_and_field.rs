//! Curved-frame coordinates and the dipole field recovered from its vector
//! potential by a finite-difference curl.

use dipole_optics::beamcore::{
    cartesian_to_frenet, field_from_potential, frenet_to_cartesian, DipolePotential, FrenetPoint,
};
use dipole_optics::{DipoleConfig, Result};

pub fn run_example() -> Result<()> {
    // 1 GeV/c electron in a 1 T dipole
    let p0 = 1e9 * dipole_optics::beamcore::constants::ELEMENTARY_CHARGE / 299_792_458.0;
    let cfg = DipoleConfig::si_electron(p0, 1.0, 1.0)?;
    println!(
        "rho = {:.6} m, lambda0 = {:.3e} m",
        cfg.rho(),
        cfg.de_broglie_wavelength()
    );

    let kappa = cfg.kappa();
    let p = FrenetPoint::new(0.01, -0.002, 0.5);
    let c = frenet_to_cartesian(p, kappa)?;
    let back = cartesian_to_frenet(c, kappa)?;
    println!("frenet {p:?} -> cartesian {c:?} -> frenet {back:?}");

    let pot = DipolePotential { kappa, b0: cfg.b0() };
    let b = field_from_potential(&pot, p, kappa)?;
    println!("curl A = ({:.3e}, {:.12}, {:.3e}) T", b.bx, b.by, b.bs);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
