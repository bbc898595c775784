//! The exit kick falls as 1/p0^2, i.e. it tracks lambda0^2 / rho.

use dipole_optics::quantum::kick_scaling_report;
use dipole_optics::Result;
use std::f64::consts::PI;

pub fn run_example() -> Result<()> {
    let report = kick_scaling_report(1.0, PI, &[5.0, 10.0, 20.0, 40.0], 1.0)?;
    println!("{:>6} {:>14} {:>14} {:>12}", "p0", "kick_x", "lambda0^2/rho", "ratio");
    for r in &report.rows {
        println!(
            "{:>6} {:>14.6e} {:>14.6e} {:>12.9}",
            r.p0,
            r.kick_x,
            r.lambda_sq_kappa,
            r.kick_x / r.lambda_sq_kappa
        );
    }
    if let Some(slope) = report.log_log_slope {
        println!("log-log slope = {slope:.6}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
