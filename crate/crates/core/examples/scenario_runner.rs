//! Parse a scenario held in memory and run it, as the CLI does.

use dipole_optics::cli::{parse_scenario, run_scenario};
use dipole_optics::Result;

const SCENARIO: &str = "
q = 1
p0 = 10
kappa = 1
hbar = 0.5
s_i = 0
s_o = pi
mode = quantum-map, quantum-series, rk4
samples = 5
lie_N = 30
rk4_h = 1e-3
ray = 1e-3, 0, 0, 0
";

pub fn run_example() -> Result<()> {
    let sc = parse_scenario(SCENARIO)?;
    let dir = std::env::temp_dir().join(format!("dipole-optics-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let report = run_scenario(&sc, &dir)?;
    print!("{}", report.summary);
    println!("exit code {}", report.exit_code());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
