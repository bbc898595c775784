use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::scenario::{Mode, Scenario};
use crate::classical::{classical_hamiltonian, dipole_map, lie_series_map, PhaseSpaceRay, TransferMap};
use crate::error::{Error, Result};
use crate::oracles::{gaussian_state, integrate_hamilton_rk4, GaussianSpec, GridSpec, SplitStepPropagator};
use crate::quantum::{
    kick_scaling_report, quantum_dipole_map, quantum_hamiltonian, quantum_lie_series_map, KickScalingReport,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Fixed scientific notation with 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

/// A trajectory of one ray as seen by one source, one point per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mode: Mode,
    pub ray: usize,
    pub points: Vec<PhaseSpaceRay>,
    /// Norm change of the wavepacket over the arc (wavefunction mode only).
    pub norm_drift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub samples: Vec<f64>,
    pub trajectories: Vec<Trajectory>,
    pub checks: Vec<Check>,
    pub kick_at_exit: Option<[f64; 4]>,
    pub kick_scaling: Option<KickScalingReport>,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(self)
    }
}

/// 0 when every check passes, 1 otherwise.
pub fn exit_code(report: &Report) -> i32 {
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_TOLERANCE
    }
}

/// 2 for configuration problems, 3 for anything that failed while running.
pub fn exit_code_for_error(err: &Error) -> i32 {
    match err {
        Error::Config { .. } => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn trajectory(
    sc: &Scenario,
    mode: Mode,
    ray: &PhaseSpaceRay,
    samples: &[f64],
) -> Result<(Vec<PhaseSpaceRay>, Option<f64>)> {
    if mode == Mode::Wavefunction {
        let (points, drift) = grid_trajectory(sc, ray, samples)?;
        return Ok((points, Some(drift)));
    }
    map_trajectory(sc, mode, ray, samples).map(|p| (p, None))
}

fn map_trajectory(sc: &Scenario, mode: Mode, ray: &PhaseSpaceRay, samples: &[f64]) -> Result<Vec<PhaseSpaceRay>> {
    let cfg = &sc.cfg;
    let s_i = cfg.s_i();
    match mode {
        Mode::ClassicalMap => Ok(samples
            .iter()
            .map(|s| dipole_map(cfg.kappa(), s - s_i).apply(ray))
            .collect()),
        Mode::LieSeries => {
            let h = classical_hamiltonian(cfg)?;
            Ok(samples
                .iter()
                .map(|s| lie_series_map(&h, s - s_i, sc.lie_order).apply(ray))
                .collect())
        }
        Mode::QuantumMap => samples
            .iter()
            .map(|s| Ok(quantum_dipole_map(cfg, s - s_i)?.apply(ray)))
            .collect(),
        Mode::QuantumSeries => {
            let h = quantum_hamiltonian(cfg);
            Ok(samples
                .iter()
                .map(|s| quantum_lie_series_map(&h, s - s_i, sc.lie_order).apply(ray))
                .collect())
        }
        Mode::Rk4 => {
            let h = quantum_hamiltonian(cfg);
            let step = sc.rk4_step.expect("validated by the parser");
            let mut out = vec![*ray];
            for w in samples.windows(2) {
                let next = integrate_hamilton_rk4(&h, out.last().unwrap(), w[1] - w[0], step)?;
                out.push(next);
            }
            Ok(out)
        }
        Mode::Wavefunction | Mode::KickScaling => unreachable!("not a map-like source"),
    }
}

fn grid_trajectory(sc: &Scenario, ray: &PhaseSpaceRay, samples: &[f64]) -> Result<(Vec<PhaseSpaceRay>, f64)> {
    let cfg = &sc.cfg;
    let params = sc.grid.expect("validated by the parser");
    let h = quantum_hamiltonian(cfg);
    let spec = GaussianSpec {
        mean_x: ray.x,
        mean_px_over_p0: ray.px_over_p0,
        mean_y: ray.y,
        mean_py_over_p0: ray.py_over_p0,
        sigma_x: params.sigma_x,
        sigma_y: params.sigma_y,
    };
    let grid = GridSpec::for_gaussian(&spec, params.n, params.extent_sigma)?;
    let mut psi = gaussian_state(&spec, grid, cfg.p0(), cfg.hbar())?;
    let initial_norm = psi.norm();
    let segments = samples.len() - 1;
    let per_segment = params.n_steps.div_ceil(segments);
    let step = (samples[segments] - samples[0]) / (per_segment * segments) as f64;
    let mut prop = SplitStepPropagator::new(grid, &h, step)?;
    let mut out = vec![psi.moments(cfg.p0(), cfg.hbar()).into()];
    for _ in 0..segments {
        prop.propagate(&mut psi, per_segment)?;
        out.push(psi.moments(cfg.p0(), cfg.hbar()).into());
    }
    Ok((out, (psi.norm() - initial_norm).abs()))
}

fn map_at_exit(sc: &Scenario, mode: Mode) -> Result<Option<TransferMap>> {
    let cfg = &sc.cfg;
    let ds = cfg.arc_length();
    Ok(match mode {
        Mode::ClassicalMap => Some(dipole_map(cfg.kappa(), ds)),
        Mode::LieSeries => Some(lie_series_map(&classical_hamiltonian(cfg)?, ds, sc.lie_order)),
        Mode::QuantumMap => Some(quantum_dipole_map(cfg, ds)?),
        Mode::QuantumSeries => Some(quantum_lie_series_map(&quantum_hamiltonian(cfg), ds, sc.lie_order)),
        _ => None,
    })
}

fn tolerance_for(sc: &Scenario, mode: Mode) -> f64 {
    let t = &sc.tolerances;
    match mode {
        Mode::ClassicalMap | Mode::QuantumMap => t.map,
        Mode::LieSeries | Mode::QuantumSeries => t.series,
        Mode::Rk4 => t.rk4,
        Mode::Wavefunction => t.grid,
        Mode::KickScaling => unreachable!(),
    }
}

fn deviation(a: &PhaseSpaceRay, b: &PhaseSpaceRay) -> [f64; 4] {
    [
        a.x - b.x,
        a.px_over_p0 - b.px_over_p0,
        a.y - b.y,
        a.py_over_p0 - b.py_over_p0,
    ]
}

const TRAJECTORY_HEADER: &str = "# ray: input ray index; s: arclength [m]; x [m]; px_over_p0 [1]; y [m]; py_over_p0 [1]; source: map|series|rk4|qmap|qseries|grid\nray,s,x,px_over_p0,y,py_over_p0,source\n";
const COMPARISON_HEADER: &str = "# deviations source minus reference at each sample; lengths [m], slopes [1]\nray,s,source,reference,d_x,d_px_over_p0,d_y,d_py_over_p0,max_abs\n";
const KICK_HEADER: &str = "# closed-form quantum kick at the exit plane per design momentum; lambda0 = 2 pi hbar / p0\np0,kick_x,kick_px_over_p0,lambda0_sq_over_rho,lambda0_sq_over_rho_sq\n";

/// Runs every requested mode, writes `trajectory.csv`, `comparison.csv`
/// (when at least two trajectory sources are present), `kick_scaling.csv`
/// (kick-scaling mode) and `summary.txt` into `out_dir`.
pub fn run_scenario(sc: &Scenario, out_dir: &Path) -> Result<Report> {
    let samples = sc.sample_points();
    let modes: Vec<Mode> = sc.trajectory_modes().collect();

    let mut trajectories = Vec::new();
    for &mode in &modes {
        let per_ray: Vec<_> = sc
            .rays
            .par_iter()
            .map(|r| trajectory(sc, mode, r, &samples))
            .collect::<Result<_>>()?;
        trajectories.extend(
            per_ray
                .into_iter()
                .enumerate()
                .map(|(ray, (points, norm_drift))| Trajectory {
                    mode,
                    ray,
                    points,
                    norm_drift,
                }),
        );
    }

    let mut checks = Vec::new();
    let mut comparison = String::new();
    if let Some(&reference) = modes.first() {
        for &mode in &modes[1..] {
            let mut worst: f64 = 0.0;
            for ray in 0..sc.rays.len() {
                let find = |m: Mode| trajectories.iter().find(|t| t.mode == m && t.ray == ray).unwrap();
                let (a, b) = (find(mode), find(reference));
                for (k, s) in samples.iter().enumerate() {
                    let d = deviation(&a.points[k], &b.points[k]);
                    let max = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    worst = worst.max(max);
                    let _ = writeln!(
                        comparison,
                        "{ray},{},{},{},{},{},{},{},{}",
                        format_float(*s),
                        mode.source().unwrap(),
                        reference.source().unwrap(),
                        format_float(d[0]),
                        format_float(d[1]),
                        format_float(d[2]),
                        format_float(d[3]),
                        format_float(max)
                    );
                }
            }
            checks.push(Check::at_most(
                format!("max_dev_{}_vs_{}", mode.source().unwrap(), reference.source().unwrap()),
                worst,
                tolerance_for(sc, mode),
            ));
        }
    }

    let mut kick_at_exit = None;
    for &mode in &modes {
        if let Some(map) = map_at_exit(sc, mode)? {
            checks.push(Check::at_most(
                format!("symplectic_residual_{}", mode.source().unwrap()),
                map.symplectic_residual(),
                sc.tolerances.symplectic,
            ));
            if mode == Mode::QuantumMap {
                kick_at_exit = Some([map.kick[0], map.kick[1], map.kick[2], map.kick[3]]);
            }
        }
    }

    if modes.contains(&Mode::Wavefunction) {
        let drift = trajectories.iter().filter_map(|t| t.norm_drift).fold(0.0, f64::max);
        checks.push(Check::at_most("norm_drift_grid", drift, sc.tolerances.norm));
    }

    let kick_scaling = if sc.has_mode(Mode::KickScaling) {
        let report = kick_scaling_report(sc.cfg.kappa(), sc.cfg.arc_length(), &sc.p0_list, sc.cfg.hbar())?;
        match report.log_log_slope {
            Some(slope) => checks.push(Check::at_most(
                "kick_slope_deviation",
                (slope + 2.0).abs(),
                sc.tolerances.slope,
            )),
            None => checks.push(Check {
                name: "kick_slope_deviation".into(),
                value: f64::NAN,
                tolerance: sc.tolerances.slope,
                passed: false,
            }),
        }
        let ratios: Vec<f64> = report.rows.iter().map(|r| r.kick_x / r.lambda_sq_kappa).collect();
        let spread = ratio_spread(&ratios);
        checks.push(Check::at_most("kick_lambda_ratio_spread", spread, sc.tolerances.ratio));
        Some(report)
    } else {
        None
    };

    fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    if !trajectories.is_empty() {
        let mut text = String::from(TRAJECTORY_HEADER);
        for t in &trajectories {
            for (s, p) in samples.iter().zip(&t.points) {
                let _ = writeln!(
                    text,
                    "{},{},{},{},{},{},{}",
                    t.ray,
                    format_float(*s),
                    format_float(p.x),
                    format_float(p.px_over_p0),
                    format_float(p.y),
                    format_float(p.py_over_p0),
                    t.mode.source().unwrap()
                );
            }
        }
        files.push(write_file(out_dir, "trajectory.csv", &text)?);
    }
    if modes.len() >= 2 {
        files.push(write_file(
            out_dir,
            "comparison.csv",
            &format!("{COMPARISON_HEADER}{comparison}"),
        )?);
    }
    if let Some(report) = &kick_scaling {
        let mut text = String::from(KICK_HEADER);
        for r in &report.rows {
            let _ = writeln!(
                text,
                "{},{},{},{},{}",
                format_float(r.p0),
                format_float(r.kick_x),
                format_float(r.kick_px),
                format_float(r.lambda_sq_kappa),
                format_float(r.lambda_sq_kappa_sq)
            );
        }
        files.push(write_file(out_dir, "kick_scaling.csv", &text)?);
    }

    let mut report = Report {
        samples,
        trajectories,
        checks,
        kick_at_exit,
        kick_scaling,
        files,
        summary: String::new(),
    };
    report.summary = summary_text(sc, &report);
    let path = write_file(out_dir, "summary.txt", &report.summary)?;
    report.files.push(path);
    Ok(report)
}

fn ratio_spread(values: &[f64]) -> f64 {
    let Some(&first) = values.first() else {
        return 0.0;
    };
    if first == 0.0 {
        return if values.iter().all(|v| *v == 0.0) {
            0.0
        } else {
            f64::INFINITY
        };
    }
    values.iter().map(|v| (v / first - 1.0).abs()).fold(0.0, f64::max)
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn summary_text(sc: &Scenario, report: &Report) -> String {
    let cfg = &sc.cfg;
    let mut s = String::from("# dipole-optics run summary\n");
    let modes: Vec<_> = sc.modes.iter().map(|m| m.name()).collect();
    let _ = writeln!(s, "modes: {}", modes.join(", "));
    for (k, v) in [
        ("q", cfg.q()),
        ("p0", cfg.p0()),
        ("kappa", cfg.kappa()),
        ("B0", cfg.b0()),
        ("hbar", cfg.hbar()),
        ("s_i", cfg.s_i()),
        ("s_o", cfg.s_o()),
        ("lambda0", cfg.de_broglie_wavelength()),
    ] {
        let _ = writeln!(s, "{k} = {}", format_float(v));
    }
    let _ = writeln!(s, "rays = {}", sc.rays.len());
    let _ = writeln!(s, "samples = {}", sc.samples);
    if let Some(k) = report.kick_at_exit {
        let _ = writeln!(
            s,
            "kick_at_exit = {}, {}, {}, {}",
            format_float(k[0]),
            format_float(k[1]),
            format_float(k[2]),
            format_float(k[3])
        );
    }
    if let Some(ks) = &report.kick_scaling {
        match ks.log_log_slope {
            Some(slope) => {
                let _ = writeln!(s, "kick_scaling_slope = {slope:.6}");
            }
            None => {
                let _ = writeln!(s, "kick_scaling_slope = undefined (zero kick)");
            }
        }
    }
    for c in &report.checks {
        let _ = writeln!(
            s,
            "check {}: value = {} tol = {} {}",
            c.name,
            format_float(c.value),
            format_float(c.tolerance),
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    let _ = writeln!(s, "result: {}", if report.passed() { "PASS" } else { "FAIL" });
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_scenario;

    fn run(text: &str) -> (Report, tempfile::TempDir) {
        let dir = tempfile::tempdir().unwrap();
        let sc = parse_scenario(text).unwrap();
        (run_scenario(&sc, dir.path()).unwrap(), dir)
    }

    #[test]
    fn classical_quarter_turn_final_row() {
        let (report, dir) =
            run("q=1\np0=1\nkappa=1\nhbar=0\ns_i=0\ns_o=pi/2\nmode=classical-map\nsamples=3\nray=1e-3,0,0,0\n");
        let last = report.trajectories[0].points[2];
        assert!(last.x.abs() < 1e-18 && (last.px_over_p0 + 1e-3).abs() < 1e-18);
        let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
        assert!(!dir.path().join("comparison.csv").exists());
        assert_eq!(report.exit_code(), EXIT_PASS);
    }

    #[test]
    fn classical_limit_of_quantum_map_has_zero_deviation() {
        let (report, dir) = run("q=1\np0=10\nkappa=1\nhbar=0\ns_i=0\ns_o=pi\nmode=classical-map,quantum-map\nsamples=5\nray=1e-3,2e-4,0,1e-4\nray=0,0,0,0\n");
        let dev = report.checks.iter().find(|c| c.name == "max_dev_qmap_vs_map").unwrap();
        assert_eq!(dev.value, 0.0);
        assert!(dir.path().join("comparison.csv").exists());
        assert_eq!(report.kick_at_exit, Some([0.0; 4]));
    }

    #[test]
    fn kick_scaling_summary() {
        let (report, _dir) = run("q=1\np0=10\nkappa=1\nhbar=1\ns_i=0\ns_o=pi\nmode=kick-scaling\np0_list=5,10,20,40\n");
        assert!(
            report.summary.contains("kick_scaling_slope = -2.000000"),
            "{}",
            report.summary
        );
        assert_eq!(report.exit_code(), EXIT_PASS);
    }

    #[test]
    fn tolerance_failure_gives_exit_one() {
        let (report, _dir) =
            run("q=1\np0=10\nkappa=1\nhbar=1\ns_i=0\ns_o=pi\nmode=classical-map,quantum-map\nsamples=3\nray=0,0,0,0\n");
        assert!(!report.passed());
        assert_eq!(exit_code(&report), EXIT_TOLERANCE);
        assert!(report.summary.contains("FAIL"));
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code_for_error(&Error::config(Some(1), "x")), EXIT_CONFIG);
        assert_eq!(
            exit_code_for_error(&Error::BoundaryGuard { s: 0.0, ratio: 1.0 }),
            EXIT_RUNTIME
        );
    }

    #[test]
    fn float_format_is_fixed_width_scientific() {
        assert_eq!(format_float(1e-3), "1.0000000000000000e-3");
        assert_eq!(format_float(-0.5), "-5.0000000000000000e-1");
    }
}
