use dipole_optics::oracles::{gaussian_state, split_step_propagate, GaussianSpec, GridSpec, SplitStepPropagator};
use dipole_optics::quantum::{propagate_moments, quantum_dipole_map, quantum_hamiltonian, MomentState};
use dipole_optics::DipoleConfig;
use std::f64::consts::PI;

const P0: f64 = 10.0;
const HBAR: f64 = 0.1;

fn ehrenfest_deviation(sigma_x: f64, sigma_y: f64, start: MomentState, ds: f64, n: usize) -> f64 {
    let cfg = DipoleConfig::desk(P0, HBAR, ds).unwrap();
    let spec = GaussianSpec::centred(sigma_x, sigma_y).with_means(start);
    // a packet off the ground-state width breathes in x, so size x by the wider phase
    let grid = GridSpec::new(128, 128, 1.2, 24.0 * sigma_y).unwrap();
    let psi = gaussian_state(&spec, grid, P0, HBAR).unwrap();
    let out = split_step_propagate(psi, &quantum_hamiltonian(&cfg), ds, n).unwrap();
    let want = propagate_moments(&start, &quantum_dipole_map(&cfg, ds).unwrap());
    out.moments(P0, HBAR).max_abs_diff(&want)
}

#[test]
fn moments_follow_the_map_at_two_widths() {
    let start = MomentState::new(0.03, -5e-4, 0.02, 1e-3);
    let (ds, n) = (2.0f64, 400);
    let bound = (1e-8f64).max(10.0 * ds.powi(3) / (n * n) as f64);
    for (sx, sy) in [(0.05, 0.15), (0.1, 0.2)] {
        let dev = ehrenfest_deviation(sx, sy, start, ds, n);
        assert!(dev <= bound, "widths ({sx}, {sy}): {dev} > {bound}");
    }
}

#[test]
fn constant_term_only_rotates_the_global_phase() {
    let ds_total = 1.0;
    let cfg = DipoleConfig::desk(P0, HBAR, ds_total).unwrap();
    let full = quantum_hamiltonian(&cfg);
    let bare = full.without_constant();
    let spec = GaussianSpec::centred(0.0707, 0.2);
    let grid = GridSpec::new(64, 64, 16.0 * 0.0707, 16.0 * 0.2).unwrap();
    let mut a = gaussian_state(&spec, grid, P0, HBAR).unwrap();
    let mut b = a.clone();

    // segments short enough that the phase advances by well under pi
    let (segments, per_segment) = (200, 5);
    let step = ds_total / (segments * per_segment) as f64;
    let mut pa = SplitStepPropagator::new(grid, &full, step).unwrap();
    let mut pb = SplitStepPropagator::new(grid, &bare, step).unwrap();
    let mut unwrapped = 0.0;
    let mut last = 0.0;
    for _ in 0..segments {
        pa.propagate(&mut a, per_segment).unwrap();
        pb.propagate(&mut b, per_segment).unwrap();
        let phase = b.overlap(&a).unwrap().arg();
        let mut d = phase - last;
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        unwrapped += d;
        last = phase;
    }
    let measured = -unwrapped / ds_total;
    let rate = full.global_phase_rate().unwrap();
    assert!(((measured - rate) / rate).abs() <= 1e-6, "{measured} vs {rate}");
}

#[test]
fn free_packet_drifts_with_its_mean_slope() {
    let cfg = DipoleConfig::new(1.0, P0, 1.0, 10.0, HBAR, 0.0, 1.0).unwrap();
    let mut h = quantum_hamiltonian(&cfg);
    h.c_x = 0.0;
    h.c_x2 = 0.0;
    let start = MomentState::new(0.0, 1e-2, 0.0, -2e-2);
    let spec = GaussianSpec::centred(0.2, 0.2).with_means(start);
    let grid = GridSpec::new(128, 128, 16.0 * 0.2, 16.0 * 0.2).unwrap();
    let out = split_step_propagate(gaussian_state(&spec, grid, P0, HBAR).unwrap(), &h, 3.0, 30).unwrap();
    let m = out.moments(P0, HBAR);
    assert!((m.mean_x - 3e-2).abs() < 1e-12, "{}", m.mean_x);
    assert!((m.mean_y + 6e-2).abs() < 1e-12, "{}", m.mean_y);
    assert!((m.mean_px_over_p0 - 1e-2).abs() < 1e-12);
}

#[test]
fn norm_is_conserved_over_a_thousand_steps() {
    let cfg = DipoleConfig::desk(P0, HBAR, PI).unwrap();
    let spec = GaussianSpec::centred(0.0707, 0.2);
    let grid = GridSpec::new(128, 128, 20.0 * 0.0707, 20.0 * 0.2).unwrap();
    let psi = gaussian_state(&spec, grid, P0, HBAR).unwrap();
    let n0 = psi.norm();
    let out = split_step_propagate(psi, &quantum_hamiltonian(&cfg), PI, 1000).unwrap();
    assert!((out.norm() - n0).abs() <= 1e-12);
}
