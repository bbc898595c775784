//! Quantum beam optics of the dipole.
//!
//! The paraxial quantum Hamiltonian governing `i hbar d psi/ds = H psi` is
//!
//! ```text
//! H = -p0 + p_perp^2 / (2 p0) + (q B0 kappa / 2) x^2 + (q B0 - kappa p0) x
//!     - (hbar^2 kappa^2 / (4 p0)) (1 - kappa x)
//! ```
//!
//! It follows from the Schrödinger equation written in the curved frame
//! (Laplacian with metric factor `zeta = 1 + kappa x`, Hermitized first
//! derivative term `hbar^2 kappa^2 / (2 zeta^2)`, minimal coupling to the
//! dipole potential), recast as an `s`-evolution equation through a
//! two-component split and one Foldy-Wouthuysen-like step, then truncated
//! to quadratic order with `hbar^2 kappa^2 / (2 zeta) ~ (hbar^2 kappa^2 / 2)(1 - kappa x)`.
//! Only the resulting coefficients are encoded here.
//!
//! Since `H` is quadratic, expectation values of `x`, `px`, `y`, `py`
//! evolve exactly by an affine map whose linear part is the classical one.

use nalgebra::Vector4;

use crate::beamcore::{de_broglie_wavelength, DipoleConfig};
use crate::classical::{
    dipole_map, generator_action, series_map, LinearObservable, PhaseSpaceRay, QuadraticHamiltonian, TransferMap,
};
use crate::error::{Error, Result};

/// Coefficients of `c_const + c_pperp2 p_perp^2 + c_x x + c_x2 x^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumHamiltonianCoeffs {
    pub c_const: f64,
    pub c_x: f64,
    pub c_x2: f64,
    pub c_pperp2: f64,
    pub p0: f64,
    pub kappa: f64,
    pub hbar: f64,
    pub q_b0: f64,
}

impl QuantumHamiltonianCoeffs {
    /// Phase rotation rate `c_const / hbar` of the constant part of `H`:
    /// the state picks up `exp(-i rate ds)` over and above what the transfer
    /// map describes. `None` in the classical limit.
    pub fn global_phase_rate(&self) -> Option<f64> {
        (self.hbar > 0.0).then(|| self.c_const / self.hbar)
    }

    /// The same Hamiltonian with its constant term dropped.
    pub fn without_constant(self) -> Self {
        Self { c_const: 0.0, ..self }
    }
}

impl QuadraticHamiltonian for QuantumHamiltonianCoeffs {
    fn p0(&self) -> f64 {
        self.p0
    }
    fn c_const(&self) -> f64 {
        self.c_const
    }
    fn c_pperp2(&self) -> f64 {
        self.c_pperp2
    }
    fn c_x(&self) -> f64 {
        self.c_x
    }
    fn c_x2(&self) -> f64 {
        self.c_x2
    }
}

/// Paraxial quantum Hamiltonian, valid for matched and unmatched fields.
pub fn quantum_hamiltonian(cfg: &DipoleConfig) -> QuantumHamiltonianCoeffs {
    let p0 = cfg.p0();
    let kappa = cfg.kappa();
    let hbar = cfg.hbar();
    let q_b0 = cfg.q_b0();
    let curvature_term = hbar * hbar * kappa * kappa / (4.0 * p0);
    QuantumHamiltonianCoeffs {
        c_const: -p0 - curvature_term,
        c_x: (q_b0 - kappa * p0) + curvature_term * kappa,
        c_x2: 0.5 * q_b0 * kappa,
        c_pperp2: 1.0 / (2.0 * p0),
        p0,
        kappa,
        hbar,
        q_b0,
    }
}

/// `(i/hbar)[H, A]` for a linear observable `A`.
///
/// The factor `i/hbar` cancels against the `hbar` produced by the canonical
/// commutator, so this is exact coefficient algebra and is well defined at
/// `hbar = 0`.
pub fn commutator_step(a: &LinearObservable, h: &QuantumHamiltonianCoeffs) -> LinearObservable {
    generator_action(a, h)
}

/// Map of the expectation values from the commutator Lie series truncated at
/// `order`. The constant parts of the evolved observables form the kick.
pub fn quantum_lie_series_map(h: &QuantumHamiltonianCoeffs, ds: f64, order: usize) -> TransferMap {
    series_map(h, ds, order)
}

/// Closed-form quantum map of a matched dipole:
/// the classical matrix plus the kick
/// `((hbar^2 kappa / 4 p0^2)(cos(kappa ds) - 1), -(hbar^2 kappa^2 / 4 p0^2) sin(kappa ds), 0, 0)`.
///
/// The sign of the slope kick is the one generated by the commutator series
/// (`x'' = -kappa^2 x - hbar^2 kappa^3 / (4 p0^2)`).
pub fn quantum_dipole_map(cfg: &DipoleConfig, ds: f64) -> Result<TransferMap> {
    cfg.require_matched("the closed-form quantum map needs q*B0 = kappa*p0; use quantum_lie_series_map")?;
    let mut map = dipole_map(cfg.kappa(), ds);
    map.kick = matched_kick(cfg.hbar(), cfg.kappa(), cfg.p0(), ds);
    Ok(map)
}

fn matched_kick(hbar: f64, kappa: f64, p0: f64, ds: f64) -> Vector4<f64> {
    let strength = hbar * hbar * kappa / (4.0 * p0 * p0);
    let (sin, cos) = (kappa * ds).sin_cos();
    Vector4::new(strength * (cos - 1.0), -strength * kappa * sin, 0.0, 0.0)
}

/// Expectation values `<x>, <px>/p0, <y>, <py>/p0` on a transverse plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentState {
    pub mean_x: f64,
    pub mean_px_over_p0: f64,
    pub mean_y: f64,
    pub mean_py_over_p0: f64,
}

impl MomentState {
    pub fn new(mean_x: f64, mean_px_over_p0: f64, mean_y: f64, mean_py_over_p0: f64) -> Self {
        Self {
            mean_x,
            mean_px_over_p0,
            mean_y,
            mean_py_over_p0,
        }
    }

    pub fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.mean_x, self.mean_px_over_p0, self.mean_y, self.mean_py_over_p0)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn max_abs_diff(&self, other: &MomentState) -> f64 {
        (self.to_vector() - other.to_vector()).abs().max()
    }
}

impl From<PhaseSpaceRay> for MomentState {
    fn from(r: PhaseSpaceRay) -> Self {
        Self::new(r.x, r.px_over_p0, r.y, r.py_over_p0)
    }
}

impl From<MomentState> for PhaseSpaceRay {
    fn from(m: MomentState) -> Self {
        PhaseSpaceRay::new(m.mean_x, m.mean_px_over_p0, m.mean_y, m.mean_py_over_p0)
    }
}

pub fn propagate_moments(m: &MomentState, map: &TransferMap) -> MomentState {
    MomentState::from_vector(&(map.matrix * m.to_vector() + map.kick))
}

/// One row of a kick-scaling table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickScalingRow {
    pub p0: f64,
    pub kick_x: f64,
    pub kick_px: f64,
    /// `lambda0^2 / rho`
    pub lambda_sq_kappa: f64,
    /// `lambda0^2 / rho^2`
    pub lambda_sq_kappa_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KickScalingReport {
    pub kappa: f64,
    pub ds: f64,
    pub hbar: f64,
    pub rows: Vec<KickScalingRow>,
    /// Least-squares slope of `ln|kick_x|` against `ln p0`; `None` when any
    /// kick vanishes or fewer than two distinct momenta are given.
    pub log_log_slope: Option<f64>,
}

/// Tabulates the closed-form kicks over a list of design momenta, next to
/// the de Broglie references `lambda0^2 / rho` and `lambda0^2 / rho^2`.
pub fn kick_scaling_report(kappa: f64, ds: f64, p0_list: &[f64], hbar: f64) -> Result<KickScalingReport> {
    if p0_list.is_empty() {
        return Err(Error::InvalidParameter("p0 list must not be empty".into()));
    }
    if let Some(bad) = p0_list.iter().find(|p| !(**p > 0.0) || !p.is_finite()) {
        return Err(Error::domain(format!("design momenta must be positive, got {bad}")));
    }
    if !(kappa > 0.0) || !(hbar >= 0.0) {
        return Err(Error::domain("kick scaling needs kappa > 0 and hbar >= 0"));
    }
    let rows = p0_list
        .iter()
        .map(|&p0| {
            let kick = matched_kick(hbar, kappa, p0, ds);
            let lambda = de_broglie_wavelength(p0, hbar)?;
            Ok(KickScalingRow {
                p0,
                kick_x: kick[0],
                kick_px: kick[1],
                lambda_sq_kappa: lambda * lambda * kappa,
                lambda_sq_kappa_sq: lambda * lambda * kappa * kappa,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let log_log_slope = log_log_fit(&rows);
    Ok(KickScalingReport {
        kappa,
        ds,
        hbar,
        rows,
        log_log_slope,
    })
}

fn log_log_fit(rows: &[KickScalingRow]) -> Option<f64> {
    if rows.iter().any(|r| r.kick_x == 0.0) {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.p0.ln(), r.kick_x.abs().ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{classical_hamiltonian, lie_series_map, symplectic_residual};
    use std::f64::consts::PI;

    fn desk(p0: f64, hbar: f64) -> DipoleConfig {
        DipoleConfig::desk(p0, hbar, PI).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let h = quantum_hamiltonian(&desk(1.0, 0.0));
        assert_eq!((h.c_const, h.c_x, h.c_x2, h.c_pperp2), (-1.0, 0.0, 0.5, 0.5));

        let h = quantum_hamiltonian(&desk(10.0, 1.0));
        assert!((h.c_const + 10.025).abs() < 1e-15);
        assert!((h.c_x - 0.025).abs() < 1e-17);
        assert_eq!((h.c_x2, h.c_pperp2), (5.0, 0.05));

        let h = quantum_hamiltonian(&desk(10.0, 0.0).with_field(12.0).unwrap());
        assert_eq!(h.c_x, 2.0);
        assert_eq!(h.c_x2, 6.0);
    }

    #[test]
    fn classical_limit_of_hamiltonian() {
        let cfg = DipoleConfig::matched(2.0, 7.0, 0.3, 0.0, 0.0, 1.0).unwrap();
        let q = quantum_hamiltonian(&cfg);
        let c = classical_hamiltonian(&cfg).unwrap();
        assert_eq!(q.c_x, 0.0);
        assert_eq!(q.c_const, c.c_const);
        assert_eq!(q.c_pperp2, c.c_pperp2);
        assert!((q.c_x2 - c.c_x2).abs() <= 1e-15 * c.c_x2);
    }

    #[test]
    fn commutator_examples() {
        let h = quantum_hamiltonian(&desk(10.0, 1.0));
        assert_eq!(commutator_step(&LinearObservable::x(), &h), LinearObservable::px());
        let r = commutator_step(&LinearObservable::px(), &h);
        assert!((r.a_x + 1.0).abs() < 1e-15);
        assert!((r.a_1 + 0.0025).abs() < 1e-17);
        assert_eq!((r.a_px, r.a_y, r.a_py), (0.0, 0.0, 0.0));
        assert_eq!(
            commutator_step(&LinearObservable::py(), &h),
            LinearObservable::default()
        );
    }

    #[test]
    fn series_classical_limit_and_zero_order() {
        let cfg = desk(3.0, 0.0);
        let q = quantum_lie_series_map(&quantum_hamiltonian(&cfg), 1.3, 20);
        let c = lie_series_map(&classical_hamiltonian(&cfg).unwrap(), 1.3, 20);
        assert_eq!(q.kick, Vector4::zeros());
        assert!((q.matrix - c.matrix).abs().max() <= 1e-15);

        let m = quantum_lie_series_map(&quantum_hamiltonian(&desk(10.0, 1.0)), 2.0, 0);
        assert_eq!(m.matrix, nalgebra::Matrix4::identity());
        assert_eq!(m.kick, Vector4::zeros());
    }

    #[test]
    fn series_order_twenty_half_turn_is_truncation_limited() {
        // With 20 terms the half-turn series still carries the
        // (pi)^21/21! ~ 5e-10 remainder of sin; order 30 resolves it.
        let cfg = desk(10.0, 1.0);
        let exact = quantum_dipole_map(&cfg, PI).unwrap();
        let h = quantum_hamiltonian(&cfg);
        let d20 = quantum_lie_series_map(&h, PI, 20).max_abs_diff(&exact);
        let bound = PI.powi(21) / (1..=21).map(|k| k as f64).product::<f64>() * PI.exp();
        assert!(d20 <= bound && d20 > 1e-12, "{d20}");
        assert!(quantum_lie_series_map(&h, PI, 30).max_abs_diff(&exact) <= 1e-12);
    }

    #[test]
    fn closed_form_kick_examples() {
        let m = quantum_dipole_map(&desk(10.0, 0.0), PI).unwrap();
        assert_eq!(m.kick, Vector4::zeros());

        let m = quantum_dipole_map(&desk(10.0, 1.0), PI).unwrap();
        assert!((m.kick[0] + 0.005).abs() < 1e-15);
        assert!(m.kick[1].abs() < 1e-15);
        assert_eq!((m.kick[2], m.kick[3]), (0.0, 0.0));

        let m = quantum_dipole_map(&desk(10.0, 1.0), 0.0).unwrap();
        assert_eq!(m.matrix, nalgebra::Matrix4::identity());
        assert_eq!(m.kick, Vector4::zeros());

        let unmatched = desk(10.0, 1.0).with_field(11.0).unwrap();
        assert!(matches!(
            quantum_dipole_map(&unmatched, 1.0),
            Err(Error::Unmatched { .. })
        ));
    }

    #[test]
    fn slope_kick_sign_follows_the_commutator_series() {
        let cfg = desk(10.0, 1.0);
        let h = quantum_hamiltonian(&cfg);
        for &ds in &[0.3, PI / 2.0, 2.5] {
            let series = quantum_lie_series_map(&h, ds, 30);
            let closed = quantum_dipole_map(&cfg, ds).unwrap();
            assert!(series.kick[1] < 0.0);
            assert!((series.kick - closed.kick).abs().max() <= 1e-15);
        }
    }

    #[test]
    fn moment_examples() {
        let map = quantum_dipole_map(&desk(10.0, 1.0), PI).unwrap();
        let out = propagate_moments(&MomentState::default(), &map);
        assert!((out.mean_x + 0.005).abs() < 1e-15 && out.mean_px_over_p0.abs() < 1e-15);

        let classical = quantum_dipole_map(&desk(10.0, 0.0), PI).unwrap();
        assert_eq!(
            propagate_moments(&MomentState::default(), &classical),
            MomentState::default()
        );

        let map = quantum_dipole_map(&desk(10.0, 1.0), PI / 2.0).unwrap();
        let out = propagate_moments(&MomentState::new(1e-3, 0.0, 0.0, 0.0), &map);
        assert!((out.mean_x + 0.0025).abs() < 1e-15);
        assert!((out.mean_px_over_p0 - (-1e-3 - 0.0025)).abs() < 1e-15);
    }

    #[test]
    fn kick_scaling_examples() {
        let r = kick_scaling_report(1.0, PI, &[5.0, 10.0, 20.0, 40.0], 1.0).unwrap();
        for w in r.rows.windows(2) {
            assert!((w[0].kick_x / w[1].kick_x - 4.0).abs() < 1e-12);
        }
        assert!((r.log_log_slope.unwrap() + 2.0).abs() < 1e-9);
        let expected_ratio = -1.0 / (8.0 * PI * PI);
        for row in &r.rows {
            assert!((row.kick_x / row.lambda_sq_kappa / expected_ratio - 1.0).abs() < 1e-12);
        }

        let r = kick_scaling_report(1.0, PI, &[5.0, 10.0], 0.0).unwrap();
        assert!(r.rows.iter().all(|row| row.kick_x == 0.0 && row.kick_px == 0.0));
        assert_eq!(r.log_log_slope, None);

        assert!(kick_scaling_report(1.0, PI, &[], 1.0).is_err());
        assert!(kick_scaling_report(1.0, PI, &[1.0, -2.0], 1.0).is_err());
    }

    #[test]
    fn quantum_map_is_symplectic_with_classical_linear_part() {
        let cfg = desk(4.0, 0.5);
        let m = quantum_dipole_map(&cfg, 1.7).unwrap();
        assert_eq!(m.matrix, dipole_map(1.0, 1.7).matrix);
        assert!(symplectic_residual(&m) < 1e-15);
    }

    #[test]
    fn phase_rate() {
        let h = quantum_hamiltonian(&desk(10.0, 0.1));
        assert!((h.global_phase_rate().unwrap() - h.c_const / 0.1).abs() < 1e-12);
        assert_eq!(quantum_hamiltonian(&desk(10.0, 0.0)).global_phase_rate(), None);
    }
}
