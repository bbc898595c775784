//! Classical paraxial optics of the dipole: the optical Hamiltonian, the
//! Poisson-bracket Lie operator acting on linear observables, and the
//! closed-form 4x4 transfer map.
//!
//! Phase-space vectors are ordered `[x, px/p0, y, py/p0]` throughout.

use nalgebra::{Matrix4, Vector4};

use crate::beamcore::DipoleConfig;
use crate::error::Result;

/// Default truncation order of the Lie series.
pub const DEFAULT_LIE_ORDER: usize = 20;

/// Transverse ray coordinates in the curved frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseSpaceRay {
    pub x: f64,
    pub px_over_p0: f64,
    pub y: f64,
    pub py_over_p0: f64,
}

impl PhaseSpaceRay {
    pub fn new(x: f64, px_over_p0: f64, y: f64, py_over_p0: f64) -> Self {
        Self {
            x,
            px_over_p0,
            y,
            py_over_p0,
        }
    }

    pub fn on_axis() -> Self {
        Self::default()
    }

    pub fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.x, self.px_over_p0, self.y, self.py_over_p0)
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|v| v.is_finite())
    }

    /// Largest transverse slope `max(|px/p0|, |py/p0|)`. Paraxial optics
    /// assumes this is small; nothing here enforces it.
    pub fn max_slope(&self) -> f64 {
        self.px_over_p0.abs().max(self.py_over_p0.abs())
    }
}

/// A Hamiltonian of the form
/// `c_const + c_pperp2 p_perp^2 + c_x x + c_x2 x^2`.
///
/// This is the most general form the paraxial dipole produces, classically
/// or quantum mechanically. Its Lie operator maps linear observables to
/// linear observables.
pub trait QuadraticHamiltonian {
    fn p0(&self) -> f64;
    fn c_const(&self) -> f64;
    fn c_pperp2(&self) -> f64;
    fn c_x(&self) -> f64;
    fn c_x2(&self) -> f64;
}

/// Coefficients of the classical optical Hamiltonian
/// `H = -p0 + p_perp^2 / (2 p0) + p0 kappa^2 x^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalHamiltonianCoeffs {
    pub p0: f64,
    pub kappa: f64,
    pub c_const: f64,
    pub c_pperp2: f64,
    pub c_x2: f64,
}

impl ClassicalHamiltonianCoeffs {
    /// `kappa = 0` gives the free-space drift Hamiltonian.
    pub fn new(p0: f64, kappa: f64) -> Self {
        Self {
            p0,
            kappa,
            c_const: -p0,
            c_pperp2: 1.0 / (2.0 * p0),
            c_x2: 0.5 * p0 * kappa * kappa,
        }
    }
}

impl QuadraticHamiltonian for ClassicalHamiltonianCoeffs {
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
        0.0
    }
    fn c_x2(&self) -> f64 {
        self.c_x2
    }
}

/// Classical Hamiltonian of a matched dipole. An unmatched field produces a
/// steering term that the classical optics here does not model; use
/// [`crate::quantum::quantum_hamiltonian`] with `hbar = 0` for that case.
pub fn classical_hamiltonian(cfg: &DipoleConfig) -> Result<ClassicalHamiltonianCoeffs> {
    cfg.require_matched(
        "the classical Hamiltonian assumes q*B0 = kappa*p0; use quantum::quantum_hamiltonian with hbar = 0 for an unmatched field",
    )?;
    Ok(ClassicalHamiltonianCoeffs::new(cfg.p0(), cfg.kappa()))
}

/// `a_x x + a_px px/p0 + a_y y + a_py py/p0 + a_1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinearObservable {
    pub a_x: f64,
    pub a_px: f64,
    pub a_y: f64,
    pub a_py: f64,
    pub a_1: f64,
}

impl LinearObservable {
    pub fn new(a_x: f64, a_px: f64, a_y: f64, a_py: f64, a_1: f64) -> Self {
        Self {
            a_x,
            a_px,
            a_y,
            a_py,
            a_1,
        }
    }

    pub fn x() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn px() -> Self {
        Self::new(0.0, 1.0, 0.0, 0.0, 0.0)
    }

    pub fn y() -> Self {
        Self::new(0.0, 0.0, 1.0, 0.0, 0.0)
    }

    pub fn py() -> Self {
        Self::new(0.0, 0.0, 0.0, 1.0, 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, c)
    }

    /// Basis observable for phase-space component `i` (0..4).
    pub fn basis(i: usize) -> Self {
        match i {
            0 => Self::x(),
            1 => Self::px(),
            2 => Self::y(),
            3 => Self::py(),
            _ => panic!("phase-space index {i} out of range"),
        }
    }

    /// Coefficients of the phase-space variables.
    pub fn linear_part(&self) -> Vector4<f64> {
        Vector4::new(self.a_x, self.a_px, self.a_y, self.a_py)
    }

    pub fn scale(self, f: f64) -> Self {
        Self::new(self.a_x * f, self.a_px * f, self.a_y * f, self.a_py * f, self.a_1 * f)
    }

    pub fn evaluate(&self, r: &PhaseSpaceRay) -> f64 {
        self.linear_part().dot(&r.to_vector()) + self.a_1
    }
}

impl std::ops::Add for LinearObservable {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(
            self.a_x + o.a_x,
            self.a_px + o.a_px,
            self.a_y + o.a_y,
            self.a_py + o.a_py,
            self.a_1 + o.a_1,
        )
    }
}

/// `{-H, A}` for a linear `A`, written out per basis element:
/// `x -> 2 c_pperp2 p0 (px/p0)`, `px/p0 -> -(2 c_x2 x + c_x) / p0`,
/// `y -> 2 c_pperp2 p0 (py/p0)`, `py/p0 -> 0`, constants -> 0.
pub(crate) fn generator_action<H: QuadraticHamiltonian + ?Sized>(a: &LinearObservable, h: &H) -> LinearObservable {
    let p0 = h.p0();
    let drift = 2.0 * h.c_pperp2() * p0;
    LinearObservable {
        a_x: -2.0 * h.c_x2() / p0 * a.a_px,
        a_px: drift * a.a_x,
        a_y: 0.0,
        a_py: drift * a.a_y,
        a_1: -h.c_x() / p0 * a.a_px,
    }
}

/// Poisson bracket `{-H, A}`, the classical Lie operator `:-H:` applied to `A`.
pub fn poisson_bracket(a: &LinearObservable, h: &ClassicalHamiltonianCoeffs) -> LinearObservable {
    generator_action(a, h)
}

/// Truncated exponential `sum_{n=0}^{order} ds^n / n! L^n` applied to each
/// basis observable, where `L` is the Lie operator of `h`. Row `i` of the
/// matrix holds the evolved basis observable `i`; its constant part lands
/// in the kick.
pub(crate) fn series_map<H: QuadraticHamiltonian + ?Sized>(h: &H, ds: f64, order: usize) -> TransferMap {
    let mut matrix = Matrix4::zeros();
    let mut kick = Vector4::zeros();
    for i in 0..4 {
        let mut term = LinearObservable::basis(i);
        let mut sum = term;
        for n in 1..=order {
            term = generator_action(&term, h).scale(ds / n as f64);
            sum = sum + term;
        }
        matrix.set_row(i, &sum.linear_part().transpose());
        kick[i] = sum.a_1;
    }
    TransferMap { matrix, kick, ds }
}

/// Classical transfer map from the Lie series truncated at `order`.
pub fn lie_series_map(h: &ClassicalHamiltonianCoeffs, ds: f64, order: usize) -> TransferMap {
    series_map(h, ds, order)
}

/// Affine map `r -> matrix r + kick` across an arclength interval `ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMap {
    pub matrix: Matrix4<f64>,
    pub kick: Vector4<f64>,
    pub ds: f64,
}

impl TransferMap {
    pub fn identity() -> Self {
        Self {
            matrix: Matrix4::identity(),
            kick: Vector4::zeros(),
            ds: 0.0,
        }
    }

    pub fn apply(&self, r: &PhaseSpaceRay) -> PhaseSpaceRay {
        PhaseSpaceRay::from_vector(&(self.matrix * r.to_vector() + self.kick))
    }

    /// `other` applied after `self`.
    pub fn then(&self, other: &TransferMap) -> TransferMap {
        TransferMap {
            matrix: other.matrix * self.matrix,
            kick: other.matrix * self.kick + other.kick,
            ds: self.ds + other.ds,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn symplectic_residual(&self) -> f64 {
        symplectic_residual(self)
    }

    /// Largest entrywise difference of matrix and kick.
    pub fn max_abs_diff(&self, other: &TransferMap) -> f64 {
        (self.matrix - other.matrix)
            .abs()
            .max()
            .max((self.kick - other.kick).abs().max())
    }
}

/// Canonical symplectic form for the `(x, px) + (y, py)` block ordering.
pub fn symplectic_form() -> Matrix4<f64> {
    #[rustfmt::skip]
    let j = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, -1.0, 0.0,
    );
    j
}

/// Max-norm of `M^T J M - J`.
pub fn symplectic_residual(m: &TransferMap) -> f64 {
    let j = symplectic_form();
    (m.matrix.transpose() * j * m.matrix - j).abs().max()
}

/// `sin(kappa ds) / kappa`, continuous through `kappa = 0`.
pub(crate) fn sinc_length(kappa: f64, ds: f64) -> f64 {
    let phi = kappa * ds;
    if phi.abs() < 1e-6 {
        let p2 = phi * phi;
        ds * (1.0 - p2 / 6.0 * (1.0 - p2 / 20.0))
    } else {
        phi.sin() / kappa
    }
}

/// Closed-form dipole map: a harmonic rotation in `x` and a drift in `y`.
/// `kappa = 0` reduces to the drift.
pub fn dipole_map(kappa: f64, ds: f64) -> TransferMap {
    let (sin, cos) = (kappa * ds).sin_cos();
    #[rustfmt::skip]
    let matrix = Matrix4::new(
        cos, sinc_length(kappa, ds), 0.0, 0.0,
        -kappa * sin, cos, 0.0, 0.0,
        0.0, 0.0, 1.0, ds,
        0.0, 0.0, 0.0, 1.0,
    );
    TransferMap {
        matrix,
        kick: Vector4::zeros(),
        ds,
    }
}

pub fn apply_map(m: &TransferMap, r: &PhaseSpaceRay) -> PhaseSpaceRay {
    m.apply(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hamiltonian_coefficients() {
        let cfg = DipoleConfig::matched(1.0, 1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let h = classical_hamiltonian(&cfg).unwrap();
        assert_eq!((h.c_const, h.c_pperp2, h.c_x2), (-1.0, 0.5, 0.5));

        let cfg = DipoleConfig::matched(1.0, 10.0, 2.0, 0.0, 0.0, 1.0).unwrap();
        let h = classical_hamiltonian(&cfg).unwrap();
        assert_eq!((h.c_const, h.c_pperp2, h.c_x2), (-10.0, 0.05, 20.0));

        assert_eq!(ClassicalHamiltonianCoeffs::new(3.0, 0.0).c_x2, 0.0);
    }

    #[test]
    fn unmatched_field_is_rejected() {
        let cfg = DipoleConfig::new(1.0, 10.0, 1.0, 12.0, 0.0, 0.0, 1.0).unwrap();
        let err = classical_hamiltonian(&cfg).unwrap_err();
        assert!(err.to_string().contains("quantum_hamiltonian"), "{err}");
    }

    #[test]
    fn bracket_relations() {
        let h = ClassicalHamiltonianCoeffs::new(1.0, 1.0);
        assert_eq!(poisson_bracket(&LinearObservable::x(), &h), LinearObservable::px());

        let h = ClassicalHamiltonianCoeffs::new(1.0, 2.0);
        assert_eq!(
            poisson_bracket(&LinearObservable::px(), &h),
            LinearObservable::x().scale(-4.0)
        );
        assert_eq!(
            poisson_bracket(&LinearObservable::py(), &h),
            LinearObservable::default()
        );
        assert_eq!(poisson_bracket(&LinearObservable::y(), &h), LinearObservable::py());
        assert_eq!(
            poisson_bracket(&LinearObservable::constant(7.0), &h),
            LinearObservable::default()
        );
    }

    #[test]
    fn bracket_twice_gives_paraxial_equation() {
        let h = ClassicalHamiltonianCoeffs::new(5.0, 0.7);
        let twice = poisson_bracket(&poisson_bracket(&LinearObservable::x(), &h), &h);
        let expected = LinearObservable::x().scale(-0.49);
        assert!((twice.a_x - expected.a_x).abs() < 1e-15);
        assert_eq!((twice.a_px, twice.a_y, twice.a_py, twice.a_1), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn lie_series_low_orders() {
        let h = ClassicalHamiltonianCoeffs::new(1.0, 1.0);
        assert_eq!(
            lie_series_map(&h, 0.3, 0),
            TransferMap {
                ds: 0.3,
                ..TransferMap::identity()
            }
        );

        let m = lie_series_map(&h, 0.1, 1);
        assert_eq!(m.matrix[(0, 0)], 1.0);
        assert!((m.matrix[(0, 1)] - 0.1).abs() < 1e-16);
        assert!((m.matrix[(1, 0)] + 0.1).abs() < 1e-16);
        assert_eq!(m.matrix[(1, 1)], 1.0);
    }

    #[test]
    fn lie_series_converges_at_quarter_turn() {
        let h = ClassicalHamiltonianCoeffs::new(1.0, 1.0);
        let series = lie_series_map(&h, PI / 2.0, DEFAULT_LIE_ORDER);
        let exact = dipole_map(1.0, PI / 2.0);
        assert!(series.max_abs_diff(&exact) <= 1e-15, "{}", series.max_abs_diff(&exact));
    }

    #[test]
    fn lie_series_remainder_bound() {
        let h = ClassicalHamiltonianCoeffs::new(2.0, 1.3);
        for &order in &[2usize, 5, 10] {
            for &ds in &[0.1, 0.7, 1.9] {
                let phi: f64 = 1.3 * ds;
                let fact: f64 = (1..=order + 1).map(|k| k as f64).product();
                // plus a roundoff floor once the bound drops below machine precision
                let bound = phi.powi(order as i32 + 1) / fact * phi.exp() + 1e-15;
                // remainder bound on the dimensionless entries; the off-diagonal
                // entries carry 1/kappa and kappa factors
                let m = lie_series_map(&h, ds, order);
                let e = dipole_map(1.3, ds);
                let d = m.matrix - e.matrix;
                let scaled = [d[(0, 0)], d[(0, 1)] * 1.3, d[(1, 0)] / 1.3, d[(1, 1)]];
                for v in scaled {
                    assert!(v.abs() <= bound, "order {order} ds {ds}: {v} > {bound}");
                }
            }
        }
    }

    #[test]
    fn dipole_map_examples() {
        let m = dipole_map(0.0, 2.0);
        #[rustfmt::skip]
        let drift = Matrix4::new(1.0, 2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 1.0);
        assert_eq!(m.matrix, drift);

        let m = dipole_map(1.0, PI / 2.0);
        #[rustfmt::skip]
        let quarter = Matrix4::new(0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, PI / 2.0, 0.0, 0.0, 0.0, 1.0);
        assert!((m.matrix - quarter).abs().max() <= 1e-15);

        let m = dipole_map(2.0, PI);
        let mut full = Matrix4::identity();
        full[(2, 3)] = PI;
        assert!((m.matrix - full).abs().max() <= 1e-15);
    }

    #[test]
    fn small_curvature_branch_agrees_with_direct_formula() {
        for &(kappa, ds) in &[(1e-9, 1.0), (1e-8, 0.5), (3e-7, 2.0)] {
            let phi: f64 = kappa * ds;
            let direct = phi.sin() / kappa;
            assert!((sinc_length(kappa, ds) - direct).abs() <= 1e-12);
        }
        let m = dipole_map(1e-12, 3.0);
        assert!((m.matrix - dipole_map(0.0, 3.0).matrix).abs().max() <= 1e-12);
    }

    #[test]
    fn apply_examples() {
        let m = dipole_map(1.0, PI / 2.0);
        assert_eq!(m.apply(&PhaseSpaceRay::on_axis()), PhaseSpaceRay::on_axis());
        let out = m.apply(&PhaseSpaceRay::new(1e-3, 0.0, 0.0, 0.0));
        assert!(out.x.abs() < 1e-18 && (out.px_over_p0 + 1e-3).abs() < 1e-18);
        let r = PhaseSpaceRay::new(0.1, -0.2, 0.3, 0.4);
        assert_eq!(apply_map(&TransferMap::identity(), &r), r);
    }

    #[test]
    fn residual_examples() {
        assert!(symplectic_residual(&dipole_map(1.0, PI / 3.0)) <= 1e-15);
        assert_eq!(symplectic_residual(&TransferMap::identity()), 0.0);
        let mut m = TransferMap::identity();
        m.matrix[(0, 0)] += 1e-3;
        let r = symplectic_residual(&m);
        assert!((r - 1e-3).abs() < 1e-9, "{r}");
    }

    #[test]
    fn composition_adds_arclength() {
        let (a, b) = (0.4, 1.1);
        let ab = dipole_map(0.9, a).then(&dipole_map(0.9, b));
        assert!(ab.max_abs_diff(&dipole_map(0.9, a + b)) <= 1e-15);
        assert_eq!(ab.ds, a + b);
    }
}
