//! Physical setup of a dipole bending magnet: constants, configuration,
//! the curved (Frenet) frame attached to the design orbit, and the vector
//! potential that produces the uniform dipole field.
//!
//! All quantities are plain `f64`. The formulas are unit-agnostic, so the
//! same code serves SI inputs and "desk units" where `q = 1`, `kappa = 1`
//! and `hbar` is exaggerated until quantum corrections become visible.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// CODATA 2018 physical constants (SI).
pub mod constants {
    /// Elementary charge [C] (exact).
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Reduced Planck constant [J s] (exact).
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Electron rest mass [kg].
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
}

/// Default relative tolerance for deciding whether `q B0 = kappa p0`.
pub const MATCH_REL_TOL: f64 = 1e-12;

/// Setup of a single dipole magnet.
///
/// `p0` is the design momentum. For a scattering state of energy `E0` it is
/// related to the particle mass by `p0^2 = 2 m E0`; only `p0` enters the optics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleConfig {
    q: f64,
    p0: f64,
    kappa: f64,
    b0: f64,
    hbar: f64,
    s_i: f64,
    s_o: f64,
}

impl DipoleConfig {
    /// Builds a configuration with an explicit field, which need not be
    /// matched to the curvature.
    pub fn new(q: f64, p0: f64, kappa: f64, b0: f64, hbar: f64, s_i: f64, s_o: f64) -> Result<Self> {
        let all = [q, p0, kappa, b0, hbar, s_i, s_o];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("dipole parameters must be finite"));
        }
        if q == 0.0 {
            return Err(Error::domain("charge q must be nonzero"));
        }
        if p0 <= 0.0 {
            return Err(Error::domain("design momentum p0 must be positive"));
        }
        if kappa <= 0.0 {
            return Err(Error::domain("kappa must be positive"));
        }
        if hbar < 0.0 {
            return Err(Error::domain("hbar must be non-negative"));
        }
        if s_o <= s_i {
            return Err(Error::domain("exit arclength s_o must exceed entry arclength s_i"));
        }
        Ok(Self {
            q,
            p0,
            kappa,
            b0,
            hbar,
            s_i,
            s_o,
        })
    }

    /// Builds a configuration whose field is matched to the curvature.
    pub fn matched(q: f64, p0: f64, kappa: f64, hbar: f64, s_i: f64, s_o: f64) -> Result<Self> {
        let b0 = field_from_curvature(q, kappa, p0)?;
        Self::new(q, p0, kappa, b0, hbar, s_i, s_o)
    }

    /// Desk-unit preset: `q = 1`, `kappa = 1`, matched field, entry at `s = 0`.
    pub fn desk(p0: f64, hbar: f64, arc_length: f64) -> Result<Self> {
        Self::matched(1.0, p0, 1.0, hbar, 0.0, arc_length)
    }

    /// SI preset for an electron of momentum `p0` [kg m/s] bent by `b0` [T].
    pub fn si_electron(p0: f64, b0: f64, arc_length: f64) -> Result<Self> {
        let q = constants::ELEMENTARY_CHARGE;
        let kappa = curvature_from_field(q, b0, p0)?;
        Self::new(q, p0, kappa, b0, constants::HBAR, 0.0, arc_length)
    }

    pub fn with_hbar(self, hbar: f64) -> Result<Self> {
        Self::new(self.q, self.p0, self.kappa, self.b0, hbar, self.s_i, self.s_o)
    }

    pub fn with_field(self, b0: f64) -> Result<Self> {
        Self::new(self.q, self.p0, self.kappa, b0, self.hbar, self.s_i, self.s_o)
    }

    pub fn with_momentum(self, p0: f64) -> Result<Self> {
        Self::new(self.q, p0, self.kappa, self.b0, self.hbar, self.s_i, self.s_o)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Bending radius `1 / kappa`.
    pub fn rho(&self) -> f64 {
        1.0 / self.kappa
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn q_b0(&self) -> f64 {
        self.q * self.b0
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn s_i(&self) -> f64 {
        self.s_i
    }

    pub fn s_o(&self) -> f64 {
        self.s_o
    }

    /// Length of the bend `s_o - s_i`.
    pub fn arc_length(&self) -> f64 {
        self.s_o - self.s_i
    }

    /// `q B0 - kappa p0`; zero for a matched magnet.
    pub fn mismatch(&self) -> f64 {
        self.q * self.b0 - self.kappa * self.p0
    }

    pub fn is_matched(&self) -> bool {
        self.is_matched_within(MATCH_REL_TOL)
    }

    pub fn is_matched_within(&self, rel_tol: f64) -> bool {
        self.mismatch().abs() <= rel_tol * self.kappa * self.p0
    }

    pub fn de_broglie_wavelength(&self) -> f64 {
        2.0 * PI * self.hbar / self.p0
    }

    pub(crate) fn require_matched(&self, hint: &'static str) -> Result<()> {
        if self.is_matched() {
            Ok(())
        } else {
            Err(Error::Unmatched {
                q_b0: self.q_b0(),
                kappa_p0: self.kappa * self.p0,
                hint,
            })
        }
    }
}

/// Position in the curved frame co-moving with the design orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetPoint {
    pub x: f64,
    pub y: f64,
    pub s: f64,
}

impl FrenetPoint {
    pub fn new(x: f64, y: f64, s: f64) -> Self {
        Self { x, y, s }
    }

    /// Metric factor `zeta = 1 + kappa x`.
    pub fn zeta(&self, kappa: f64) -> f64 {
        1.0 + kappa * self.x
    }
}

/// Position in the fixed lab frame `(X, Y, Z)` whose origin is the point of
/// the design orbit at `s = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CartesianPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Curvature `q B0 / p0` of the orbit bent by a field `b0`.
pub fn curvature_from_field(q: f64, b0: f64, p0: f64) -> Result<f64> {
    if !(p0 > 0.0) {
        return Err(Error::domain("design momentum p0 must be positive"));
    }
    if !(q * b0 > 0.0) {
        return Err(Error::domain("q*B0 must be positive to bend the orbit"));
    }
    Ok(q * b0 / p0)
}

/// Field `kappa p0 / q` that matches the design orbit of curvature `kappa`.
pub fn field_from_curvature(q: f64, kappa: f64, p0: f64) -> Result<f64> {
    if q == 0.0 {
        return Err(Error::domain("charge q must be nonzero"));
    }
    Ok(kappa * p0 / q)
}

fn check_chart(x: f64, kappa: f64) -> Result<()> {
    if 1.0 + kappa * x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "point x = {x} lies outside the coordinate chart (1 + kappa x <= 0 for kappa = {kappa})"
        )))
    }
}

pub fn frenet_to_cartesian(p: FrenetPoint, kappa: f64) -> Result<CartesianPoint> {
    check_chart(p.x, kappa)?;
    let rho = 1.0 / kappa;
    let r = rho * p.zeta(kappa);
    let (sin, cos) = (kappa * p.s).sin_cos();
    Ok(CartesianPoint {
        x: r * cos - rho,
        y: p.y,
        z: r * sin,
    })
}

/// Inverse of [`frenet_to_cartesian`]. The returned arclength lies in the
/// single chart period `|kappa s| < pi`; points further round the circle
/// alias onto it.
pub fn cartesian_to_frenet(p: CartesianPoint, kappa: f64) -> Result<FrenetPoint> {
    let rho = 1.0 / kappa;
    let u = p.x + rho;
    let r = u.hypot(p.z);
    if r == 0.0 {
        return Err(Error::domain(
            "point sits at the centre of the bend; arclength undefined",
        ));
    }
    let x = r - rho;
    check_chart(x, kappa)?;
    Ok(FrenetPoint {
        x,
        y: p.y,
        s: rho * p.z.atan2(u),
    })
}

/// Longitudinal vector potential of the dipole, `A_s = -B0 (x - kappa x^2 / (2 zeta))`.
/// The transverse components vanish.
pub fn vector_potential_s(x: f64, kappa: f64, b0: f64) -> Result<f64> {
    check_chart(x, kappa)?;
    let zeta = 1.0 + kappa * x;
    Ok(-b0 * (x - kappa * x * x / (2.0 * zeta)))
}

/// Vector potential `(A_x, A_y, A_s)` expressed in the curved frame.
pub trait VectorPotential {
    fn components(&self, p: FrenetPoint) -> Result<[f64; 3]>;
}

impl<F> VectorPotential for F
where
    F: Fn(FrenetPoint) -> [f64; 3],
{
    fn components(&self, p: FrenetPoint) -> Result<[f64; 3]> {
        Ok(self(p))
    }
}

/// The uniform dipole field's potential, see [`vector_potential_s`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipolePotential {
    pub kappa: f64,
    pub b0: f64,
}

impl VectorPotential for DipolePotential {
    fn components(&self, p: FrenetPoint) -> Result<[f64; 3]> {
        Ok([0.0, 0.0, vector_potential_s(p.x, self.kappa, self.b0)?])
    }
}

/// Magnetic field components along the local `(x, y, s)` axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticField {
    pub bx: f64,
    pub by: f64,
    pub bs: f64,
}

/// Default central-difference step at transverse offset `x`.
pub fn default_fd_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

/// Curl of `potential` in the curved frame, by central finite differences
/// with the default step.
pub fn field_from_potential<P: VectorPotential + ?Sized>(
    potential: &P,
    point: FrenetPoint,
    kappa: f64,
) -> Result<MagneticField> {
    field_from_potential_with_step(potential, point, kappa, default_fd_step(point.x))
}

/// Curl of `potential` using central differences of step `h`.
///
/// The metric factor `zeta = 1 + kappa x` is known in closed form, so
/// `d(zeta A_s)/dx` is expanded as `kappa A_s + zeta dA_s/dx` and only the
/// potential components are differenced. The truncation error is `O(h^2)`.
pub fn field_from_potential_with_step<P: VectorPotential + ?Sized>(
    potential: &P,
    point: FrenetPoint,
    kappa: f64,
    h: f64,
) -> Result<MagneticField> {
    if !(h > 0.0) {
        return Err(Error::domain("finite-difference step must be positive"));
    }
    check_chart(point.x, kappa)?;
    check_chart(point.x - h, kappa)?;
    check_chart(point.x + h, kappa)?;

    let FrenetPoint { x, y, s } = point;
    let at = |p: FrenetPoint| potential.components(p);
    let diff = |lo: [f64; 3], hi: [f64; 3], i: usize| (hi[i] - lo[i]) / (2.0 * h);

    let x_lo = at(FrenetPoint::new(x - h, y, s))?;
    let x_hi = at(FrenetPoint::new(x + h, y, s))?;
    let y_lo = at(FrenetPoint::new(x, y - h, s))?;
    let y_hi = at(FrenetPoint::new(x, y + h, s))?;
    let s_lo = at(FrenetPoint::new(x, y, s - h))?;
    let s_hi = at(FrenetPoint::new(x, y, s + h))?;
    let centre = at(point)?;

    let zeta = point.zeta(kappa);
    let d_zeta_as_dx = kappa * centre[2] + zeta * diff(x_lo, x_hi, 2);
    let d_zeta_as_dy = zeta * diff(y_lo, y_hi, 2);

    Ok(MagneticField {
        bx: (d_zeta_as_dy - diff(s_lo, s_hi, 1)) / zeta,
        by: (diff(s_lo, s_hi, 0) - d_zeta_as_dx) / zeta,
        bs: diff(x_lo, x_hi, 1) - diff(y_lo, y_hi, 0),
    })
}

/// De Broglie wavelength `2 pi hbar / p0`.
pub fn de_broglie_wavelength(p0: f64, hbar: f64) -> Result<f64> {
    if !(p0 > 0.0) {
        return Err(Error::domain("design momentum p0 must be positive"));
    }
    Ok(2.0 * PI * hbar / p0)
}
