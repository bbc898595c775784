use crate::classical::{PhaseSpaceRay, QuadraticHamiltonian};
use crate::error::{Error, Result};

type State = [f64; 4];

fn derivative<H: QuadraticHamiltonian + ?Sized>(h: &H, r: &State) -> State {
    let p0 = h.p0();
    let drift = 2.0 * h.c_pperp2() * p0;
    [drift * r[1], -(2.0 * h.c_x2() * r[0] + h.c_x()) / p0, drift * r[3], 0.0]
}

fn rk4_step<H: QuadraticHamiltonian + ?Sized>(h: &H, r: &State, dt: f64) -> State {
    let add = |a: &State, b: &State, f: f64| -> State {
        [a[0] + f * b[0], a[1] + f * b[1], a[2] + f * b[2], a[3] + f * b[3]]
    };
    let k1 = derivative(h, r);
    let k2 = derivative(h, &add(r, &k1, 0.5 * dt));
    let k3 = derivative(h, &add(r, &k2, 0.5 * dt));
    let k4 = derivative(h, &add(r, &k3, dt));
    let mut out = *r;
    for i in 0..4 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrates Hamilton's equations of `h` over `ds` with classic fourth-order
/// Runge-Kutta steps of length `step`; a shorter final step covers any
/// remainder. A negative `ds` integrates backwards.
///
/// The equations are `dx/ds = px/p0`, `d(px/p0)/ds = -(2 c_x2 x + c_x)/p0`
/// and the `y` drift. For a quantum Hamiltonian with `hbar > 0` they are the
/// exact Ehrenfest equations for the means.
pub fn integrate_hamilton_rk4<H: QuadraticHamiltonian + ?Sized>(
    h: &H,
    r: &PhaseSpaceRay,
    ds: f64,
    step: f64,
) -> Result<PhaseSpaceRay> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "RK4 step must be positive, got {step}"
        )));
    }
    let dir = ds.signum();
    let full = (ds.abs() / step).floor();
    let remainder = ds.abs() - full * step;
    let mut state = [r.x, r.px_over_p0, r.y, r.py_over_p0];
    for _ in 0..full as u64 {
        state = rk4_step(h, &state, dir * step);
    }
    // skip a remainder that is only roundoff from the floor division
    if remainder > 1e-12 * step {
        state = rk4_step(h, &state, dir * remainder);
    }
    Ok(PhaseSpaceRay::new(state[0], state[1], state[2], state[3]))
}
