use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::quantum::{MomentState, QuantumHamiltonianCoeffs};

pub const DEFAULT_GRID_N: usize = 256;
/// Default grid half-width in units of the initial packet width.
pub const DEFAULT_EXTENT_SIGMA: f64 = 40.0;
/// Largest tolerated ratio of edge amplitude to peak amplitude. Above it the
/// periodic grid would wrap the packet round on itself.
pub const BOUNDARY_GUARD: f64 = 1e-8;

/// Steps between boundary checks during propagation.
const GUARD_INTERVAL: usize = 16;

/// Uniform periodic grid on `[-x_extent, x_extent) x [-y_extent, y_extent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x_extent: f64,
    pub y_extent: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, x_extent: f64, y_extent: f64) -> Result<Self> {
        if !nx.is_power_of_two() || !ny.is_power_of_two() || nx < 4 || ny < 4 {
            return Err(Error::InvalidParameter(format!(
                "grid sizes must be powers of two >= 4, got {nx} x {ny}"
            )));
        }
        if !(x_extent > 0.0) || !(y_extent > 0.0) {
            return Err(Error::InvalidParameter("grid extents must be positive".into()));
        }
        Ok(Self {
            nx,
            ny,
            x_extent,
            y_extent,
        })
    }

    /// Square `n x n` grid whose half-widths are `extent_sigma` packet widths.
    /// The y half-width must also cover any drift of the packet in `y`.
    pub fn for_gaussian(spec: &GaussianSpec, n: usize, extent_sigma: f64) -> Result<Self> {
        Self::new(n, n, extent_sigma * spec.sigma_x, extent_sigma * spec.sigma_y)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_extent / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.y_extent / self.ny as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.x_extent + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.y_extent + j as f64 * self.dy()
    }

    fn len(&self) -> usize {
        self.nx * self.ny
    }
}

/// Angular wavenumbers in FFT order.
fn wavenumbers(n: usize, d: f64) -> Vec<f64> {
    let dk = 2.0 * PI / (n as f64 * d);
    (0..n)
        .map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * dk)
        .collect()
}

/// Initial Gaussian scattering-state envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub mean_x: f64,
    pub mean_px_over_p0: f64,
    pub mean_y: f64,
    pub mean_py_over_p0: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
}

impl GaussianSpec {
    pub fn centred(sigma_x: f64, sigma_y: f64) -> Self {
        Self {
            mean_x: 0.0,
            mean_px_over_p0: 0.0,
            mean_y: 0.0,
            mean_py_over_p0: 0.0,
            sigma_x,
            sigma_y,
        }
    }

    pub fn with_means(self, m: MomentState) -> Self {
        Self {
            mean_x: m.mean_x,
            mean_px_over_p0: m.mean_px_over_p0,
            mean_y: m.mean_y,
            mean_py_over_p0: m.mean_py_over_p0,
            ..self
        }
    }
}

/// Transverse wavefunction `psi(x, y; s)` sampled on a [`GridSpec`],
/// stored row-major with `x` as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseWavefunction {
    grid: GridSpec,
    data: Vec<Complex64>,
    s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Norm,
    X,
    Px,
    Y,
    Py,
}

impl TransverseWavefunction {
    pub fn from_samples(grid: GridSpec, data: Vec<Complex64>, s: f64) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, data, s })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.data
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.data[ix * self.grid.ny + iy]
    }

    /// `sum |psi|^2 dx dy`.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dx() * self.grid.dy()
    }

    /// Largest amplitude on the outermost rows and columns relative to the
    /// peak amplitude.
    pub fn edge_ratio(&self) -> f64 {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let peak = self.data.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let mut edge: f64 = 0.0;
        for iy in 0..ny {
            edge = edge.max(self.at(0, iy).norm()).max(self.at(nx - 1, iy).norm());
        }
        for ix in 0..nx {
            edge = edge.max(self.at(ix, 0).norm()).max(self.at(ix, ny - 1).norm());
        }
        edge / peak
    }

    pub fn check_boundary(&self) -> Result<()> {
        let ratio = self.edge_ratio();
        if ratio > BOUNDARY_GUARD {
            Err(Error::BoundaryGuard { s: self.s, ratio })
        } else {
            Ok(())
        }
    }

    /// `<self|other> = sum conj(self) other dx dy`.
    pub fn overlap(&self, other: &TransverseWavefunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter("overlap needs identical grids".into()));
        }
        let sum: Complex64 = self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum();
        Ok(sum * self.grid.dx() * self.grid.dy())
    }

    /// All four first moments, scaled to `<px>/p0` and `<py>/p0`.
    pub fn moments(&self, p0: f64, hbar: f64) -> MomentState {
        let m = self.raw_moments(hbar);
        MomentState::new(m[1], m[2] / p0, m[3], m[4] / p0)
    }

    /// `[norm, <x>, <px>, <y>, <py>]`, means normalised by the norm.
    fn raw_moments(&self, hbar: f64) -> [f64; 5] {
        let g = &self.grid;
        let (nx, ny) = (g.nx, g.ny);
        let mut total = 0.0;
        let mut sx = 0.0;
        let mut sy = 0.0;
        for ix in 0..nx {
            let x = g.x(ix);
            let row = &self.data[ix * ny..(ix + 1) * ny];
            let mut row_total = 0.0;
            let mut row_y = 0.0;
            for (iy, c) in row.iter().enumerate() {
                let w = c.norm_sqr();
                row_total += w;
                row_y += g.y(iy) * w;
            }
            total += row_total;
            sx += x * row_total;
            sy += row_y;
        }

        let mut fft = Fft2::new(nx, ny);
        let mut spectrum = self.data.clone();
        fft.forward(&mut spectrum);
        // spectrum is in transposed (ky-major) layout
        let kx = wavenumbers(nx, g.dx());
        let ky = wavenumbers(ny, g.dy());
        let mut spec_total = 0.0;
        let mut skx = 0.0;
        let mut sky = 0.0;
        for (iky, &k_y) in ky.iter().enumerate() {
            let row = &spectrum[iky * nx..(iky + 1) * nx];
            let mut row_total = 0.0;
            for (ikx, c) in row.iter().enumerate() {
                let w = c.norm_sqr();
                row_total += w;
                skx += kx[ikx] * w;
            }
            spec_total += row_total;
            sky += k_y * row_total;
        }

        let norm = total * g.dx() * g.dy();
        [
            norm,
            sx / total,
            hbar * skx / spec_total,
            sy / total,
            hbar * sky / spec_total,
        ]
    }
}

/// Quadrature for positions and the norm; spectral sums `sum hbar k |psi~|^2`
/// for momenta. Means are normalised by the grid norm.
pub fn grid_expectation(psi: &TransverseWavefunction, which: Observable, hbar: f64) -> f64 {
    match which {
        Observable::Norm => psi.norm(),
        Observable::X => psi.raw_moments(hbar)[1],
        Observable::Px => psi.raw_moments(hbar)[2],
        Observable::Y => psi.raw_moments(hbar)[3],
        Observable::Py => psi.raw_moments(hbar)[4],
    }
}

/// Normalised Gaussian packet with phase `exp(i (px x + py y) / hbar)`.
pub fn gaussian_state(spec: &GaussianSpec, grid: GridSpec, p0: f64, hbar: f64) -> Result<TransverseWavefunction> {
    if !(hbar > 0.0) {
        return Err(Error::domain("a wavefunction needs hbar > 0"));
    }
    if !(spec.sigma_x > 0.0) || !(spec.sigma_y > 0.0) {
        return Err(Error::domain("Gaussian widths must be positive"));
    }
    let kx0 = spec.mean_px_over_p0 * p0 / hbar;
    let ky0 = spec.mean_py_over_p0 * p0 / hbar;
    let mut data = Vec::with_capacity(grid.len());
    for ix in 0..grid.nx {
        let x = grid.x(ix);
        let ex = -(x - spec.mean_x).powi(2) / (4.0 * spec.sigma_x * spec.sigma_x);
        for iy in 0..grid.ny {
            let y = grid.y(iy);
            let ey = -(y - spec.mean_y).powi(2) / (4.0 * spec.sigma_y * spec.sigma_y);
            data.push(Complex64::from_polar((ex + ey).exp(), kx0 * x + ky0 * y));
        }
    }
    let mut psi = TransverseWavefunction { grid, data, s: 0.0 };
    let scale = 1.0 / psi.norm().sqrt();
    psi.data.iter_mut().for_each(|c| *c *= scale);
    psi.check_boundary()?;
    Ok(psi)
}

/// Planned 2-D FFT. The forward transform leaves the spectrum transposed
/// (`ky` as the slow index); the inverse expects that layout. Rows are
/// transformed in parallel, each independently, so results do not depend
/// on the number of worker threads.
struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
}

impl Fft2 {
    fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
            buf: vec![Complex64::new(0.0, 0.0); nx * ny],
        }
    }

    fn rows(fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64], len: usize) {
        let scratch_len = fft.get_inplace_scratch_len();
        data.par_chunks_mut(len).for_each_init(
            || vec![Complex64::new(0.0, 0.0); scratch_len],
            |scratch, row| fft.process_with_scratch(row, scratch),
        );
    }

    /// `src` is `rows x cols`; writes `cols x rows` into `dst`.
    fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
        dst.par_chunks_mut(rows).enumerate().for_each(|(c, out)| {
            for (r, v) in out.iter_mut().enumerate() {
                *v = src[r * cols + c];
            }
        });
    }

    fn forward(&mut self, data: &mut [Complex64]) {
        Self::rows(&self.fwd_y, data, self.ny);
        Self::transpose(data, &mut self.buf, self.nx, self.ny);
        Self::rows(&self.fwd_x, &mut self.buf, self.nx);
        data.copy_from_slice(&self.buf);
    }

    /// Unnormalised inverse of [`Fft2::forward`].
    fn inverse(&mut self, data: &mut [Complex64]) {
        Self::rows(&self.inv_x, data, self.nx);
        Self::transpose(data, &mut self.buf, self.ny, self.nx);
        Self::rows(&self.inv_y, &mut self.buf, self.ny);
        data.copy_from_slice(&self.buf);
    }
}

/// Strang-split propagator for `i hbar d psi/ds = H psi` with a fixed step.
///
/// Each step is a potential half-step, an exact kinetic step in the
/// spatial-frequency domain, and a potential half-step. Adjacent potential
/// half-steps are fused. Every sub-step multiplies by unit-modulus phases,
/// so the norm is preserved up to roundoff.
pub struct SplitStepPropagator {
    grid: GridSpec,
    step: f64,
    fft: Fft2,
    kinetic: Vec<Complex64>,
    potential_half: Vec<Complex64>,
    potential_full: Vec<Complex64>,
}

impl SplitStepPropagator {
    pub fn new(grid: GridSpec, h: &QuantumHamiltonianCoeffs, step: f64) -> Result<Self> {
        if !(h.hbar > 0.0) {
            return Err(Error::domain("wavefunction propagation needs hbar > 0"));
        }
        if !step.is_finite() {
            return Err(Error::InvalidParameter("propagation step must be finite".into()));
        }
        let hbar = h.hbar;
        let (nx, ny) = (grid.nx, grid.ny);
        let kx = wavenumbers(nx, grid.dx());
        let ky = wavenumbers(ny, grid.dy());
        // the 1/(nx ny) normalisation of the inverse FFT is folded in here
        let inv_n = 1.0 / (nx * ny) as f64;
        let mut kinetic = Vec::with_capacity(nx * ny);
        for &k_y in &ky {
            for &k_x in &kx {
                let phase = -h.c_pperp2 * hbar * (k_x * k_x + k_y * k_y) * step;
                kinetic.push(Complex64::from_polar(inv_n, phase));
            }
        }
        let potential = |frac: f64| -> Vec<Complex64> {
            (0..nx)
                .map(|i| {
                    let x = grid.x(i);
                    let v = h.c_const + h.c_x * x + h.c_x2 * x * x;
                    Complex64::from_polar(1.0, -v * frac * step / hbar)
                })
                .collect()
        };
        Ok(Self {
            grid,
            step,
            fft: Fft2::new(nx, ny),
            kinetic,
            potential_half: potential(0.5),
            potential_full: potential(1.0),
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn apply_potential(data: &mut [Complex64], phases: &[Complex64], ny: usize) {
        data.par_chunks_mut(ny).zip(phases.par_iter()).for_each(|(row, p)| {
            row.iter_mut().for_each(|c| *c *= p);
        });
    }

    fn apply_kinetic(&mut self, data: &mut [Complex64]) {
        self.fft.forward(data);
        data.par_iter_mut()
            .zip(self.kinetic.par_iter())
            .for_each(|(c, k)| *c *= k);
        self.fft.inverse(data);
    }

    /// Advances `psi` by `n_steps` steps, checking the boundary guard as it goes.
    pub fn propagate(&mut self, psi: &mut TransverseWavefunction, n_steps: usize) -> Result<()> {
        if psi.grid != self.grid {
            return Err(Error::InvalidParameter(
                "wavefunction grid does not match the propagator".into(),
            ));
        }
        if n_steps == 0 {
            return Ok(());
        }
        let ny = self.grid.ny;
        let s0 = psi.s;
        Self::apply_potential(&mut psi.data, &self.potential_half, ny);
        for i in 0..n_steps {
            self.apply_kinetic(&mut psi.data);
            let last = i + 1 == n_steps;
            let phases = if last {
                &self.potential_half
            } else {
                &self.potential_full
            };
            Self::apply_potential(&mut psi.data, phases, ny);
            psi.s = s0 + (i + 1) as f64 * self.step;
            if last || (i + 1) % GUARD_INTERVAL == 0 {
                psi.check_boundary()?;
            }
        }
        Ok(())
    }
}

/// Evolves `psi` across `ds` in `n_steps` equal Strang steps.
pub fn split_step_propagate(
    psi: TransverseWavefunction,
    h: &QuantumHamiltonianCoeffs,
    ds: f64,
    n_steps: usize,
) -> Result<TransverseWavefunction> {
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be at least 1".into()));
    }
    let mut psi = psi;
    let mut prop = SplitStepPropagator::new(psi.grid, h, ds / n_steps as f64)?;
    prop.propagate(&mut psi, n_steps)?;
    Ok(psi)
}
