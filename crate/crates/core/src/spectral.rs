//! Fourier pseudospectral collocation on periodic equispaced grids.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::physics::Equation;
use crate::stepper::Rhs;

/// Spectral differentiation along either grid axis.
pub struct SpectralDerivative {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `i 2 pi k / L / N` per mode, zero at the Nyquist mode.
    multiplier: Vec<f64>,
    buffer: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SpectralDerivative {
    pub fn new(grid: Grid) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scale = 2.0 * PI / grid.length() / n as f64;
        let multiplier = (0..n)
            .map(|j| {
                if 2 * j == n {
                    0.0
                } else if 2 * j < n {
                    j as f64 * scale
                } else {
                    (j as f64 - n as f64) * scale
                }
            })
            .collect();
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            grid,
            forward,
            inverse,
            multiplier,
            buffer: vec![Complex64::new(0.0, 0.0); grid.node_count()],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Derivative of a nodal scalar field along `axis`, written to `out`.
    pub fn apply(&mut self, field: &[f64], axis: usize, out: &mut [f64]) {
        self.load(field, axis);
        self.differentiate();
        self.store(axis, |o, v| *o = v, out);
    }

    /// `out -= d(field)/d(axis)`.
    pub fn subtract(&mut self, field: &[f64], axis: usize, out: &mut [f64]) {
        self.load(field, axis);
        self.differentiate();
        self.store(axis, |o, v| *o -= v, out);
    }

    fn load(&mut self, field: &[f64], axis: usize) {
        assert_eq!(
            field.len(),
            self.grid.node_count(),
            "field size does not match the grid"
        );
        assert!(axis < self.grid.dims(), "axis {axis} out of range");
        let n = self.grid.n();
        if axis == 0 {
            for (b, &f) in self.buffer.iter_mut().zip(field) {
                *b = Complex64::new(f, 0.0);
            }
        } else {
            // transpose so that the y lines are contiguous
            for iy in 0..n {
                for ix in 0..n {
                    self.buffer[ix * n + iy] = Complex64::new(field[iy * n + ix], 0.0);
                }
            }
        }
    }

    fn differentiate(&mut self) {
        let n = self.grid.n();
        self.forward.process_with_scratch(&mut self.buffer, &mut self.scratch);
        for line in self.buffer.chunks_exact_mut(n) {
            for (c, &k) in line.iter_mut().zip(&self.multiplier) {
                *c = Complex64::new(-k * c.im, k * c.re);
            }
        }
        self.inverse.process_with_scratch(&mut self.buffer, &mut self.scratch);
    }

    fn store(&self, axis: usize, mut op: impl FnMut(&mut f64, f64), out: &mut [f64]) {
        let n = self.grid.n();
        debug_assert!({
            let re = self.buffer.iter().fold(0.0_f64, |m, c| m.max(c.re.abs()));
            let im = self.buffer.iter().fold(0.0_f64, |m, c| m.max(c.im.abs()));
            im <= 1e-12 * (1.0 + re)
        });
        if axis == 0 {
            for (o, b) in out.iter_mut().zip(&self.buffer) {
                op(o, b.re);
            }
        } else {
            for iy in 0..n {
                for ix in 0..n {
                    op(&mut out[iy * n + ix], self.buffer[ix * n + iy].re);
                }
            }
        }
    }
}

/// Semidiscrete operator `L(u) = -sum_axis D_axis F_axis(u)` with fluxes
/// formed pointwise and no dealiasing.
pub struct SpectralOperator {
    equation: Equation,
    derivative: SpectralDerivative,
    flux: Vec<f64>,
    node_flux: Vec<f64>,
}

impl SpectralOperator {
    pub fn new(grid: Grid, equation: Equation) -> Result<Self> {
        if let Some(gas) = equation.gas() {
            if gas.dims != grid.dims() {
                return Err(Error::InvalidArgument(format!(
                    "gas is {}-dimensional but the grid is {}-dimensional",
                    gas.dims,
                    grid.dims()
                )));
            }
        }
        let m = equation.components();
        Ok(Self {
            equation,
            derivative: SpectralDerivative::new(grid),
            flux: vec![0.0; grid.node_count() * m],
            node_flux: vec![0.0; m],
        })
    }

    pub fn equation(&self) -> &Equation {
        &self.equation
    }

    pub fn grid(&self) -> &Grid {
        self.derivative.grid()
    }

    /// Evaluates `L(u)` for node-major `u` into `out`.
    pub fn flux_divergence(&mut self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let grid = *self.derivative.grid();
        let m = self.equation.components();
        let nodes = grid.node_count();
        if u.len() != nodes * m || out.len() != nodes * m {
            return Err(Error::InvalidArgument(format!(
                "state has {} values, expected {}",
                u.len(),
                nodes * m
            )));
        }
        out.fill(0.0);
        let mut field = vec![0.0; nodes];
        let mut component = vec![0.0; nodes];
        for axis in 0..grid.dims() {
            for i in 0..nodes {
                let ui = &u[i * m..(i + 1) * m];
                self.equation
                    .flux(ui, axis, &mut self.node_flux)
                    .map_err(|reason| Error::Inadmissible { node: i, reason })?;
                for (c, &f) in self.node_flux.iter().enumerate() {
                    if !f.is_finite() {
                        return Err(Error::NonFinite { node: i, component: c });
                    }
                    // component-major copy for contiguous transforms
                    self.flux[c * nodes + i] = f;
                }
            }
            for c in 0..m {
                field.copy_from_slice(&self.flux[c * nodes..(c + 1) * nodes]);
                component.fill(0.0);
                self.derivative.subtract(&field, axis, &mut component);
                for (i, v) in component.iter().enumerate() {
                    out[i * m + c] += v;
                }
            }
        }
        Ok(())
    }
}

impl Rhs for SpectralOperator {
    fn eval(&mut self, u: &[f64], _t: f64, out: &mut [f64]) -> Result<()> {
        self.flux_divergence(u, out)
    }
}

/// Convenience wrapper: derivative of one field along `axis`.
pub fn spectral_derivative(grid: &Grid, field: &[f64], axis: usize) -> Vec<f64> {
    let mut d = SpectralDerivative::new(*grid);
    let mut out = vec![0.0; field.len()];
    d.apply(field, axis, &mut out);
    out
}
