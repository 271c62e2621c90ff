//! Periodic equispaced grids and nodal solution arrays.

use crate::error::{Error, Result};
use crate::sum::neumaier;

/// Geometry of a periodic equispaced grid on `[origin, origin + length)^dims`
/// (node `i` along an axis sits at `origin + i * h`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dims: usize,
    n: usize,
    origin: f64,
    length: f64,
}

impl Grid {
    pub fn new(dims: usize, n: usize, origin: f64, length: f64) -> Result<Self> {
        if !(1..=2).contains(&dims) {
            return Err(Error::InvalidArgument(format!("dims must be 1 or 2, got {dims}")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 nodes per axis, got {n}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "domain length must be positive, got {length}"
            )));
        }
        Ok(Self {
            dims,
            n,
            origin,
            length,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Nodes per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn node_count(&self) -> usize {
        self.n.pow(self.dims as u32)
    }

    /// Quadrature weight `h^d`, identical for every node.
    pub fn weight(&self) -> f64 {
        self.spacing().powi(self.dims as i32)
    }

    /// Coordinates of node `i`; nodes are stored with x fastest.
    pub fn coordinate(&self, i: usize) -> [f64; 2] {
        let h = self.spacing();
        let ix = i % self.n;
        let iy = i / self.n;
        let x = self.origin + ix as f64 * h;
        let y = if self.dims == 2 {
            self.origin + iy as f64 * h
        } else {
            0.0
        };
        [x, y]
    }
}

/// Nodal solution with `components` values per node, stored node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    grid: Grid,
    components: usize,
    values: Vec<f64>,
}

impl GridState {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        Self {
            grid,
            components,
            values: vec![0.0; grid.node_count() * components],
        }
    }

    pub fn from_values(grid: Grid, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 || values.len() != grid.node_count() * components {
            return Err(Error::InvalidArgument(format!(
                "expected {} values for {} nodes x {} components, got {}",
                grid.node_count() * components,
                grid.node_count(),
                components,
                values.len()
            )));
        }
        Ok(Self {
            grid,
            components,
            values,
        })
    }

    /// Fills each node from its coordinates.
    pub fn from_fn<F>(grid: Grid, components: usize, mut f: F) -> Self
    where
        F: FnMut([f64; 2], &mut [f64]),
    {
        let mut state = Self::zeros(grid, components);
        for i in 0..grid.node_count() {
            let x = grid.coordinate(i);
            f(x, state.node_mut(i));
        }
        state
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn node_count(&self) -> usize {
        self.grid.node_count()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let m = self.components;
        &self.values[i * m..(i + 1) * m]
    }

    pub fn node_mut(&mut self, i: usize) -> &mut [f64] {
        let m = self.components;
        &mut self.values[i * m..(i + 1) * m]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Weighted sum `sum_i m_i u_i[c]` in fixed node order.
    pub fn total(&self, component: usize) -> f64 {
        let w = self.grid.weight();
        let m = self.components;
        w * neumaier(self.values.iter().skip(component).step_by(m).copied())
    }

    pub fn totals(&self) -> Vec<f64> {
        (0..self.components).map(|c| self.total(c)).collect()
    }

    /// First non-finite entry, if any, as `(node, component)`.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.values
            .iter()
            .position(|v| !v.is_finite())
            .map(|k| (k / self.components, k % self.components))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Largest absolute nodal difference to another state of the same shape.
    pub fn max_abs_diff(&self, other: &GridState) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }
}
