//! Compressible Euler equations with an ideal-gas law.

use crate::error::{Error, Result};

/// Ideal gas with heat-capacity ratio `gamma` in `dims` space dimensions.
/// Conservative layout: `[rho, rho*v (dims entries), E]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gas {
    pub gamma: f64,
    pub dims: usize,
}

/// Primitive variables `[rho, v, p]`; unused velocity entries are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub velocity: [f64; 2],
    pub pressure: f64,
}

impl Primitive {
    pub fn new_1d(rho: f64, v: f64, pressure: f64) -> Self {
        Self {
            rho,
            velocity: [v, 0.0],
            pressure,
        }
    }

    pub fn new_2d(rho: f64, u: f64, v: f64, pressure: f64) -> Self {
        Self {
            rho,
            velocity: [u, v],
            pressure,
        }
    }
}

/// Entropy functionals of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyFunctions {
    /// Specific physical entropy `log(e rho^-gamma) / (gamma - 1)`.
    pub psi: f64,
    /// Exponential surrogate `e rho^-gamma`.
    pub psi_tilde: f64,
    /// Numerical entropy density `-rho log(psi)`; `None` when `psi <= 0`.
    pub sigma: Option<f64>,
}

impl Gas {
    pub fn new(gamma: f64, dims: usize) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::InvalidArgument(format!("gas ratio must exceed 1, got {gamma}")));
        }
        if !(1..=2).contains(&dims) {
            return Err(Error::InvalidArgument(format!("dims must be 1 or 2, got {dims}")));
        }
        Ok(Self { gamma, dims })
    }

    pub fn components(&self) -> usize {
        self.dims + 2
    }

    pub fn energy_index(&self) -> usize {
        self.dims + 1
    }

    pub fn momentum_sq(&self, u: &[f64]) -> f64 {
        u[1..=self.dims].iter().map(|m| m * m).sum()
    }

    /// Internal energy per unit volume `e = E - |rho v|^2 / (2 rho)`.
    pub fn internal_energy(&self, u: &[f64]) -> f64 {
        u[self.energy_index()] - 0.5 * self.momentum_sq(u) / u[0]
    }

    pub fn pressure(&self, u: &[f64]) -> f64 {
        (self.gamma - 1.0) * self.internal_energy(u)
    }

    pub fn sound_speed(&self, rho: f64, pressure: f64) -> f64 {
        (self.gamma * pressure / rho).sqrt()
    }

    /// `e rho^-gamma`, without admissibility checks.
    pub fn psi_tilde(&self, u: &[f64]) -> f64 {
        self.internal_energy(u) * u[0].powf(-self.gamma)
    }

    pub fn check_admissible(&self, u: &[f64]) -> std::result::Result<(), String> {
        let rho = u[0];
        if !(rho > 0.0) {
            return Err(format!("non-positive density {rho}"));
        }
        let e = self.internal_energy(u);
        if !(e > 0.0) {
            return Err(format!("non-positive internal energy {e}"));
        }
        Ok(())
    }

    pub fn to_primitive(&self, u: &[f64]) -> Primitive {
        let rho = u[0];
        let mut velocity = [0.0; 2];
        for (a, v) in velocity.iter_mut().enumerate().take(self.dims) {
            *v = u[1 + a] / rho;
        }
        Primitive {
            rho,
            velocity,
            pressure: self.pressure(u),
        }
    }

    pub fn to_conservative(&self, q: &Primitive, out: &mut [f64]) {
        out[0] = q.rho;
        let mut kinetic = 0.0;
        for a in 0..self.dims {
            out[1 + a] = q.rho * q.velocity[a];
            kinetic += q.velocity[a] * q.velocity[a];
        }
        out[self.energy_index()] = q.pressure / (self.gamma - 1.0) + 0.5 * q.rho * kinetic;
    }

    pub fn conservative(&self, q: &Primitive) -> Vec<f64> {
        let mut out = vec![0.0; self.components()];
        self.to_conservative(q, &mut out);
        out
    }

    /// `[rho v_a, rho v_a v + p e_a, (E + p) v_a]`.
    pub fn flux(&self, u: &[f64], axis: usize, out: &mut [f64]) -> std::result::Result<(), String> {
        self.check_admissible(u)?;
        let rho = u[0];
        let p = self.pressure(u);
        let va = u[1 + axis] / rho;
        out[0] = u[1 + axis];
        for b in 0..self.dims {
            out[1 + b] = u[1 + b] * va;
        }
        out[1 + axis] += p;
        let ie = self.energy_index();
        out[ie] = (u[ie] + p) * va;
        Ok(())
    }

    pub fn entropy(&self, u: &[f64]) -> Result<EntropyFunctions> {
        self.check_admissible(u)
            .map_err(|reason| Error::domain("rho > 0 and e > 0", reason))?;
        let psi_tilde = self.psi_tilde(u);
        let psi = psi_tilde.ln() / (self.gamma - 1.0);
        let sigma = (psi > 0.0).then(|| -u[0] * psi.ln());
        Ok(EntropyFunctions { psi, psi_tilde, sigma })
    }
}
