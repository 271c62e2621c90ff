//! Conservation laws: scalar transport, Burgers and compressible Euler.

pub mod euler;
pub mod riemann;

pub use euler::{EntropyFunctions, Gas, Primitive};
pub use riemann::{exact_riemann, RiemannSolution};

/// Linear transport flux `c * u`.
pub fn advection_flux(u: f64, velocity: f64) -> f64 {
    velocity * u
}

/// Inviscid Burgers flux `u^2 / 2`.
pub fn burgers_flux(u: f64) -> f64 {
    0.5 * u * u
}

/// A hyperbolic system with a pointwise flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equation {
    /// Linear transport with a constant velocity vector.
    Advection {
        velocity: [f64; 2],
    },
    Burgers,
    Euler(Gas),
}

impl Equation {
    pub fn components(&self) -> usize {
        match self {
            Equation::Advection { .. } | Equation::Burgers => 1,
            Equation::Euler(gas) => gas.components(),
        }
    }

    pub fn gas(&self) -> Option<&Gas> {
        match self {
            Equation::Euler(gas) => Some(gas),
            _ => None,
        }
    }

    /// Flux along `axis` at one node. Fails with a reason when the state is
    /// outside the domain of the flux (Euler states with `rho <= 0` or `p <= 0`).
    pub fn flux(&self, u: &[f64], axis: usize, out: &mut [f64]) -> Result<(), String> {
        match self {
            Equation::Advection { velocity } => {
                out[0] = advection_flux(u[0], velocity[axis]);
                Ok(())
            }
            Equation::Burgers => {
                // multi-dimensional Burgers transports along the diagonal
                out[0] = burgers_flux(u[0]);
                Ok(())
            }
            Equation::Euler(gas) => gas.flux(u, axis, out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_fluxes() {
        assert_eq!(burgers_flux(2.0), 2.0);
        assert_eq!(advection_flux(0.5, 1.0), 0.5);
        for u in [-3.0, -0.5, 0.0, 1.25] {
            assert_eq!(burgers_flux(-u), burgers_flux(u));
        }
    }
}
