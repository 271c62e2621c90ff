//! Constraint maps for the Euler invariant set
//! `rho in (rho_min, rho_max)`, `E - rho^gamma psi_min - |m|^2/(2 rho) > 0`,
//! optionally capped by `E < energy_max`.
//!
//! With `q = E - rho^gamma psi_min` and disk radius `r0 = sqrt(2 rho q)`, the
//! coordinates are the two-sided density map, `atanh` of the elliptic
//! disk-to-square image of `m / r0`, and `log q` (or, under an energy cap,
//! the two-sided map of `E` over `(rho^gamma psi_min, energy_max)`). The
//! momentum coordinates are evaluated through `asinh` of `m / sqrt(2 rho s)` with slack
//! `s = q - |m|^2/(2 rho)`, which is the same quantity without the
//! cancellation in `1 - |m/r0|^2` near the boundary. Saturated momentum
//! coordinates therefore stay on the disk of radius `r0`.

use super::ball::square_to_disk;
use super::dual::Real;
use super::scalar::{two_sided_inverse, ATANH_CLAMP, EXP_LIMIT};
use crate::error::{Error, Result};
use crate::physics::Gas;

/// Per-node Euler bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerBounds {
    pub rho_min: f64,
    pub rho_max: f64,
    /// Floor on `e rho^-gamma`.
    pub psi_min: f64,
    /// Cap on the total energy; `+inf` leaves it free.
    pub energy_max: f64,
    pub gas: Gas,
}

/// Densities closer than this are treated as a frozen component.
pub(crate) const DEGENERATE_WIDTH: f64 = 1e-14;

impl EulerBounds {
    pub fn new(rho_min: f64, rho_max: f64, psi_min: f64, gas: Gas) -> Result<Self> {
        if !(rho_min >= 0.0 && rho_max >= rho_min && rho_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "density bounds must satisfy 0 <= rho_min <= rho_max, got ({rho_min}, {rho_max})"
            )));
        }
        if !(psi_min >= 0.0 && psi_min.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "entropy floor must be >= 0, got {psi_min}"
            )));
        }
        Ok(Self {
            rho_min,
            rho_max,
            psi_min,
            energy_max: f64::INFINITY,
            gas,
        })
    }

    /// Adds the cap `E < energy_max`, which must not lie below the floor at `rho_max`.
    pub fn with_energy_max(mut self, energy_max: f64) -> Result<Self> {
        let top = self.floor(self.rho_max);
        // rounding in the pooled maximum can leave the cap a few ulps low
        if !(energy_max >= top * (1.0 - 1e-12)) {
            return Err(Error::InvalidArgument(format!(
                "energy cap {energy_max} lies below the floor {} at rho_max",
                top
            )));
        }
        self.energy_max = energy_max.max(top);
        Ok(self)
    }

    /// Widens the density interval by `eps max(1, width)` without dropping
    /// below `eps rho_min`, lowers the entropy floor by `eps max(1, psi_min)`
    /// (kept non-negative) and raises a finite energy cap by `eps max(1, energy_max)`.
    pub fn widen(&self, eps: f64) -> Self {
        let pad = eps * (self.rho_max - self.rho_min).max(1.0);
        let mut out = Self {
            rho_min: (self.rho_min - pad).max(eps * self.rho_min),
            rho_max: self.rho_max + pad,
            psi_min: (self.psi_min - eps * self.psi_min.max(1.0)).max(0.0),
            energy_max: self.energy_max + eps * self.energy_max.max(1.0),
            gas: self.gas,
        };
        let top = out.floor(out.rho_max);
        if !(out.energy_max > top) {
            out.energy_max = top + eps * top.max(1.0);
        }
        out
    }

    fn frozen_density(&self) -> bool {
        self.rho_max - self.rho_min < DEGENERATE_WIDTH
    }

    /// Energy slack `E - rho^gamma psi_min - |m|^2/(2 rho)`.
    pub fn slack(&self, u: &[f64]) -> f64 {
        let d = self.gas.dims;
        let rho = u[0];
        let msq: f64 = u[1..=d].iter().map(|m| m * m).sum();
        u[d + 1] - self.floor(rho) - 0.5 * msq / rho
    }

    fn floor(&self, rho: f64) -> f64 {
        if self.psi_min == 0.0 {
            0.0
        } else {
            rho.powf(self.gas.gamma) * self.psi_min
        }
    }

    /// Smallest signed distance to the defining inequalities (positive inside).
    pub fn margin(&self, u: &[f64]) -> f64 {
        let rho = u[0];
        let density = if self.frozen_density() {
            f64::INFINITY
        } else {
            (rho - self.rho_min).min(self.rho_max - rho)
        };
        if !(rho > 0.0) {
            return density.min(rho);
        }
        let d = self.gas.dims;
        density.min(self.slack(u)).min(self.energy_max - u[d + 1])
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.iter().all(|v| v.is_finite()) && self.margin(u) > 0.0
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        let rho = u[0];
        if !self.frozen_density() && !(rho > self.rho_min && rho < self.rho_max) {
            return Err(Error::domain(
                "rho_min < rho < rho_max",
                format!("rho={rho}, bounds=({}, {})", self.rho_min, self.rho_max),
            ));
        }
        if !(rho > 0.0) {
            return Err(Error::domain("rho > 0", format!("rho={rho}")));
        }
        let e = u[self.gas.dims + 1];
        if !(e < self.energy_max) {
            return Err(Error::domain(
                "E < energy_max",
                format!("E={e}, cap={}", self.energy_max),
            ));
        }
        let s = self.slack(u);
        if !(s > 0.0) {
            return Err(Error::domain(
                "|m|^2 < 2 rho (E - rho^gamma psi_min)",
                format!("energy slack {s} at state {u:?}"),
            ));
        }
        Ok(())
    }

    pub fn forward(&self, u: &[f64], w: &mut [f64]) -> Result<()> {
        self.check(u)?;
        self.forward_generic(u, w);
        Ok(())
    }

    /// Tangent of the forward map along `v`, via forward-mode differentiation.
    pub fn jvp(&self, u: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        use super::dual::Dual;
        self.check(u)?;
        let m = u.len();
        let ud: Vec<Dual> = u.iter().zip(v).map(|(&x, &dx)| Dual::new(x, dx)).collect();
        let mut wd = vec![Dual::cst(0.0); m];
        self.forward_generic(&ud, &mut wd);
        for (o, w) in out.iter_mut().zip(&wd) {
            *o = w.d;
        }
        Ok(())
    }

    fn forward_generic<S: Real>(&self, u: &[S], w: &mut [S]) {
        let d = self.gas.dims;
        let rho = u[0];
        let msq = (1..=d).fold(S::cst(0.0), |acc, k| acc + u[k] * u[k]);
        let floor = if self.psi_min == 0.0 {
            S::cst(0.0)
        } else {
            rho.powf(self.gas.gamma) * S::cst(self.psi_min)
        };
        let q = u[d + 1] - floor;
        let mut s = q - S::cst(0.5) * msq / rho;
        // |m| / r0 at most ATANH_CLAMP, as for the scalar maps
        let s_min = q.value() * (1.0 - ATANH_CLAMP * ATANH_CLAMP);
        if s.value() < s_min {
            s = s.with_value(s_min);
        }

        w[0] = if self.frozen_density() {
            S::cst(0.0)
        } else {
            density_forward(rho, self.rho_min, self.rho_max)
        };
        w[d + 1] = if self.energy_max.is_finite() {
            capped_energy_forward(u[d + 1], floor, self.energy_max)
        } else {
            q.ln()
        };
        let scale = (S::cst(2.0) * rho * s).sqrt();
        if d == 1 {
            w[1] = (u[1] / scale).asinh();
        } else {
            let px = u[1] / scale;
            let py = u[2] / scale;
            let (a, b) = sinh_squares(px, py);
            w[1] = (px / (S::cst(1.0) + S::cst(0.5) * b).sqrt()).asinh();
            w[2] = (py / (S::cst(1.0) + S::cst(0.5) * a).sqrt()).asinh();
        }
    }

    /// Inverse map. Fails only when the energy coordinate overflows.
    pub fn inverse(&self, w: &[f64], u: &mut [f64]) -> Result<()> {
        let d = self.gas.dims;
        let capped = self.energy_max.is_finite();
        if (!capped && w[d + 1] > EXP_LIMIT) || w.iter().any(|x| !x.is_finite()) {
            let k = w.iter().position(|x| !x.is_finite()).unwrap_or(d + 1);
            return Err(Error::StepTooLarge {
                node: usize::MAX,
                component: k,
                value: w[k],
            });
        }
        let rho = if self.frozen_density() {
            0.5 * (self.rho_min + self.rho_max)
        } else {
            two_sided_inverse(w[0], self.rho_min, self.rho_max)
        };
        let floor = self.floor(rho);
        let (energy, q) = if capped {
            let e = two_sided_inverse(w[d + 1], floor, self.energy_max);
            (e, e - floor)
        } else {
            // keep E - floor representable after rounding
            let q = w[d + 1].exp().max(4.0 * f64::EPSILON * floor + f64::MIN_POSITIVE);
            (floor + q, q)
        };
        let r0 = (2.0 * rho * q).sqrt();
        let mut momentum = [0.0; 2];
        if d == 1 {
            momentum[0] = r0 * w[1].tanh();
        } else {
            let p = square_to_disk([w[1].tanh(), w[2].tanh()], 1.0);
            momentum = [r0 * p[0], r0 * p[1]];
        }
        u[0] = rho;
        u[d + 1] = energy;
        u[1..=d].copy_from_slice(&momentum[..d]);

        // saturated coordinates land on the disk edge; pull them strictly inside
        let mut shrink = f64::EPSILON;
        while !(self.slack(u) > 0.0) {
            let f = if shrink < 1.0 { 1.0 - shrink } else { 0.0 };
            for k in 0..d {
                u[k + 1] = momentum[k] * f;
            }
            if f == 0.0 {
                break;
            }
            shrink *= 2.0;
        }
        Ok(())
    }
}

/// `(1/2) log((E - floor)/(cap - E))` with the same clamp as the scalar map.
fn capped_energy_forward<S: Real>(e: S, floor: S, cap: f64) -> S {
    let width = cap - floor.value();
    let min = 0.5 * width * (1.0 - ATANH_CLAMP);
    let mut below = e - floor;
    let mut above = S::cst(cap) - e;
    if below.value() < min {
        below = below.with_value(min);
    }
    if above.value() < min {
        above = above.with_value(min);
    }
    S::cst(0.5) * (below / above).ln()
}

/// Two-sided density coordinate with the same clamp as the scalar map.
fn density_forward<S: Real>(rho: S, lo: f64, hi: f64) -> S {
    let floor = 0.5 * (hi - lo) * (1.0 - ATANH_CLAMP);
    let mut below = rho - S::cst(lo);
    let mut above = S::cst(hi) - rho;
    if below.value() < floor {
        below = below.with_value(floor);
    }
    if above.value() < floor {
        above = above.with_value(floor);
    }
    S::cst(0.5) * (below / above).ln()
}

/// Solves `p^2 = a (1 + b/2)`, `q^2 = b (1 + a/2)` for `a, b >= 0`
/// (the squared sinh of the two momentum coordinates).
fn sinh_squares<S: Real>(p: S, q: S) -> (S, S) {
    let p2 = p * p;
    let q2 = q * q;
    let diff = p2 - q2;
    let half = S::cst(0.5);
    let one = S::cst(1.0);
    let root = |lin: S, c: S| -> S {
        // positive root of x^2/2 + lin x - c = 0, both forms free of cancellation
        let disc = (lin * lin + S::cst(2.0) * c).sqrt();
        if lin.value() > 0.0 {
            S::cst(2.0) * c / (lin + disc)
        } else {
            disc - lin
        }
    };
    let a = root(one - half * diff, p2);
    let b = root(one + half * diff, q2);
    (a, b)
}
