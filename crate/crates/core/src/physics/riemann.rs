//! Exact Riemann solver for the one-dimensional Euler equations of an ideal
//! gas (Godunov-type, Newton iteration on the star-region pressure).

use crate::error::{Error, Result};

const PRESSURE_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 100;

/// Primitive state of the normal problem.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Side {
    rho: f64,
    u: f64,
    p: f64,
    c: f64,
}

/// Self-similar solution of a one-dimensional Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub p_star: f64,
    pub u_star: f64,
    /// Largest absolute outer signal speed of the wave fan.
    pub lambda_max: f64,
    left: Side,
    right: Side,
    gamma: f64,
}

impl Side {
    fn new(rho: f64, u: f64, p: f64, gamma: f64) -> Result<Self> {
        if !(rho > 0.0 && p > 0.0) || !u.is_finite() {
            return Err(Error::domain(
                "rho > 0 and p > 0",
                format!("Riemann state rho={rho}, u={u}, p={p}"),
            ));
        }
        Ok(Self {
            rho,
            u,
            p,
            c: (gamma * p / rho).sqrt(),
        })
    }

    /// Pressure function `f_K(p)` and its derivative.
    fn pressure_function(&self, p: f64, gamma: f64) -> (f64, f64) {
        if p > self.p {
            let a = 2.0 / ((gamma + 1.0) * self.rho);
            let b = (gamma - 1.0) / (gamma + 1.0) * self.p;
            let q = (a / (p + b)).sqrt();
            let f = (p - self.p) * q;
            let df = q * (1.0 - 0.5 * (p - self.p) / (p + b));
            (f, df)
        } else {
            let ratio = p / self.p;
            let f = 2.0 * self.c / (gamma - 1.0) * (ratio.powf((gamma - 1.0) / (2.0 * gamma)) - 1.0);
            let df = ratio.powf(-(gamma + 1.0) / (2.0 * gamma)) / (self.rho * self.c);
            (f, df)
        }
    }
}

/// Solves the Riemann problem with left/right primitive data `(rho, u, p)`.
pub fn exact_riemann(left: [f64; 3], right: [f64; 3], gamma: f64) -> Result<RiemannSolution> {
    let l = Side::new(left[0], left[1], left[2], gamma)?;
    let r = Side::new(right[0], right[1], right[2], gamma)?;
    let du = r.u - l.u;
    if 2.0 * (l.c + r.c) / (gamma - 1.0) <= du {
        return Err(Error::Vacuum);
    }

    let mut p = initial_guess(&l, &r, gamma);
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let (fl, dfl) = l.pressure_function(p, gamma);
        let (fr, dfr) = r.pressure_function(p, gamma);
        let mut next = p - (fl + fr + du) / (dfl + dfr);
        if !(next > 0.0) {
            next = 0.1 * p;
        }
        let change = 2.0 * (next - p).abs() / (next + p);
        p = next;
        if change < PRESSURE_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::RiemannNoConvergence(MAX_ITERATIONS));
    }

    let (fl, _) = l.pressure_function(p, gamma);
    let (fr, _) = r.pressure_function(p, gamma);
    let u_star = 0.5 * (l.u + r.u) + 0.5 * (fr - fl);

    let mut solution = RiemannSolution {
        p_star: p,
        u_star,
        lambda_max: 0.0,
        left: l,
        right: r,
        gamma,
    };
    let (s_left, s_right) = solution.outer_speeds();
    solution.lambda_max = s_left.abs().max(s_right.abs());
    Ok(solution)
}

/// Two-rarefaction estimate, falling back to the mean pressure.
fn initial_guess(l: &Side, r: &Side, gamma: f64) -> f64 {
    let z = (gamma - 1.0) / (2.0 * gamma);
    let num = l.c + r.c - 0.5 * (gamma - 1.0) * (r.u - l.u);
    let den = l.c / l.p.powf(z) + r.c / r.p.powf(z);
    let p = (num / den).powf(1.0 / z);
    if p.is_finite() && p > 0.0 {
        p
    } else {
        0.5 * (l.p + r.p)
    }
}

impl RiemannSolution {
    /// Outer wave speeds `(S_L, S_R)` bounding the fan.
    pub fn outer_speeds(&self) -> (f64, f64) {
        let g = self.gamma;
        let g1 = (g + 1.0) / (2.0 * g);
        let g2 = (g - 1.0) / (2.0 * g);
        let (l, r, p) = (&self.left, &self.right, self.p_star);
        let sl = if p > l.p {
            l.u - l.c * (g1 * p / l.p + g2).sqrt()
        } else {
            l.u - l.c
        };
        let sr = if p > r.p {
            r.u + r.c * (g1 * p / r.p + g2).sqrt()
        } else {
            r.u + r.c
        };
        (sl, sr)
    }

    /// Left wave head/tail speeds when it is a rarefaction.
    pub fn left_rarefaction_speeds(&self) -> Option<(f64, f64)> {
        let l = &self.left;
        if self.p_star > l.p {
            return None;
        }
        let c_star = l.c * (self.p_star / l.p).powf((self.gamma - 1.0) / (2.0 * self.gamma));
        Some((l.u - l.c, self.u_star - c_star))
    }

    /// Primitive `(rho, u, p)` at similarity coordinate `xi = x / t`.
    pub fn sample(&self, xi: f64) -> [f64; 3] {
        let g = self.gamma;
        let (l, r, ps, us) = (&self.left, &self.right, self.p_star, self.u_star);
        let gm = (g - 1.0) / (g + 1.0);
        if xi <= us {
            if ps > l.p {
                let sl = l.u - l.c * ((g + 1.0) / (2.0 * g) * ps / l.p + (g - 1.0) / (2.0 * g)).sqrt();
                if xi <= sl {
                    [l.rho, l.u, l.p]
                } else {
                    let ratio = ps / l.p;
                    [l.rho * (ratio + gm) / (gm * ratio + 1.0), us, ps]
                }
            } else {
                let head = l.u - l.c;
                let c_star = l.c * (ps / l.p).powf((g - 1.0) / (2.0 * g));
                let tail = us - c_star;
                if xi <= head {
                    [l.rho, l.u, l.p]
                } else if xi >= tail {
                    [l.rho * (ps / l.p).powf(1.0 / g), us, ps]
                } else {
                    let base = 2.0 / (g + 1.0) + gm / l.c * (l.u - xi);
                    [
                        l.rho * base.powf(2.0 / (g - 1.0)),
                        2.0 / (g + 1.0) * (l.c + (g - 1.0) / 2.0 * l.u + xi),
                        l.p * base.powf(2.0 * g / (g - 1.0)),
                    ]
                }
            }
        } else if ps > r.p {
            let sr = r.u + r.c * ((g + 1.0) / (2.0 * g) * ps / r.p + (g - 1.0) / (2.0 * g)).sqrt();
            if xi >= sr {
                [r.rho, r.u, r.p]
            } else {
                let ratio = ps / r.p;
                [r.rho * (ratio + gm) / (gm * ratio + 1.0), us, ps]
            }
        } else {
            let head = r.u + r.c;
            let c_star = r.c * (ps / r.p).powf((g - 1.0) / (2.0 * g));
            let tail = us + c_star;
            if xi >= head {
                [r.rho, r.u, r.p]
            } else if xi <= tail {
                [r.rho * (ps / r.p).powf(1.0 / g), us, ps]
            } else {
                let base = 2.0 / (g + 1.0) - gm / r.c * (r.u - xi);
                [
                    r.rho * base.powf(2.0 / (g - 1.0)),
                    2.0 / (g + 1.0) * (-r.c + (g - 1.0) / 2.0 * r.u + xi),
                    r.p * base.powf(2.0 * g / (g - 1.0)),
                ]
            }
        }
    }
}
