//! Bijections between per-node admissible sets and unconstrained coordinates.

mod ball;
pub(crate) mod dual;
mod euler;
mod scalar;

pub use ball::{ball2_to_cube, square_to_disk};
pub use euler::EulerBounds;
pub use scalar::{
    one_sided_derivative, one_sided_forward, one_sided_inverse, two_sided_derivative, two_sided_forward,
    two_sided_inverse, ATANH_CLAMP, EXP_LIMIT,
};

use crate::error::{Error, Result};
use dual::Dual;

/// Default relative widening applied to every set before mapping.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

const DEGENERATE_WIDTH: f64 = 1e-14;

/// Per-node admissible set.
#[derive(Debug, Clone, PartialEq)]
pub enum AdmissibleSet {
    /// No constraint; the map is the identity.
    Unbounded,
    /// `u[k] > lower[k]` for every component.
    OneSided { lower: Vec<f64> },
    /// `lower[k] < u[k] < upper[k]`; a width below `1e-14` freezes the component.
    Interval { lower: Vec<f64>, upper: Vec<f64> },
    /// `|(u[i], u[j])| < radius` for `components = [i, j]`; other components are free.
    Ball2 { radius: f64, components: [usize; 2] },
    /// Euler density bounds and entropy floor.
    EulerIdp(EulerBounds),
}

impl AdmissibleSet {
    pub fn validate(&self) -> Result<()> {
        match self {
            AdmissibleSet::Unbounded => Ok(()),
            AdmissibleSet::OneSided { lower } => {
                if lower.iter().any(|a| !a.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite lower bound".into()));
                }
                Ok(())
            }
            AdmissibleSet::Interval { lower, upper } => {
                if lower.len() != upper.len() {
                    return Err(Error::InvalidArgument("interval bound lengths differ".into()));
                }
                for (k, (a, b)) in lower.iter().zip(upper).enumerate() {
                    if !(a.is_finite() && b.is_finite() && b >= a) {
                        return Err(Error::InvalidArgument(format!(
                            "interval component {k} has bounds ({a}, {b})"
                        )));
                    }
                }
                Ok(())
            }
            AdmissibleSet::Ball2 { radius, components } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "ball radius must be positive, got {radius}"
                    )));
                }
                if components[0] == components[1] {
                    return Err(Error::InvalidArgument("ball components must differ".into()));
                }
                Ok(())
            }
            AdmissibleSet::EulerIdp(b) => {
                let checked = EulerBounds::new(b.rho_min, b.rho_max, b.psi_min, b.gas)?;
                if b.energy_max.is_finite() {
                    checked.with_energy_max(b.energy_max)?;
                }
                Ok(())
            }
        }
    }

    /// Relaxes the set by the relative tolerance `eps`.
    ///
    /// One-sided lower bounds and ball radii are left unchanged so that
    /// strict positivity constraints stay strict.
    pub fn widen(&self, eps: f64) -> AdmissibleSet {
        match self {
            AdmissibleSet::Interval { lower, upper } => {
                let (lower, upper) = lower
                    .iter()
                    .zip(upper)
                    .map(|(&a, &b)| {
                        let pad = eps * (b - a).max(1.0);
                        (a - pad, b + pad)
                    })
                    .unzip();
                AdmissibleSet::Interval { lower, upper }
            }
            AdmissibleSet::EulerIdp(b) => AdmissibleSet::EulerIdp(b.widen(eps)),
            other => other.clone(),
        }
    }

    /// Signed distance to the nearest defining inequality (positive inside,
    /// `+inf` when unconstrained). Frozen interval components are ignored.
    pub fn margin(&self, u: &[f64]) -> f64 {
        match self {
            AdmissibleSet::Unbounded => f64::INFINITY,
            AdmissibleSet::OneSided { lower } => u.iter().zip(lower).fold(f64::INFINITY, |m, (x, a)| m.min(x - a)),
            AdmissibleSet::Interval { lower, upper } => {
                let mut m = f64::INFINITY;
                for ((x, a), b) in u.iter().zip(lower).zip(upper) {
                    if b - a < DEGENERATE_WIDTH {
                        continue;
                    }
                    m = m.min(x - a).min(b - x);
                }
                m
            }
            AdmissibleSet::Ball2 { radius, components } => radius - u[components[0]].hypot(u[components[1]]),
            AdmissibleSet::EulerIdp(b) => b.margin(u),
        }
    }

    /// Strict membership; non-finite states are never members.
    pub fn contains(&self, u: &[f64]) -> bool {
        u.iter().all(|v| v.is_finite()) && self.margin(u) > 0.0
    }
}

/// A set together with its bijection `G` onto `R^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsMapping {
    set: AdmissibleSet,
}

impl BoundsMapping {
    /// Builds the mapping for `set` widened by `tolerance`.
    pub fn new(set: AdmissibleSet, tolerance: f64) -> Result<Self> {
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be >= 0, got {tolerance}"
            )));
        }
        set.validate()?;
        Ok(Self {
            set: set.widen(tolerance),
        })
    }

    pub fn identity() -> Self {
        Self {
            set: AdmissibleSet::Unbounded,
        }
    }

    /// The widened set the map is defined on.
    pub fn set(&self) -> &AdmissibleSet {
        &self.set
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.set, AdmissibleSet::Unbounded)
    }

    /// `w = G(u)`.
    pub fn forward(&self, u: &[f64], w: &mut [f64]) -> Result<()> {
        match &self.set {
            AdmissibleSet::Unbounded => w.copy_from_slice(u),
            AdmissibleSet::OneSided { lower } => {
                for ((wk, &x), &a) in w.iter_mut().zip(u).zip(lower) {
                    *wk = one_sided_forward(x, a)?;
                }
            }
            AdmissibleSet::Interval { lower, upper } => {
                for (k, wk) in w.iter_mut().enumerate() {
                    let (a, b) = (lower[k], upper[k]);
                    *wk = if b - a < DEGENERATE_WIDTH {
                        0.0
                    } else {
                        two_sided_forward(u[k], a, b)?
                    };
                }
            }
            AdmissibleSet::Ball2 {
                radius,
                components: [i, j],
            } => {
                w.copy_from_slice(u);
                let z = ball2_to_cube([u[*i], u[*j]], *radius)?;
                w[*i] = clamped_atanh(z[0]);
                w[*j] = clamped_atanh(z[1]);
            }
            AdmissibleSet::EulerIdp(b) => b.forward(u, w)?,
        }
        Ok(())
    }

    /// `u = G^{-1}(w)`, strictly inside the widened set.
    ///
    /// Bounded directions saturate at the bounds for any finite `w`; a
    /// coordinate along an unbounded direction above [`EXP_LIMIT`] is reported
    /// as [`Error::StepTooLarge`], as is any non-finite coordinate.
    pub fn inverse(&self, w: &[f64], u: &mut [f64]) -> Result<()> {
        if let Some(k) = w.iter().position(|x| !x.is_finite()) {
            return Err(Error::StepTooLarge {
                node: usize::MAX,
                component: k,
                value: w[k],
            });
        }
        match &self.set {
            AdmissibleSet::Unbounded => u.copy_from_slice(w),
            AdmissibleSet::OneSided { lower } => {
                if let Some(k) = w.iter().position(|&x| x > EXP_LIMIT) {
                    return Err(Error::StepTooLarge {
                        node: usize::MAX,
                        component: k,
                        value: w[k],
                    });
                }
                for ((uk, &x), &a) in u.iter_mut().zip(w).zip(lower) {
                    *uk = one_sided_inverse(x, a);
                }
            }
            AdmissibleSet::Interval { lower, upper } => {
                for (k, uk) in u.iter_mut().enumerate() {
                    let (a, b) = (lower[k], upper[k]);
                    *uk = if b - a < DEGENERATE_WIDTH {
                        0.5 * (a + b)
                    } else {
                        two_sided_inverse(w[k], a, b)
                    };
                }
            }
            AdmissibleSet::Ball2 {
                radius,
                components: [i, j],
            } => {
                u.copy_from_slice(w);
                let p = square_to_disk([w[*i].tanh(), w[*j].tanh()], *radius);
                let norm = p[0].hypot(p[1]);
                let scale = if norm < *radius {
                    1.0
                } else {
                    radius.next_down() / norm * (1.0 - f64::EPSILON)
                };
                u[*i] = p[0] * scale;
                u[*j] = p[1] * scale;
            }
            AdmissibleSet::EulerIdp(b) => b.inverse(w, u)?,
        }
        Ok(())
    }

    /// `G'(u) v` from closed-form derivatives.
    pub fn jvp(&self, u: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        match &self.set {
            AdmissibleSet::Unbounded => out.copy_from_slice(v),
            AdmissibleSet::OneSided { lower } => {
                for k in 0..out.len() {
                    if !(u[k] > lower[k]) {
                        return Err(Error::domain("u > a", format!("u={}, a={}", u[k], lower[k])));
                    }
                    out[k] = one_sided_derivative(u[k], lower[k]) * v[k];
                }
            }
            AdmissibleSet::Interval { lower, upper } => {
                for k in 0..out.len() {
                    let (a, b) = (lower[k], upper[k]);
                    if b - a < DEGENERATE_WIDTH {
                        out[k] = 0.0;
                        continue;
                    }
                    if !(u[k] > a && u[k] < b) {
                        return Err(Error::domain("a < u < b", format!("u={}, a={a}, b={b}", u[k])));
                    }
                    out[k] = two_sided_derivative(u[k], a, b) * v[k];
                }
            }
            AdmissibleSet::Ball2 {
                radius,
                components: [i, j],
            } => {
                out.copy_from_slice(v);
                let norm = u[*i].hypot(u[*j]);
                if !(norm < *radius) {
                    return Err(Error::domain("|u| < r0", format!("|u|={norm}, r0={radius}")));
                }
                let z = ball::disk_to_square([Dual::new(u[*i], v[*i]), Dual::new(u[*j], v[*j])], *radius)?;
                out[*i] = atanh_dual(z[0]);
                out[*j] = atanh_dual(z[1]);
            }
            AdmissibleSet::EulerIdp(b) => b.jvp(u, v, out)?,
        }
        Ok(())
    }
}

fn clamped_atanh(z: f64) -> f64 {
    let x = z.clamp(-ATANH_CLAMP, ATANH_CLAMP);
    0.5 * ((1.0 + x) / (1.0 - x)).ln()
}

fn atanh_dual(z: Dual) -> f64 {
    let x = z.v.clamp(-ATANH_CLAMP, ATANH_CLAMP);
    z.d / (1.0 - x * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::Gas;

    #[test]
    fn identity_jvp_returns_direction() {
        let map = BoundsMapping::identity();
        let mut out = [0.0; 2];
        map.jvp(&[1.0, 2.0], &[3.0, -4.0], &mut out).unwrap();
        assert_eq!(out, [3.0, -4.0]);
    }

    #[test]
    fn one_sided_jvp_example() {
        let map = BoundsMapping::new(AdmissibleSet::OneSided { lower: vec![0.0] }, 0.0).unwrap();
        let mut out = [0.0];
        map.jvp(&[2.0], &[3.0], &mut out).unwrap();
        assert_eq!(out[0], 1.5);
    }

    #[test]
    fn widening_intervals_and_euler() {
        let set = AdmissibleSet::Interval {
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 4.0],
        };
        match set.widen(1e-6) {
            AdmissibleSet::Interval { lower, upper } => {
                assert_eq!(lower, vec![-1e-6, -4e-6]);
                assert_eq!(upper, vec![1.0 + 1e-6, 4.0 + 4e-6]);
            }
            _ => unreachable!(),
        }
        let gas = Gas::new(1.4, 1).unwrap();
        let e = EulerBounds::new(0.0, 2.0, 0.5, gas).unwrap().widen(1e-6);
        assert_eq!(e.rho_min, 0.0);
        assert_eq!(e.rho_max, 2.0 + 2e-6);
        assert_eq!(e.psi_min, 0.5 - 1e-6);
    }

    #[test]
    fn degenerate_interval_is_frozen() {
        let set = AdmissibleSet::Interval {
            lower: vec![0.5],
            upper: vec![0.5],
        };
        let map = BoundsMapping::new(set, 0.0).unwrap();
        let mut w = [1.0];
        map.forward(&[0.5], &mut w).unwrap();
        assert_eq!(w[0], 0.0);
        let mut u = [0.0];
        map.inverse(&[3.0], &mut u).unwrap();
        assert_eq!(u[0], 0.5);
        let mut jv = [1.0];
        map.jvp(&[0.5], &[2.0], &mut jv).unwrap();
        assert_eq!(jv[0], 0.0);
    }

    #[test]
    fn ball_inverse_stays_inside_when_saturated() {
        let set = AdmissibleSet::Ball2 {
            radius: 1.0,
            components: [0, 1],
        };
        let map = BoundsMapping::new(set.clone(), 0.0).unwrap();
        let mut u = [0.0; 3];
        map.inverse(&[40.0, 40.0, 7.0], &mut u).unwrap();
        assert!(set.contains(&u));
        assert_eq!(u[2], 7.0);
    }

    #[test]
    fn rejects_invalid_sets() {
        let bad = AdmissibleSet::Interval {
            lower: vec![1.0],
            upper: vec![0.0],
        };
        assert!(BoundsMapping::new(bad, 1e-6).is_err());
        let ball = AdmissibleSet::Ball2 {
            radius: 0.0,
            components: [0, 1],
        };
        assert!(BoundsMapping::new(ball, 1e-6).is_err());
    }
}
