//! One- and two-sided scalar constraint maps.

use crate::error::{Error, Result};

/// Largest `|x|` fed to the two-sided logarithm, i.e. `atanh` clamped at `1 - 1e-15`.
pub const ATANH_CLAMP: f64 = 1.0 - 1e-15;

/// `w = log(u - a)`, defined for `u > a`.
pub fn one_sided_forward(u: f64, a: f64) -> Result<f64> {
    if !(u > a) {
        return Err(Error::domain("u > a", format!("u={u}, a={a}")));
    }
    Ok((u - a).ln())
}

/// Coordinates of exponential type beyond this value overflow `exp`.
pub const EXP_LIMIT: f64 = 700.0;

/// `u = exp(w) + a`, nudged to stay strictly above `a`.
pub fn one_sided_inverse(w: f64, a: f64) -> f64 {
    let u = w.exp() + a;
    if u > a {
        u
    } else {
        a.next_up()
    }
}

pub fn one_sided_derivative(u: f64, a: f64) -> f64 {
    1.0 / (u - a)
}

/// `w = atanh(2 (u - a)/(b - a) - 1)`, defined for `a < u < b`.
///
/// Evaluated as `(1/2) log((u - a)/(b - u))`, which is the same quantity with
/// the distances to each bound formed directly.
pub fn two_sided_forward(u: f64, a: f64, b: f64) -> Result<f64> {
    if !(u > a && u < b) {
        return Err(Error::domain("a < u < b", format!("u={u}, a={a}, b={b}")));
    }
    let (lo, hi) = clamped_distances(u, a, b);
    Ok(0.5 * (lo / hi).ln())
}

/// `u = (a + b)/2 + (b - a)/2 tanh(w)`, kept strictly inside `(a, b)`.
pub fn two_sided_inverse(w: f64, a: f64, b: f64) -> f64 {
    let width = b - a;
    // logistic form avoids rounding the distance to the near bound to zero
    let u = if w >= 0.0 {
        b - width / (1.0 + (2.0 * w).exp())
    } else {
        a + width / (1.0 + (-2.0 * w).exp())
    };
    if u >= b {
        b.next_down().max(a.next_up())
    } else if u <= a {
        a.next_up().min(b.next_down())
    } else {
        u
    }
}

/// `dG/du = (1/2) (1/(u - a) + 1/(b - u))`, with the same clamp as the forward map.
pub fn two_sided_derivative(u: f64, a: f64, b: f64) -> f64 {
    let (lo, hi) = clamped_distances(u, a, b);
    0.5 * (1.0 / lo + 1.0 / hi)
}

fn clamped_distances(u: f64, a: f64, b: f64) -> (f64, f64) {
    let floor = 0.5 * (b - a) * (1.0 - ATANH_CLAMP);
    ((u - a).max(floor), (b - u).max(floor))
}
