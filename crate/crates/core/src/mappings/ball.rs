//! Elliptic map between the open disk of radius `r0` and the open square `(-1, 1)^2`.

use std::f64::consts::SQRT_2;

use super::dual::Real;
use crate::error::{Error, Result};

/// Disk to square, `F(u)`, generic over the scalar type for tangent propagation.
pub(crate) fn disk_to_square<S: Real>(u: [S; 2], r0: f64) -> Result<[S; 2]> {
    let a = u[0] / S::cst(r0);
    let b = u[1] / S::cst(r0);
    let delta = a * a - b * b;
    let two = S::cst(2.0);
    let k = S::cst(2.0 * SQRT_2);
    let radicands = [
        two + delta + k * a,
        two + delta - k * a,
        two - delta + k * b,
        two - delta - k * b,
    ];
    if let Some(r) = radicands.iter().find(|r| !(r.value() >= 0.0)) {
        return Err(Error::domain(
            "non-negative elliptic radicand",
            format!("radicand {} at u/r0 = ({}, {})", r.value(), a.value(), b.value()),
        ));
    }
    let [pa, ma, pb, mb] = radicands.map(|r| r.sqrt());
    // (sqrt(P) - sqrt(M))/2 written without the cancellation
    let x = S::cst(SQRT_2) * a * two / (pa + ma);
    let y = S::cst(SQRT_2) * b * two / (pb + mb);
    Ok([x, y])
}

/// Square to disk, `F^{-1}(z) = r0 (z1 sqrt(1 - z2^2/2), z2 sqrt(1 - z1^2/2))`.
pub fn square_to_disk(z: [f64; 2], r0: f64) -> [f64; 2] {
    [
        r0 * z[0] * (1.0 - 0.5 * z[1] * z[1]).sqrt(),
        r0 * z[1] * (1.0 - 0.5 * z[0] * z[0]).sqrt(),
    ]
}

/// Maps a point of the open disk `|u| < r0` into `(-1, 1)^2`.
pub fn ball2_to_cube(u: [f64; 2], r0: f64) -> Result<[f64; 2]> {
    if !(r0 > 0.0) {
        return Err(Error::domain("r0 > 0", format!("r0={r0}")));
    }
    let norm = u[0].hypot(u[1]);
    if !(norm < r0) {
        return Err(Error::domain("|u| < r0", format!("|u|={norm}, r0={r0}")));
    }
    disk_to_square(u, r0)
}
