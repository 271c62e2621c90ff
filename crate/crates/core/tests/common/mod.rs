//! Oracles and samplers shared by the property suites and the acceptance run.
#![allow(dead_code)]

use bprk::mappings::{BoundsMapping, EulerBounds};
use bprk::physics::Gas;

pub fn round_trip_error(map: &BoundsMapping, u: &[f64]) -> f64 {
    let mut w = vec![0.0; u.len()];
    let mut back = vec![0.0; u.len()];
    map.forward(u, &mut w).unwrap();
    map.inverse(&w, &mut back).unwrap();
    let scale = 1.0 + u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    back.iter().zip(u).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())) / scale
}

/// Largest relative mismatch between `G'(u) v` and a central difference,
/// at the best step of a decreasing ladder that stays inside the set.
pub fn jvp_mismatch(map: &BoundsMapping, u: &[f64], v: &[f64]) -> f64 {
    let m = u.len();
    let mut exact = vec![0.0; m];
    map.jvp(u, v, &mut exact).unwrap();
    let norm = exact.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
    let size = 1.0 + u.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let shifted = |h: f64| {
        let p: Vec<f64> = u.iter().zip(v).map(|(x, d)| x + h * d).collect();
        let mut w = vec![0.0; m];
        map.forward(&p, &mut w).ok().map(|_| w)
    };
    (4..=12)
        .filter_map(|k| {
            let h = size * 10f64.powi(-k);
            let (plus, minus) = (shifted(h)?, shifted(-h)?);
            Some(
                (0..m)
                    .map(|c| ((plus[c] - minus[c]) / (2.0 * h) - exact[c]).abs() / norm)
                    .fold(0.0, f64::max),
            )
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
    v.iter().map(|x| x / n).collect()
}

/// Euler bounds and a state inside them, built from fractions of the admissible ranges.
#[allow(clippy::too_many_arguments)]
pub fn euler_case(
    dims: usize,
    rho_min: f64,
    width: f64,
    psi_min: f64,
    rho_frac: f64,
    slack: f64,
    momentum: [f64; 2],
    cap_room: Option<f64>,
) -> (EulerBounds, Vec<f64>) {
    let gas = Gas::new(1.4, dims).unwrap();
    let rho_max = rho_min + width;
    let rho = rho_min + rho_frac * width;
    let m = &momentum[..dims];
    let msq: f64 = m.iter().map(|x| x * x).sum();
    let energy = rho.powf(1.4) * psi_min + slack + 0.5 * msq / rho;
    let mut u = vec![rho];
    u.extend_from_slice(m);
    u.push(energy);
    let mut b = EulerBounds::new(rho_min, rho_max, psi_min, gas).unwrap();
    if let Some(room) = cap_room {
        let top = rho_max.powf(1.4) * psi_min;
        b = b.with_energy_max(energy.max(top) + room).unwrap();
    }
    (b, u)
}

/// Euler state `[rho, m.., E]` with the given slack and a unit direction.
pub fn euler_ray(dims: usize, rho: f64, slack: f64, momentum: [f64; 2], dir: [f64; 4]) -> (Vec<f64>, Vec<f64>) {
    let m = &momentum[..dims];
    let msq: f64 = m.iter().map(|x| x * x).sum();
    let mut u = vec![rho];
    u.extend_from_slice(m);
    u.push(slack + 0.5 * msq / rho);
    (u, unit(&dir[..dims + 2]))
}

/// `rho E - |m|^2 / 2` along `u + alpha n`.
pub fn internal(u: &[f64], n: &[f64], alpha: f64) -> f64 {
    let ie = u.len() - 1;
    let at = |k: usize| u[k] + alpha * n[k];
    at(0) * at(ie) - 0.5 * (1..ie).map(|k| at(k) * at(k)).sum::<f64>()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First positive zero of the internal energy along the ray, by bracketing.
pub fn oracle_root(u: &[f64], n: &[f64]) -> f64 {
    let f = |a: f64| internal(u, n, a);
    let curvature = 0.5 * (f(1.0) + f(-1.0) - 2.0 * f(0.0));
    let slope = 0.5 * (f(1.0) - f(-1.0));
    if curvature > 0.0 {
        let vertex = -slope / (2.0 * curvature);
        if vertex > 0.0 && f(vertex) <= 0.0 {
            return bisect(f, 0.0, vertex);
        }
        return f64::INFINITY;
    }
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    bisect(f, 0.0, hi)
}

/// Whether the closed-form root agrees with the bracketing oracle.
pub fn quadratic_matches_oracle(closed: f64, u: &[f64], n: &[f64]) -> bool {
    let oracle = oracle_root(u, n);
    if oracle.is_infinite() {
        closed.is_infinite() || internal(u, n, closed).abs() <= 1e-8 * (1.0 + closed * closed)
    } else {
        (closed - oracle).abs() <= 1e-8 * (1.0 + oracle)
    }
}
