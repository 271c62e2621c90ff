//! Global mass defect and its redistribution inside the admissible sets.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::GridState;
use crate::mappings::{AdmissibleSet, EulerBounds};
use crate::stepper::{BpOptions, GammaMode};
use crate::sum::neumaier;

/// Relative cap applied to unbounded distances before pooling.
pub const GAMMA_CAP: f64 = 1e12;

/// `S = sum_i m_i (u_i^n - u_bar_i)` with its norm and unit direction.
#[derive(Debug, Clone, PartialEq)]
pub struct MassDefect {
    pub s_bar: Vec<f64>,
    /// `S / |S|`, or zeros when `|S| = 0`.
    pub direction: Vec<f64>,
    pub norm: f64,
}

pub fn mass_defect(u_n: &GridState, u_bar: &GridState) -> MassDefect {
    let m = u_n.components();
    let w = u_n.grid().weight();
    let s_bar: Vec<f64> = (0..m)
        .map(|c| {
            let diffs = u_n
                .values()
                .iter()
                .zip(u_bar.values())
                .skip(c)
                .step_by(m)
                .map(|(a, b)| a - b);
            w * neumaier(diffs)
        })
        .collect();
    let norm = s_bar.iter().map(|s| s * s).sum::<f64>().sqrt();
    let direction = if norm > 0.0 {
        s_bar.iter().map(|s| s / norm).collect()
    } else {
        vec![0.0; m]
    };
    MassDefect { s_bar, direction, norm }
}

/// Distance from `u_bar` to the end of `[lower, upper]` along the sign of the defect.
pub fn gamma_star_dmp(u_bar: f64, lower: f64, upper: f64, nonnegative: bool) -> Result<f64> {
    if !(u_bar >= lower && u_bar <= upper) {
        return Err(Error::Consistency(format!(
            "value {u_bar} outside its interval ({lower}, {upper})"
        )));
    }
    Ok(if nonnegative { upper - u_bar } else { u_bar - lower })
}

/// Distance along `n` to the density bounds; `+inf` when `n` has no density part.
pub fn gamma_star_density(u_bar: &[f64], n: &[f64], bounds: &EulerBounds) -> f64 {
    let n1 = n[0];
    if n1 == 0.0 {
        f64::INFINITY
    } else if n1 > 0.0 {
        (bounds.rho_max - u_bar[0]) / n1
    } else {
        (u_bar[0] - bounds.rho_min) / -n1
    }
}

/// Distance along `n` to the energy cap; `+inf` when uncapped or `n` lowers the energy.
pub fn gamma_star_energy(u_bar: &[f64], n: &[f64], bounds: &EulerBounds) -> f64 {
    let ie = u_bar.len() - 1;
    if n[ie] > 0.0 && bounds.energy_max.is_finite() {
        (bounds.energy_max - u_bar[ie]) / n[ie]
    } else {
        f64::INFINITY
    }
}

/// First positive root of `rho e` along `u + alpha n`, i.e. of
/// `a alpha^2 + b alpha + c` with `c = rho E - |m|^2/2` at `alpha = 0`.
/// `+inf` when the internal energy stays positive along the ray.
pub fn gamma_star_quadratic(u_bar: &[f64], n: &[f64]) -> f64 {
    let ie = u_bar.len() - 1;
    let momenta = 1..ie;
    let a = n[0] * n[ie] - 0.5 * momenta.clone().map(|k| n[k] * n[k]).sum::<f64>();
    let b = n[0] * u_bar[ie] + u_bar[0] * n[ie] - momenta.clone().map(|k| n[k] * u_bar[k]).sum::<f64>();
    let c = u_bar[0] * u_bar[ie] - 0.5 * momenta.map(|k| u_bar[k] * u_bar[k]).sum::<f64>();
    smallest_positive_root(a, b, c)
}

fn smallest_positive_root(a: f64, b: f64, c: f64) -> f64 {
    if a.abs() < 1e-14 * (b.abs() + 1.0) {
        return if b < 0.0 { -c / b } else { f64::INFINITY };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return f64::INFINITY;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let roots = [q / a, if q != 0.0 { c / q } else { f64::NAN }];
    roots.into_iter().filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min)
}

/// Smallest of the density, energy-cap and internal-energy distances, an
/// upper bound on the exact distance.
pub fn gamma_double_star(u_bar: &[f64], n: &[f64], bounds: &EulerBounds) -> f64 {
    gamma_star_density(u_bar, n, bounds)
        .min(gamma_star_energy(u_bar, n, bounds))
        .min(gamma_star_quadratic(u_bar, n))
}

/// Root bracketing scheme for the numeric distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootMethod {
    #[default]
    Bisection,
    Illinois,
}

impl FromStr for RootMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bisection" => Ok(RootMethod::Bisection),
            "illinois" => Ok(RootMethod::Illinois),
            other => Err(Error::Config(format!(
                "unknown root_method '{other}' (expected bisection or illinois)"
            ))),
        }
    }
}

impl fmt::Display for RootMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootMethod::Bisection => "bisection",
            RootMethod::Illinois => "illinois",
        })
    }
}

/// Closed-form distance from `u_bar` along `n` to the boundary of `set`
/// (exact for intervals, one-sided sets and disks; an upper bound for Euler sets).
pub fn gamma_star_analytic(set: &AdmissibleSet, u_bar: &[f64], n: &[f64]) -> f64 {
    match set {
        AdmissibleSet::Unbounded => f64::INFINITY,
        AdmissibleSet::OneSided { lower } => u_bar
            .iter()
            .zip(n)
            .zip(lower)
            .filter(|((_, nk), _)| **nk < 0.0)
            .map(|((u, nk), a)| (u - a) / -nk)
            .fold(f64::INFINITY, f64::min),
        AdmissibleSet::Interval { lower, upper } => {
            let mut g = f64::INFINITY;
            for k in 0..u_bar.len() {
                let nk = n[k];
                if nk == 0.0 {
                    continue;
                }
                let d = if nk > 0.0 {
                    (upper[k] - u_bar[k]) / nk
                } else {
                    (u_bar[k] - lower[k]) / -nk
                };
                g = g.min(d.max(0.0));
            }
            g
        }
        AdmissibleSet::Ball2 {
            radius,
            components: [i, j],
        } => {
            let (p, d) = ([u_bar[*i], u_bar[*j]], [n[*i], n[*j]]);
            let dd = d[0] * d[0] + d[1] * d[1];
            if dd == 0.0 {
                return f64::INFINITY;
            }
            let pd = p[0] * d[0] + p[1] * d[1];
            let slack = radius * radius - (p[0] * p[0] + p[1] * p[1]);
            let disc = (pd * pd + dd * slack.max(0.0)).sqrt();
            // positive root of dd a^2 + 2 pd a - slack = 0
            if pd > 0.0 {
                slack.max(0.0) / (pd + disc)
            } else {
                (disc - pd) / dd
            }
        }
        AdmissibleSet::EulerIdp(b) => gamma_double_star(u_bar, n, b),
    }
}

/// Largest certified-feasible `alpha` in `[0, upper]` such that `u_bar + alpha n`
/// lies strictly inside `set`, from `iterations` bracketing steps.
pub fn gamma_star_numeric(
    set: &AdmissibleSet,
    u_bar: &[f64],
    n: &[f64],
    upper: f64,
    iterations: usize,
    method: RootMethod,
) -> f64 {
    let mut probe = vec![0.0; u_bar.len()];
    let mut margin = |alpha: f64| -> f64 {
        for ((p, u), d) in probe.iter_mut().zip(u_bar).zip(n) {
            *p = u + alpha * d;
        }
        if probe.iter().all(|v| v.is_finite()) {
            set.margin(&probe)
        } else {
            f64::NEG_INFINITY
        }
    };
    let (mut lo, mut hi) = (0.0, upper);
    let mut f_lo = margin(lo);
    if !(f_lo > 0.0) {
        return 0.0;
    }
    let mut f_hi = margin(hi);
    if f_hi > 0.0 {
        return hi;
    }
    let mut side = 0i8;
    for _ in 0..iterations {
        let mid = match method {
            RootMethod::Bisection => 0.5 * (lo + hi),
            RootMethod::Illinois => {
                let x = if f_hi.is_finite() {
                    (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
                } else {
                    f64::NAN
                };
                if x > lo && x < hi {
                    x
                } else {
                    0.5 * (lo + hi)
                }
            }
        };
        let f_mid = margin(mid);
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = mid;
            f_hi = f_mid;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }
    lo
}

/// What the correction did in one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorrectionInfo {
    /// The analytic lengths left a node outside its set and were recomputed.
    pub fallback_triggered: bool,
    /// Nodes outside their sets after the analytic attempt.
    pub violations: usize,
    /// `sum_j m_j gamma*_j`.
    pub pooled: f64,
}

/// Per-node distances and the lengths actually applied.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaResult {
    pub gamma_star: Vec<f64>,
    pub gamma: Vec<f64>,
}

fn cap(u: &[f64]) -> f64 {
    GAMMA_CAP * (1.0 + u.iter().fold(0.0_f64, |a, v| a.max(v.abs())))
}

fn distances(u_bar: &GridState, n: &[f64], sets: &[&AdmissibleSet], numeric: Option<&BpOptions>) -> Vec<f64> {
    let m = u_bar.components();
    u_bar
        .values()
        .chunks_exact(m)
        .zip(sets)
        .map(|(u, set)| {
            let limit = cap(u);
            let analytic = gamma_star_analytic(set, u, n).min(limit);
            match numeric {
                None => analytic,
                Some(opts) => gamma_star_numeric(set, u, n, analytic, opts.root_iterations, opts.root_method),
            }
        })
        .collect()
}

/// `u_i = u_bar_i + gamma_i n` with `gamma_i = gamma*_i |S| / sum_j m_j gamma*_j`.
pub fn apply_correction(
    u_bar: &GridState,
    defect: &MassDefect,
    gamma_star: &[f64],
) -> Result<(GridState, GammaResult)> {
    let mut out = u_bar.clone();
    if defect.norm == 0.0 {
        return Ok((
            out,
            GammaResult {
                gamma_star: gamma_star.to_vec(),
                gamma: vec![0.0; gamma_star.len()],
            },
        ));
    }
    let pooled = u_bar.grid().weight() * neumaier(gamma_star.iter().copied());
    if !(pooled > 0.0 && pooled.is_finite()) || pooled < defect.norm {
        return Err(Error::CorrectionInfeasible {
            defect_norm: defect.norm,
            pooled,
        });
    }
    let ratio = defect.norm / pooled;
    let m = u_bar.components();
    let gamma: Vec<f64> = gamma_star.iter().map(|g| g * ratio).collect();
    for (u, g) in out.values_mut().chunks_exact_mut(m).zip(&gamma) {
        for (x, d) in u.iter_mut().zip(&defect.direction) {
            *x += g * d;
        }
    }
    Ok((
        out,
        GammaResult {
            gamma_star: gamma_star.to_vec(),
            gamma,
        },
    ))
}

/// Restores the totals of `u_n` in `u_bar` according to `opts.gamma_mode`.
/// `sets` are the widened per-node sets.
pub fn correct(
    u_n: &GridState,
    u_bar: &GridState,
    sets: &[&AdmissibleSet],
    opts: &BpOptions,
) -> Result<(GridState, MassDefect, CorrectionInfo)> {
    let defect = mass_defect(u_n, u_bar);
    let mut info = CorrectionInfo::default();
    if defect.norm == 0.0 {
        return Ok((u_bar.clone(), defect, info));
    }
    let n = &defect.direction;
    let numeric = matches!(opts.gamma_mode, GammaMode::Numeric).then_some(opts);
    let gamma_star = distances(u_bar, n, sets, numeric);
    info.pooled = u_bar.grid().weight() * neumaier(gamma_star.iter().copied());
    let (mut next, _) = apply_correction(u_bar, &defect, &gamma_star)?;

    if opts.gamma_mode == GammaMode::AnalyticWithFallback {
        let m = u_bar.components();
        info.violations = next
            .values()
            .chunks_exact(m)
            .zip(sets)
            .filter(|(u, set)| !set.contains(u))
            .count();
        if info.violations > 0 {
            info.fallback_triggered = true;
            let gamma_star = distances(u_bar, n, sets, Some(opts));
            info.pooled = u_bar.grid().weight() * neumaier(gamma_star.iter().copied());
            next = apply_correction(u_bar, &defect, &gamma_star)?.0;
        }
    }
    Ok((next, defect, info))
}
