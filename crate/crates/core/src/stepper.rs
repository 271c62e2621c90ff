//! Explicit Runge–Kutta steps, plain and bounds preserving.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::GridState;
use crate::mappings::BoundsMapping;
use crate::mass_correction::{correct, CorrectionInfo, RootMethod};
use crate::tableau::ButcherTableau;

/// Semidiscrete right-hand side `L(u, t)` over the full grid.
pub trait Rhs {
    fn eval(&mut self, u: &[f64], t: f64, out: &mut [f64]) -> Result<()>;
}

impl<F> Rhs for F
where
    F: FnMut(&[f64], f64, &mut [f64]) -> Result<()>,
{
    fn eval(&mut self, u: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        self(u, t, out)
    }
}

/// How the per-node correction lengths are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaMode {
    /// Closed-form upper bound on the set distance.
    Analytic,
    /// Root bracketing on the exact set membership.
    Numeric,
    /// Closed form, recomputed numerically when a node leaves its set.
    #[default]
    AnalyticWithFallback,
}

impl FromStr for GammaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(GammaMode::Analytic),
            "numeric" => Ok(GammaMode::Numeric),
            "analytic_with_fallback" => Ok(GammaMode::AnalyticWithFallback),
            other => Err(Error::Config(format!(
                "unknown gamma_mode '{other}' (expected analytic, numeric or analytic_with_fallback)"
            ))),
        }
    }
}

impl fmt::Display for GammaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GammaMode::Analytic => "analytic",
            GammaMode::Numeric => "numeric",
            GammaMode::AnalyticWithFallback => "analytic_with_fallback",
        })
    }
}

/// Options of the bounds-preserving step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpOptions {
    pub gamma_mode: GammaMode,
    pub root_method: RootMethod,
    pub root_iterations: usize,
}

impl Default for BpOptions {
    fn default() -> Self {
        Self {
            gamma_mode: GammaMode::default(),
            root_method: RootMethod::Bisection,
            root_iterations: 5,
        }
    }
}

/// Per-step diagnostics of [`bprk_step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    /// Component-wise mass defect before correction.
    pub defect: Vec<f64>,
    pub defect_norm: f64,
    /// `sum_i m_i u_i^{n+1} - sum_i m_i u_i^n` per component.
    pub mass_residual: Vec<f64>,
    /// Smallest margin of the corrected state to its widened set.
    pub min_bound_distance: f64,
    pub correction: CorrectionInfo,
}

/// `out = base + dt * sum_k coeff[k] * stages[k]`, summed in stage order.
fn accumulate(base: &[f64], coeffs: &[f64], stages: &[Vec<f64>], dt: f64, out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut incr = 0.0;
        for (c, k) in coeffs.iter().zip(stages) {
            if *c != 0.0 {
                incr += c * k[i];
            }
        }
        *o = base[i] + dt * incr;
    }
}

fn check_finite(values: &[f64], m: usize) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(k) => Err(Error::NonFinite {
            node: k / m,
            component: k % m,
        }),
        None => Ok(()),
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")))
    }
}

/// One plain Runge–Kutta step.
pub fn rk_step(state: &GridState, t: f64, rhs: &mut dyn Rhs, tab: &ButcherTableau, dt: f64) -> Result<GridState> {
    check_dt(dt)?;
    let m = state.components();
    let u0 = state.values();
    let len = u0.len();
    let s = tab.stages();
    let mut stages: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut stage_state = vec![0.0; len];
    for j in 0..s {
        let mut l = vec![0.0; len];
        if j == 0 {
            rhs.eval(u0, t, &mut l)?;
        } else {
            accumulate(u0, &tab.a_row(j)[..j], &stages, dt, &mut stage_state);
            rhs.eval(&stage_state, t + tab.c()[j] * dt, &mut l)?;
        }
        check_finite(&l, m)?;
        stages.push(l);
    }
    let mut next = vec![0.0; len];
    accumulate(u0, tab.b(), &stages, dt, &mut next);
    GridState::from_values(*state.grid(), m, next)
}

fn mapping_for(mappings: &[BoundsMapping], i: usize) -> &BoundsMapping {
    if mappings.len() == 1 {
        &mappings[0]
    } else {
        &mappings[i]
    }
}

/// Inverse-maps every node of `w` into `u`, rejecting overflowing coordinates.
/// Nodes whose coordinates equal `w0` reuse `u0` so unchanged states stay bit-exact.
fn inverse_all(
    w: &[f64],
    (w0, u0): (&[f64], &[f64]),
    mappings: &[BoundsMapping],
    m: usize,
    u: &mut [f64],
) -> Result<()> {
    for (i, (wi, ui)) in w.chunks_exact(m).zip(u.chunks_exact_mut(m)).enumerate() {
        let range = i * m..(i + 1) * m;
        if wi == &w0[range.clone()] {
            ui.copy_from_slice(&u0[range]);
            continue;
        }
        mapping_for(mappings, i).inverse(wi, ui).map_err(|e| match e {
            Error::StepTooLarge { component, value, .. } => Error::StepTooLarge {
                node: i,
                component,
                value,
            },
            other => other,
        })?;
    }
    Ok(())
}

/// Maps the physical tendency `l` to the auxiliary tendency `G'(u) l` node by node.
fn tangent_all(u: &[f64], l: &[f64], mappings: &[BoundsMapping], m: usize, out: &mut [f64]) -> Result<()> {
    for (i, ((ui, li), oi)) in u
        .chunks_exact(m)
        .zip(l.chunks_exact(m))
        .zip(out.chunks_exact_mut(m))
        .enumerate()
    {
        mapping_for(mappings, i)
            .jvp(ui, li, oi)
            .map_err(|e| Error::Inadmissible {
                node: i,
                reason: e.to_string(),
            })?;
    }
    Ok(())
}

/// One bounds-preserving Runge–Kutta step.
///
/// `mappings` holds one map per node (or a single map shared by all nodes);
/// each must contain `state` strictly. The stages advance `w = G(u)`, the
/// result is mapped back and then corrected to restore the totals of `state`.
pub fn bprk_step(
    state: &GridState,
    t: f64,
    rhs: &mut dyn Rhs,
    tab: &ButcherTableau,
    dt: f64,
    mappings: &[BoundsMapping],
    opts: &BpOptions,
) -> Result<(GridState, StepDiagnostics)> {
    check_dt(dt)?;
    let m = state.components();
    let nodes = state.node_count();
    if mappings.len() != 1 && mappings.len() != nodes {
        return Err(Error::InvalidArgument(format!(
            "expected 1 or {nodes} mappings, got {}",
            mappings.len()
        )));
    }
    let u0 = state.values();
    let len = u0.len();

    let mut w0 = vec![0.0; len];
    for (i, (ui, wi)) in u0.chunks_exact(m).zip(w0.chunks_exact_mut(m)).enumerate() {
        mapping_for(mappings, i)
            .forward(ui, wi)
            .map_err(|e| Error::Inadmissible {
                node: i,
                reason: e.to_string(),
            })?;
    }

    let s = tab.stages();
    let mut tangents: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut w_stage = vec![0.0; len];
    let mut u_stage = vec![0.0; len];
    let mut l = vec![0.0; len];
    for j in 0..s {
        let current: &[f64] = if j == 0 {
            u0
        } else {
            accumulate(&w0, &tab.a_row(j)[..j], &tangents, dt, &mut w_stage);
            inverse_all(&w_stage, (&w0, u0), mappings, m, &mut u_stage)?;
            &u_stage
        };
        rhs.eval(current, t + tab.c()[j] * dt, &mut l)?;
        check_finite(&l, m)?;
        let mut tangent = vec![0.0; len];
        tangent_all(current, &l, mappings, m, &mut tangent)?;
        tangents.push(tangent);
    }
    accumulate(&w0, tab.b(), &tangents, dt, &mut w_stage);
    inverse_all(&w_stage, (&w0, u0), mappings, m, &mut u_stage)?;
    let u_bar = GridState::from_values(*state.grid(), m, u_stage)?;

    let sets: Vec<_> = (0..nodes).map(|i| mapping_for(mappings, i).set()).collect();
    let (next, defect, correction) = correct(state, &u_bar, &sets, opts)?;

    let before = state.totals();
    let after = next.totals();
    let mass_residual = after.iter().zip(&before).map(|(a, b)| a - b).collect();
    let min_bound_distance = next
        .values()
        .chunks_exact(m)
        .zip(&sets)
        .map(|(u, set)| set.margin(u))
        .fold(f64::INFINITY, f64::min);
    Ok((
        next,
        StepDiagnostics {
            defect: defect.s_bar,
            defect_norm: defect.norm,
            mass_residual,
            min_bound_distance,
            correction,
        },
    ))
}
