//! Per-node admissible sets: discrete maximum principle and invariant domain bounds.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridState};
use crate::mappings::{AdmissibleSet, BoundsMapping, EulerBounds};
use crate::physics::{exact_riemann, Equation, Gas};

/// Which admissible sets are built each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsKind {
    None,
    Dmp,
    Idp,
    IdpPositivityOnly,
}

impl FromStr for BoundsKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(BoundsKind::None),
            "dmp" => Ok(BoundsKind::Dmp),
            "idp" => Ok(BoundsKind::Idp),
            "idp_positivity_only" => Ok(BoundsKind::IdpPositivityOnly),
            other => Err(Error::Config(format!(
                "unknown bounds '{other}' (expected none, dmp, idp or idp_positivity_only)"
            ))),
        }
    }
}

impl fmt::Display for BoundsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundsKind::None => "none",
            BoundsKind::Dmp => "dmp",
            BoundsKind::Idp => "idp",
            BoundsKind::IdpPositivityOnly => "idp_positivity_only",
        })
    }
}

/// Per-node sets of the requested kind for `state`, before widening.
pub fn admissible_sets(
    kind: BoundsKind,
    state: &GridState,
    stencil: &Stencil,
    equation: &Equation,
) -> Result<Vec<AdmissibleSet>> {
    match kind {
        BoundsKind::None => Ok(vec![AdmissibleSet::Unbounded]),
        BoundsKind::Dmp => Ok(dmp_bounds(state, stencil)),
        BoundsKind::Idp | BoundsKind::IdpPositivityOnly => {
            let gas = equation
                .gas()
                .ok_or_else(|| Error::Config(format!("bounds '{kind}' require the Euler equations")))?;
            let positivity_only = kind == BoundsKind::IdpPositivityOnly;
            Ok(idp_bounds(state, stencil, gas, positivity_only)?
                .into_iter()
                .map(AdmissibleSet::EulerIdp)
                .collect())
        }
    }
}

/// Widened maps for the sets of [`admissible_sets`]. Interval sets are
/// further intersected with `envelope` when one is given.
pub fn bounds_mappings(
    kind: BoundsKind,
    state: &GridState,
    stencil: &Stencil,
    equation: &Equation,
    tolerance: f64,
    envelope: Option<&Envelope>,
) -> Result<Vec<BoundsMapping>> {
    admissible_sets(kind, state, stencil, equation)?
        .into_iter()
        .map(|set| {
            let map = BoundsMapping::new(set, tolerance)?;
            match envelope {
                Some(env) => env.clip(map),
                None => Ok(map),
            }
        })
        .collect()
}

/// Widened componentwise range of a reference state, usually the initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Envelope {
    /// Range of `state` padded by `tolerance * max(1, width)` per component.
    pub fn of(state: &GridState, tolerance: f64) -> Self {
        let m = state.components();
        let mut lower = vec![f64::INFINITY; m];
        let mut upper = vec![f64::NEG_INFINITY; m];
        for u in state.values().chunks_exact(m) {
            for c in 0..m {
                lower[c] = lower[c].min(u[c]);
                upper[c] = upper[c].max(u[c]);
            }
        }
        for (a, b) in lower.iter_mut().zip(upper.iter_mut()) {
            let pad = tolerance * (*b - *a).max(1.0);
            *a -= pad;
            *b += pad;
        }
        Self { lower, upper }
    }

    /// Intersects an interval map with the envelope; other sets pass through.
    pub fn clip(&self, map: BoundsMapping) -> Result<BoundsMapping> {
        let AdmissibleSet::Interval { lower, upper } = map.set() else {
            return Ok(map);
        };
        let lower = lower.iter().zip(&self.lower).map(|(a, e)| a.max(*e)).collect();
        let upper = upper.iter().zip(&self.upper).map(|(b, e)| b.min(*e)).collect();
        BoundsMapping::new(AdmissibleSet::Interval { lower, upper }, 0.0)
    }
}

/// Face-neighbour stencil of a periodic equispaced grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    dims: usize,
    n: usize,
}

impl Stencil {
    pub fn periodic(grid: &Grid) -> Self {
        Self {
            dims: grid.dims(),
            n: grid.n(),
        }
    }

    /// Neighbour of `i` one node along `axis` in direction `+1` or `-1`.
    pub fn step(&self, i: usize, axis: usize, forward: bool) -> usize {
        let n = self.n;
        let (ix, iy) = (i % n, i / n);
        let shift = |k: usize| if forward { (k + 1) % n } else { (k + n - 1) % n };
        if axis == 0 {
            iy * n + shift(ix)
        } else {
            shift(iy) * n + ix
        }
    }

    /// The stencil of `i`: the node itself followed by its face neighbours.
    pub fn members(&self, i: usize) -> Vec<usize> {
        let mut out = vec![i];
        for axis in 0..self.dims {
            out.push(self.step(i, axis, false));
            out.push(self.step(i, axis, true));
        }
        out
    }
}

/// Per-node, per-component min/max over the stencil.
pub fn dmp_bounds(state: &GridState, stencil: &Stencil) -> Vec<AdmissibleSet> {
    let m = state.components();
    (0..state.node_count())
        .map(|i| {
            let mut lower = state.node(i).to_vec();
            let mut upper = lower.clone();
            for j in stencil.members(i).into_iter().skip(1) {
                for (c, &v) in state.node(j).iter().enumerate().take(m) {
                    lower[c] = lower[c].min(v);
                    upper[c] = upper[c].max(v);
                }
            }
            AdmissibleSet::Interval { lower, upper }
        })
        .collect()
}

/// `U = (u_i + u_j)/2 - direction/(2 lambda) (F(u_j) - F(u_i))` with the flux along `axis`.
pub fn idp_auxiliary_state(
    u_i: &[f64],
    u_j: &[f64],
    gas: &Gas,
    axis: usize,
    direction: f64,
    lambda_max: f64,
) -> Result<Vec<f64>> {
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "wave speed must be positive, got {lambda_max}"
        )));
    }
    let m = u_i.len();
    let mut fi = vec![0.0; m];
    let mut fj = vec![0.0; m];
    gas.flux(u_i, axis, &mut fi)
        .map_err(|r| Error::domain("admissible state", r))?;
    gas.flux(u_j, axis, &mut fj)
        .map_err(|r| Error::domain("admissible state", r))?;
    let scale = direction / (2.0 * lambda_max);
    Ok((0..m)
        .map(|k| 0.5 * (u_i[k] + u_j[k]) - scale * (fj[k] - fi[k]))
        .collect())
}

/// Largest outer wave speed of the exact Riemann problem between `left`
/// and `right` along `axis`; rarefaction heads when the data generates vacuum.
pub fn pair_wave_speed(left: &[f64], right: &[f64], gas: &Gas, axis: usize) -> Result<f64> {
    let normal = |u: &[f64]| {
        let q = gas.to_primitive(u);
        [q.rho, q.velocity[axis], q.pressure]
    };
    let (l, r) = (normal(left), normal(right));
    match exact_riemann(l, r, gas.gamma) {
        Ok(sol) => Ok(sol.lambda_max),
        Err(Error::Vacuum) => {
            let c = |q: [f64; 3]| (gas.gamma * q[2] / q[0]).sqrt();
            Ok((l[1] - c(l)).abs().max((r[1] + c(r)).abs()))
        }
        Err(e) => Err(e),
    }
}

/// Density extrema, entropy floor and energy cap over each node and the auxiliary states of its faces.
///
/// With `positivity_only` the floor is zero, leaving density bounds and
/// positive internal energy.
pub fn idp_bounds(state: &GridState, stencil: &Stencil, gas: &Gas, positivity_only: bool) -> Result<Vec<EulerBounds>> {
    let nodes = state.node_count();
    for i in 0..nodes {
        gas.check_admissible(state.node(i))
            .map_err(|reason| Error::Inadmissible { node: i, reason })?;
    }
    let mut rho_min: Vec<f64> = (0..nodes).map(|i| state.node(i)[0]).collect();
    let mut rho_max = rho_min.clone();
    let mut psi_min: Vec<f64> = (0..nodes).map(|i| gas.psi_tilde(state.node(i))).collect();
    let mut energy_max: Vec<f64> = (0..nodes).map(|i| state.node(i)[gas.dims + 1]).collect();

    for axis in 0..gas.dims {
        for i in 0..nodes {
            let j = stencil.step(i, axis, true);
            let (ui, uj) = (state.node(i), state.node(j));
            let lambda = pair_wave_speed(ui, uj, gas, axis)?;
            let aux = idp_auxiliary_state(ui, uj, gas, axis, 1.0, lambda)?;
            let rho = aux[0];
            let psi = if gas.check_admissible(&aux).is_ok() {
                gas.psi_tilde(&aux)
            } else {
                0.0
            };
            for k in [i, j] {
                rho_min[k] = rho_min[k].min(rho);
                rho_max[k] = rho_max[k].max(rho);
                psi_min[k] = psi_min[k].min(psi);
                energy_max[k] = energy_max[k].max(aux[gas.dims + 1]);
            }
        }
    }
    (0..nodes)
        .map(|i| {
            if positivity_only {
                return EulerBounds::new(rho_min[i].max(0.0), rho_max[i], 0.0, *gas);
            }
            EulerBounds::new(rho_min[i].max(0.0), rho_max[i], psi_min[i].max(0.0), *gas)?.with_energy_max(energy_max[i])
        })
        .collect()
}
