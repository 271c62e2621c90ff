use crate::bounds::{bounds_mappings, BoundsKind, Envelope, Stencil};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridState};
use crate::mappings::BoundsMapping;
use crate::physics::Equation;
use crate::problems::{runnable, ProblemSpec};
use crate::spectral::SpectralOperator;
use crate::stepper::{bprk_step, rk_step, StepDiagnostics};
use crate::sum::neumaier;

use super::config::{Integrator, RunConfig};

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Completed,
    /// Non-finite or inadmissible values, or an auxiliary overflow.
    Diverged {
        t: f64,
        reason: String,
    },
    /// The mass correction found no room inside the bounds.
    Infeasible {
        t: f64,
        reason: String,
    },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Completed => "completed",
            Outcome::Diverged { .. } => "diverged",
            Outcome::Infeasible { .. } => "infeasible",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Completed => 0,
            Outcome::Diverged { .. } => 2,
            Outcome::Infeasible { .. } => 3,
        }
    }
}

/// One line of the time-series report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub step: usize,
    pub t: f64,
    /// Total minus initial total, per component.
    pub mass_residual: Vec<f64>,
    /// Mass defect of the step that produced this row.
    pub defect_norm: f64,
    pub min_bound_distance: Option<f64>,
    /// Integral of `-rho log(psi)`; Euler runs only, when defined everywhere.
    pub sigma_total: Option<f64>,
    pub l1_error: Option<f64>,
    pub l2_error: Option<f64>,
}

/// Result of a run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: RunConfig,
    pub spec: ProblemSpec,
    pub grid: Grid,
    pub rows: Vec<ReportRow>,
    pub final_state: GridState,
    pub final_t: f64,
    pub steps: usize,
    pub outcome: Outcome,
    /// Steps in which the analytic correction was replaced by the numeric one.
    pub fallback_steps: usize,
    /// Largest per-step `|total - initial total|` over all steps and components.
    pub max_mass_residual: f64,
    pub notes: Vec<String>,
}

/// State after each accepted step, for callers that inspect every step.
pub struct StepEvent<'a> {
    pub step: usize,
    pub t: f64,
    pub state: &'a GridState,
    pub diagnostics: Option<&'a StepDiagnostics>,
    /// Maps the step was taken with (empty for plain steps without bounds).
    pub mappings: &'a [BoundsMapping],
}

pub fn run(config: &RunConfig) -> Result<RunReport> {
    run_with_observer(config, &mut |_| {})
}

enum Failure {
    Diverged(String),
    Infeasible(String),
}

fn classify(e: Error) -> std::result::Result<Failure, Error> {
    match e {
        Error::CorrectionInfeasible { .. } => Ok(Failure::Infeasible(e.to_string())),
        Error::NonFinite { .. }
        | Error::Inadmissible { .. }
        | Error::Domain { .. }
        | Error::StepTooLarge { .. }
        | Error::Vacuum
        | Error::RiemannNoConvergence(_) => Ok(Failure::Diverged(e.to_string())),
        other => Err(other),
    }
}

/// Runs the time loop, calling `observer` after every accepted step.
pub fn run_with_observer(config: &RunConfig, observer: &mut dyn FnMut(&StepEvent<'_>)) -> Result<RunReport> {
    config.validate()?;
    let spec = runnable(&config.problem)?;
    let grid = spec.grid(config.n)?;
    let tab = config.tableau()?;
    let opts = config.bp_options();
    let mut op = SpectralOperator::new(grid, spec.equation)?;
    let stencil = Stencil::periodic(&grid);
    if matches!(config.bounds, BoundsKind::Idp | BoundsKind::IdpPositivityOnly) && spec.equation.gas().is_none() {
        return Err(Error::Config(format!(
            "bounds '{}' require the Euler equations",
            config.bounds
        )));
    }

    let mut notes = Vec::new();
    if let Some(note) = spec.note {
        notes.push(format!("adjusted setup: {note}"));
    }
    if spec.mirrored {
        notes.push(format!(
            "mirrored onto [-1, 1]; n counts half-axis nodes ({} per axis)",
            grid.n()
        ));
    }

    let mut state = spec.initial_state(&grid);
    let envelope = (config.bounds == BoundsKind::Dmp).then(|| Envelope::of(&state, config.tolerance));
    let initial = state.totals();
    let mut rows = vec![make_row(&spec, &grid, &state, 0, 0.0, &initial, 0.0, None)?];
    let mut t = 0.0;
    let mut step = 0;
    let mut fallback_steps = 0;
    let mut max_mass_residual: f64 = 0.0;
    let mut outcome = Outcome::Completed;
    let end = config.t_end;
    let eps_t = 1e-9 * config.dt;

    observer(&StepEvent {
        step: 0,
        t: 0.0,
        state: &state,
        diagnostics: None,
        mappings: &[],
    });

    while t < end - eps_t {
        let remaining = end - t;
        let last = remaining <= config.dt + eps_t;
        let dt = if last { remaining } else { config.dt };

        let attempt = (|| -> Result<(GridState, Option<StepDiagnostics>, Vec<BoundsMapping>)> {
            match config.integrator {
                Integrator::Bp => {
                    let maps = bounds_mappings(
                        config.bounds,
                        &state,
                        &stencil,
                        &spec.equation,
                        config.tolerance,
                        envelope.as_ref(),
                    )?;
                    let (next, diag) = bprk_step(&state, t, &mut op, &tab, dt, &maps, &opts)?;
                    Ok((next, Some(diag), maps))
                }
                Integrator::Plain => {
                    let maps = if config.bounds == BoundsKind::None {
                        Vec::new()
                    } else {
                        bounds_mappings(
                            config.bounds,
                            &state,
                            &stencil,
                            &spec.equation,
                            config.tolerance,
                            envelope.as_ref(),
                        )?
                    };
                    let next = rk_step(&state, t, &mut op, &tab, dt)?;
                    if let Some((node, component)) = next.first_non_finite() {
                        return Err(Error::NonFinite { node, component });
                    }
                    Ok((next, None, maps))
                }
            }
        })();

        let (next, diag, maps) = match attempt {
            Ok(v) => v,
            Err(e) => {
                outcome = match classify(e)? {
                    Failure::Diverged(reason) => Outcome::Diverged { t, reason },
                    Failure::Infeasible(reason) => Outcome::Infeasible { t, reason },
                };
                break;
            }
        };

        step += 1;
        t = if last { end } else { step as f64 * config.dt };
        state = next;
        let totals = state.totals();
        for (a, b) in totals.iter().zip(&initial) {
            max_mass_residual = max_mass_residual.max((a - b).abs());
        }
        if diag.as_ref().is_some_and(|d| d.correction.fallback_triggered) {
            fallback_steps += 1;
        }
        observer(&StepEvent {
            step,
            t,
            state: &state,
            diagnostics: diag.as_ref(),
            mappings: &maps,
        });

        if step % config.cadence == 0 || t >= end - eps_t {
            let defect = diag.as_ref().map_or(0.0, |d| d.defect_norm);
            let margin = margin_of(&state, &maps, diag.as_ref());
            rows.push(make_row(&spec, &grid, &state, step, t, &initial, defect, margin)?);
        }
    }

    Ok(RunReport {
        config: config.clone(),
        spec,
        grid,
        rows,
        final_state: state,
        final_t: t,
        steps: step,
        outcome,
        fallback_steps,
        max_mass_residual,
        notes,
    })
}

fn margin_of(state: &GridState, maps: &[BoundsMapping], diag: Option<&StepDiagnostics>) -> Option<f64> {
    if let Some(d) = diag {
        return d.min_bound_distance.is_finite().then_some(d.min_bound_distance);
    }
    if maps.is_empty() {
        return None;
    }
    let m = state.components();
    let shared = maps.len() == 1;
    let value = state
        .values()
        .chunks_exact(m)
        .enumerate()
        .map(|(i, u)| maps[if shared { 0 } else { i }].set().margin(u))
        .fold(f64::INFINITY, f64::min);
    value.is_finite().then_some(value)
}

#[allow(clippy::too_many_arguments)]
fn make_row(
    spec: &ProblemSpec,
    grid: &Grid,
    state: &GridState,
    step: usize,
    t: f64,
    initial: &[f64],
    defect_norm: f64,
    min_bound_distance: Option<f64>,
) -> Result<ReportRow> {
    let mass_residual = state.totals().iter().zip(initial).map(|(a, b)| a - b).collect();
    let sigma_total = entropy_integral(spec, state);
    let (l1_error, l2_error) = match spec.reference_state(grid, t)? {
        Some(reference) => {
            let (l1, l2) = error_norms(spec, state, &reference);
            (Some(l1), Some(l2))
        }
        None => (None, None),
    };
    Ok(ReportRow {
        step,
        t,
        mass_residual,
        defect_norm,
        min_bound_distance,
        sigma_total,
        l1_error,
        l2_error,
    })
}

/// `sum_i m_i sigma_i` when every node has a defined entropy density.
pub(crate) fn entropy_integral(spec: &ProblemSpec, state: &GridState) -> Option<f64> {
    let Equation::Euler(gas) = spec.equation else {
        return None;
    };
    let mut values = Vec::with_capacity(state.node_count());
    for i in 0..state.node_count() {
        values.push(gas.entropy(state.node(i)).ok()?.sigma?);
    }
    Some(state.grid().weight() * neumaier(values))
}

/// Discrete L1 and L2 norms of the first component's error. Mirrored
/// problems are measured on the physical half `x > 0`.
fn error_norms(spec: &ProblemSpec, state: &GridState, reference: &GridState) -> (f64, f64) {
    let grid = state.grid();
    let w = grid.weight();
    let diffs: Vec<f64> = (0..state.node_count())
        .filter(|&i| !spec.mirrored || grid.coordinate(i)[0] > 0.0)
        .map(|i| state.node(i)[0] - reference.node(i)[0])
        .collect();
    let l1 = w * neumaier(diffs.iter().map(|d| d.abs()));
    let l2 = (w * neumaier(diffs.iter().map(|d| d * d))).sqrt();
    (l1, l2)
}
