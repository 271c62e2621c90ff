//! Run configuration, time loop, convergence studies and CSV output.

mod config;
mod converge;
mod output;
mod run;

pub use config::{Integrator, RunConfig};
pub use converge::{convergence_study, fitted_order, ConvergenceRow, ConvergenceTable};
pub use output::{emit_snapshot, snapshot_header, write_report};
pub use run::{run, run_with_observer, Outcome, ReportRow, RunReport, StepEvent};
