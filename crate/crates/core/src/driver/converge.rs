use crate::error::{Error, Result};

use super::config::RunConfig;
use super::run::{run, Outcome};

/// One time step of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    /// `None` when the run did not complete.
    pub l2_error: Option<f64>,
    /// Order against the previous row.
    pub order: Option<f64>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub scheme: String,
    pub integrator: String,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log error` against `log dt`.
    pub fitted_order: Option<f64>,
    /// Errors decrease strictly with `dt`.
    pub monotone: bool,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# scheme={} integrator={}\ndt,l2_error,order,outcome\n",
            self.scheme, self.integrator
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:.16e},{},{},{}\n",
                r.dt,
                r.l2_error.map(|e| format!("{e:.16e}")).unwrap_or_default(),
                r.order.map(|o| format!("{o:.6}")).unwrap_or_default(),
                r.outcome.label()
            ));
        }
        s.push_str(&format!(
            "# fitted_order={}\n# monotone={}\n",
            self.fitted_order
                .map(|o| format!("{o:.6}"))
                .unwrap_or_else(|| "nan".into()),
            self.monotone
        ));
        s
    }
}

/// Least-squares slope of `ln(error)` against `ln(dt)`.
pub fn fitted_order(dts: &[f64], errors: &[f64]) -> f64 {
    let x: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Runs `base` once per time step and fits the observed order of the final L2 error.
pub fn convergence_study(base: &RunConfig, dts: &[f64]) -> Result<ConvergenceTable> {
    if dts.len() < 3 {
        return Err(Error::Config(format!(
            "a convergence study needs at least 3 time steps, got {}",
            dts.len()
        )));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &dt in dts {
        let mut config = base.clone();
        config.dt = dt;
        config.cadence = usize::MAX;
        let report = run(&config)?;
        let last = report.rows.last().expect("report has an initial row");
        let l2_error = match report.outcome {
            Outcome::Completed => Some(
                last.l2_error
                    .ok_or_else(|| Error::Config(format!("problem '{}' has no exact reference", base.problem)))?,
            ),
            _ => None,
        };
        let order = match (rows.last(), l2_error) {
            (Some(prev), Some(e)) => prev.l2_error.map(|pe| (pe / e).ln() / (prev.dt / dt).ln()),
            _ => None,
        };
        rows.push(ConvergenceRow {
            dt,
            l2_error,
            order,
            outcome: report.outcome,
        });
    }
    let complete: Option<Vec<f64>> = rows.iter().map(|r| r.l2_error).collect();
    let fitted = complete.as_ref().map(|errors| fitted_order(dts, errors));
    let mut sorted: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.l2_error.map(|e| (r.dt, e))).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = complete.is_some() && sorted.windows(2).all(|w| w[0].1 < w[1].1);
    Ok(ConvergenceTable {
        scheme: base.scheme.clone(),
        integrator: base.integrator.to_string(),
        rows,
        fitted_order: fitted,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power_law() {
        let dts = [0.1, 0.05, 0.025];
        let errs: Vec<f64> = dts.iter().map(|d: &f64| 3.0 * d.powi(3)).collect();
        assert!((fitted_order(&dts, &errs) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_steps() {
        let c = RunConfig::for_problem("advection_smooth").unwrap();
        assert!(convergence_study(&c, &[0.1, 0.05]).is_err());
    }
}
