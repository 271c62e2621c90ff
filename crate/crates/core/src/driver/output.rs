use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::GridState;
use crate::physics::Equation;

use super::run::RunReport;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Column names of a snapshot for `equation` on a `dims`-dimensional grid.
pub fn snapshot_header(equation: &Equation, dims: usize) -> String {
    let coords = if dims == 2 { "x,y" } else { "x" };
    let fields = match (equation, dims) {
        (Equation::Euler(_), 1) => "rho,rho_v,E,v,P",
        (Equation::Euler(_), _) => "rho,rho_u,rho_v,E,u,v,P",
        _ => "u",
    };
    format!("{coords},{fields}")
}

/// Writes node coordinates, conservative and (for Euler) primitive values, x fastest.
pub fn emit_snapshot(state: &GridState, equation: &Equation, path: &Path) -> Result<()> {
    let grid = state.grid();
    let dims = grid.dims();
    let mut text = snapshot_header(equation, dims);
    text.push('\n');
    for i in 0..state.node_count() {
        let x = grid.coordinate(i);
        let mut cols: Vec<String> = x[..dims].iter().map(|v| num(*v)).collect();
        let u = state.node(i);
        cols.extend(u.iter().map(|v| num(*v)));
        if let Equation::Euler(gas) = equation {
            let q = gas.to_primitive(u);
            cols.extend(q.velocity[..dims].iter().map(|v| num(*v)));
            cols.push(num(q.pressure));
        }
        text.push_str(&cols.join(","));
        text.push('\n');
    }
    write(path, &text)
}

/// Writes `report.csv`, `snapshot.csv` and `config.txt` into `dir`.
pub fn write_report(report: &RunReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let m = report.final_state.components();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "# problem={} n={} dt={:e} t_end={} scheme={} integrator={} bounds={} gamma_mode={}",
        report.config.problem,
        report.config.n,
        report.config.dt,
        report.config.t_end,
        report.config.scheme,
        report.config.integrator,
        report.config.bounds,
        report.config.gamma_mode
    );
    for note in &report.notes {
        let _ = writeln!(text, "# {note}");
    }
    let _ = writeln!(
        text,
        "# outcome={} steps={} fallback_steps={}",
        report.outcome.label(),
        report.steps,
        report.fallback_steps
    );
    let residual_cols: Vec<String> = (0..m).map(|c| format!("mass_residual_{c}")).collect();
    let _ = writeln!(
        text,
        "step,t,{},defect_norm,min_bound_distance,sigma_total,l1_error,l2_error",
        residual_cols.join(",")
    );
    for row in &report.rows {
        let residuals: Vec<String> = row.mass_residual.iter().map(|v| num(*v)).collect();
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{}",
            row.step,
            num(row.t),
            residuals.join(","),
            num(row.defect_norm),
            opt(row.min_bound_distance),
            opt(row.sigma_total),
            opt(row.l1_error),
            opt(row.l2_error)
        );
    }
    write(&dir.join("report.csv"), &text)?;
    emit_snapshot(&report.final_state, &report.spec.equation, &dir.join("snapshot.csv"))?;
    write(&dir.join("config.txt"), &report.config.to_text())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::physics::Gas;

    #[test]
    fn headers() {
        let gas = Gas::new(1.4, 1).unwrap();
        assert_eq!(snapshot_header(&Equation::Euler(gas), 1), "x,rho,rho_v,E,v,P");
        assert_eq!(snapshot_header(&Equation::Burgers, 1), "x,u");
        let gas2 = Gas::new(1.4, 2).unwrap();
        assert_eq!(
            snapshot_header(&Equation::Euler(gas2), 2),
            "x,y,rho,rho_u,rho_v,E,u,v,P"
        );
    }

    #[test]
    fn snapshot_shapes() {
        let dir = std::env::temp_dir().join(format!("bprk-snap-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let g = Grid::new(1, 4, 0.0, 1.0).unwrap();
        let s = GridState::from_values(g, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let p = dir.join("a.csv");
        emit_snapshot(&s, &Equation::Burgers, &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("0.0000000000000000e0,1.0000000000000000e0"));

        let g2 = Grid::new(2, 8, 0.0, 1.0).unwrap();
        let gas = Gas::new(1.4, 2).unwrap();
        let s2 = GridState::from_fn(g2, 4, |_, v| v.copy_from_slice(&[1.0, 0.0, 0.0, 2.5]));
        emit_snapshot(&s2, &Equation::Euler(gas), &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 65);
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 9);
        fs::remove_dir_all(&dir).unwrap();
    }
}
