//! Butcher tableaux for explicit Runge–Kutta schemes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const CONSISTENCY_TOL: f64 = 1e-14;

/// Coefficients `(A, b, c)` of an explicit Runge–Kutta scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    name: String,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl ButcherTableau {
    /// Builds a tableau, checking that `A` is strictly lower triangular and
    /// that the weights sum to one.
    pub fn new(name: impl Into<String>, a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let s = b.len();
        if s == 0 {
            return Err(Error::Config("tableau needs at least one stage".into()));
        }
        if a.len() != s || c.len() != s || a.iter().any(|row| row.len() != s) {
            return Err(Error::Config(format!(
                "tableau shape mismatch: {} weights, {} nodes, {} rows",
                s,
                c.len(),
                a.len()
            )));
        }
        for (j, row) in a.iter().enumerate() {
            if row[j..].iter().any(|&x| x != 0.0) {
                return Err(Error::Config(format!(
                    "tableau row {j} is not strictly lower triangular"
                )));
            }
        }
        let weight_sum: f64 = b.iter().sum();
        if (weight_sum - 1.0).abs() > CONSISTENCY_TOL {
            return Err(Error::Config(format!(
                "tableau weights sum to {weight_sum}, expected 1"
            )));
        }
        Ok(Self {
            name: name.into(),
            a,
            b,
            c,
        })
    }

    /// One of the built-in schemes: `rk1` (forward Euler), `rk2` (Heun's
    /// midpoint form), `rk3` (Heun's third-order) or `rk4` (classic).
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "rk1" => Self::new("rk1", vec![vec![0.0]], vec![1.0], vec![0.0]),
            "rk2" => Self::new(
                "rk2",
                vec![vec![0.0, 0.0], vec![0.5, 0.0]],
                vec![0.0, 1.0],
                vec![0.0, 0.5],
            ),
            "rk3" => Self::new(
                "rk3",
                vec![
                    vec![0.0, 0.0, 0.0],
                    vec![1.0 / 3.0, 0.0, 0.0],
                    vec![0.0, 2.0 / 3.0, 0.0],
                ],
                vec![0.25, 0.0, 0.75],
                vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
            ),
            "rk4" => Self::new(
                "rk4",
                vec![
                    vec![0.0, 0.0, 0.0, 0.0],
                    vec![0.5, 0.0, 0.0, 0.0],
                    vec![0.0, 0.5, 0.0, 0.0],
                    vec![0.0, 0.0, 1.0, 0.0],
                ],
                vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
                vec![0.0, 0.5, 0.5, 1.0],
            ),
            other => Err(Error::Config(format!(
                "unknown scheme '{other}' (expected rk1, rk2, rk3 or rk4)"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self, j: usize, k: usize) -> f64 {
        self.a[j][k]
    }

    pub fn a_row(&self, j: usize) -> &[f64] {
        &self.a[j]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }
}

impl FromStr for ButcherTableau {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::builtin(s)
    }
}

impl fmt::Display for ButcherTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
