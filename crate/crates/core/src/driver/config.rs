use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bounds::BoundsKind;
use crate::error::{Error, Result};
use crate::mass_correction::RootMethod;
use crate::problems::runnable;
use crate::stepper::{BpOptions, GammaMode};
use crate::tableau::ButcherTableau;

/// Plain Runge–Kutta or the bounds-preserving variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Plain,
    Bp,
}

impl FromStr for Integrator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Integrator::Plain),
            "bp" => Ok(Integrator::Bp),
            other => Err(Error::Config(format!(
                "unknown integrator '{other}' (expected plain or bp)"
            ))),
        }
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Integrator::Plain => "plain",
            Integrator::Bp => "bp",
        })
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    /// Nodes per axis (per half axis for mirrored problems).
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: String,
    pub integrator: Integrator,
    pub bounds: BoundsKind,
    pub tolerance: f64,
    pub gamma_mode: GammaMode,
    pub root_method: RootMethod,
    pub root_iterations: usize,
    /// Report a row every `cadence` steps (and always at the end).
    pub cadence: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    /// Time steps of a convergence study.
    pub dts: Vec<f64>,
}

impl RunConfig {
    /// Default settings of a problem.
    pub fn for_problem(name: &str) -> Result<Self> {
        let spec = runnable(name)?;
        Ok(Self {
            problem: spec.name.to_string(),
            n: spec.n,
            dt: spec.dt,
            t_end: spec.t_end,
            scheme: spec.scheme.to_string(),
            integrator: Integrator::Bp,
            bounds: spec.bounds,
            tolerance: spec.tolerance,
            gamma_mode: GammaMode::default(),
            root_method: RootMethod::default(),
            root_iterations: 5,
            cadence: 10,
            seed: 0,
            out_dir: None,
            dts: Vec::new(),
        })
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |what: &str| Error::Config(format!("invalid value '{value}' for {what}"));
        match key.trim() {
            "problem" => {
                if value != self.problem {
                    *self = Self::for_problem(value)?;
                }
            }
            "n" => self.n = value.parse().map_err(|_| bad("n"))?,
            "dt" => self.dt = value.parse().map_err(|_| bad("dt"))?,
            "t_end" => self.t_end = value.parse().map_err(|_| bad("t_end"))?,
            "scheme" => match value.strip_prefix("bp-") {
                Some(base) => {
                    self.scheme = base.to_string();
                    self.integrator = Integrator::Bp;
                }
                None => self.scheme = value.to_string(),
            },
            "integrator" => self.integrator = value.parse()?,
            "bounds" => self.bounds = value.parse()?,
            "tolerance" => self.tolerance = value.parse().map_err(|_| bad("tolerance"))?,
            "gamma_mode" => self.gamma_mode = value.parse()?,
            "root_method" => self.root_method = value.parse()?,
            "bisection_iters" | "root_iterations" => {
                self.root_iterations = value.parse().map_err(|_| bad("root_iterations"))?
            }
            "cadence" => self.cadence = value.parse().map_err(|_| bad("cadence"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "out" | "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            "dts" => {
                self.dts = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse::<f64>().map_err(|_| bad("dts")))
                    .collect::<Result<_>>()?
            }
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. The problem is
    /// applied first so that its defaults never override explicit keys.
    pub fn parse(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got '{line}'", lineno + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        pairs.extend(overrides.iter().cloned());
        let problem = pairs
            .iter()
            .rev()
            .find(|(k, _)| k == "problem")
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::Config("no problem given".into()))?;
        let mut config = Self::for_problem(&problem)?;
        for (k, v) in pairs.iter().filter(|(k, _)| k != "problem") {
            config.set(k, v)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let text = match path {
            Some(p) => fs::read_to_string(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })?,
            None => String::new(),
        };
        Self::parse(&text, overrides)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if !self.n.is_power_of_two() || self.n < 2 {
            return Err(Error::Config(format!("n must be a power of two >= 2, got {}", self.n)));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!("tolerance must be >= 0, got {}", self.tolerance)));
        }
        if self.cadence == 0 {
            return Err(Error::Config("cadence must be at least 1".into()));
        }
        if self.dts.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::Config("dts must be positive".into()));
        }
        self.tableau()?;
        Ok(())
    }

    pub fn tableau(&self) -> Result<ButcherTableau> {
        ButcherTableau::builtin(&self.scheme)
    }

    pub fn bp_options(&self) -> BpOptions {
        BpOptions {
            gamma_mode: self.gamma_mode,
            root_method: self.root_method,
            root_iterations: self.root_iterations,
        }
    }

    /// The configuration as `key = value` lines accepted by [`RunConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        line("problem", self.problem.clone());
        line("n", self.n.to_string());
        line("dt", format!("{:e}", self.dt));
        line("t_end", format!("{}", self.t_end));
        line("scheme", self.scheme.clone());
        line("integrator", self.integrator.to_string());
        line("bounds", self.bounds.to_string());
        line("tolerance", format!("{:e}", self.tolerance));
        line("gamma_mode", self.gamma_mode.to_string());
        line("root_method", self.root_method.to_string());
        line("root_iterations", self.root_iterations.to_string());
        line("cadence", self.cadence.to_string());
        line("seed", self.seed.to_string());
        if !self.dts.is_empty() {
            line(
                "dts",
                self.dts.iter().map(|d| format!("{d:e}")).collect::<Vec<_>>().join(","),
            );
        }
        s
    }
}
