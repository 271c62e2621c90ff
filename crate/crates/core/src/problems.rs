//! Initial conditions, periodization and reference solutions of the test cases.

use std::f64::consts::PI;

use crate::bounds::BoundsKind;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridState};
use crate::mappings::DEFAULT_TOLERANCE;
use crate::physics::{exact_riemann, Equation, Gas, Primitive, RiemannSolution};

/// Stable problem identifiers.
pub const PROBLEM_NAMES: [&str; 8] = [
    "advection_smooth",
    "advection_shapes",
    "burgers_sine",
    "sod",
    "sod_modified",
    "woodward_colella",
    "riemann2d_case12",
    "kelvin_helmholtz",
];

const GAS_RATIO: f64 = 1.4;

/// Kind of reference available for error norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// Periodic translation of the initial condition with unit speed.
    ExactTranslation,
    /// Self-similar exact Riemann solution about the interface at `x = 0.5`.
    RiemannSampler,
    None,
}

/// Pointwise initial condition on the base (unmirrored) domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    Sine,
    ThreeShapes,
    BurgersSine,
    /// `left` for `x <= interface`, `right` otherwise.
    ShockTube {
        left: Primitive,
        right: Primitive,
        interface: f64,
    },
    /// Quadrant data on `[0, 1]^2` split at `(0.5, 0.5)`, indexed `[south-west, south-east, north-west, north-east]`.
    Quadrants([Primitive; 4]),
    /// Shear layer `|y + amplitude sin(k pi x)| <= 0.5`.
    ShearLayer {
        inner: Primitive,
        outer: Primitive,
        amplitude: f64,
        wavenumber: f64,
    },
}

/// A test case with its defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: &'static str,
    pub dims: usize,
    pub equation: Equation,
    pub initial: InitialCondition,
    /// Lower corner of the (square) domain.
    pub origin: f64,
    /// Edge length of the domain.
    pub length: f64,
    /// Mirrored about the coordinate axes onto `[-1, 1]^d`.
    pub mirrored: bool,
    pub reference: ReferenceKind,
    /// Nodes per axis; half-domain count for mirrored problems.
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub bounds: BoundsKind,
    pub scheme: &'static str,
    /// Relative widening of the admissible sets.
    pub tolerance: f64,
    /// Deviation from the reference run parameters, if any.
    pub note: Option<&'static str>,
}

fn gas(dims: usize) -> Gas {
    Gas { gamma: GAS_RATIO, dims }
}

fn shock_tube(name: &'static str, left: Primitive, right: Primitive, n: usize, dt: f64, t_end: f64) -> ProblemSpec {
    ProblemSpec {
        name,
        dims: 1,
        equation: Equation::Euler(gas(1)),
        initial: InitialCondition::ShockTube {
            left,
            right,
            interface: 0.5,
        },
        origin: 0.0,
        length: 1.0,
        mirrored: false,
        reference: ReferenceKind::RiemannSampler,
        n,
        dt,
        t_end,
        bounds: BoundsKind::Idp,
        scheme: "rk4",
        tolerance: DEFAULT_TOLERANCE,
        note: None,
    }
}

/// The named problem on its base domain, with its reference parameters.
pub fn ic_library(name: &str) -> Result<ProblemSpec> {
    let advection = Equation::Advection { velocity: [1.0, 0.0] };
    let spec = match name {
        "advection_smooth" => ProblemSpec {
            name: "advection_smooth",
            dims: 1,
            equation: advection,
            initial: InitialCondition::Sine,
            origin: 0.0,
            length: 1.0,
            mirrored: false,
            reference: ReferenceKind::ExactTranslation,
            n: 32,
            dt: 1e-3,
            t_end: 10.0,
            bounds: BoundsKind::Dmp,
            scheme: "rk4",
            tolerance: 1e-2,
            note: Some("final time 10 instead of 100; bound tolerance 1e-2 instead of 1e-6"),
        },
        "advection_shapes" => ProblemSpec {
            name: "advection_shapes",
            dims: 1,
            equation: advection,
            initial: InitialCondition::ThreeShapes,
            origin: 0.0,
            length: 1.0,
            mirrored: false,
            reference: ReferenceKind::ExactTranslation,
            n: 128,
            dt: 4e-3,
            t_end: 10.0,
            bounds: BoundsKind::Dmp,
            scheme: "rk4",
            tolerance: DEFAULT_TOLERANCE,
            note: Some("final time 10 instead of 100"),
        },
        "burgers_sine" => ProblemSpec {
            name: "burgers_sine",
            dims: 1,
            equation: Equation::Burgers,
            initial: InitialCondition::BurgersSine,
            origin: 0.0,
            length: 1.0,
            mirrored: false,
            reference: ReferenceKind::None,
            n: 64,
            dt: 1e-3,
            t_end: 1.0,
            bounds: BoundsKind::Dmp,
            scheme: "rk2",
            tolerance: DEFAULT_TOLERANCE,
            note: None,
        },
        "sod" => shock_tube(
            "sod",
            Primitive::new_1d(1.0, 0.0, 1.0),
            Primitive::new_1d(0.125, 0.0, 0.1),
            128,
            1e-3,
            0.2,
        ),
        "sod_modified" => shock_tube(
            "sod_modified",
            Primitive::new_1d(1.0, 0.75, 1.0),
            Primitive::new_1d(0.125, 0.0, 0.1),
            128,
            1e-3,
            0.2,
        ),
        "woodward_colella" => shock_tube(
            "woodward_colella",
            Primitive::new_1d(1.0, 0.0, 1000.0),
            Primitive::new_1d(1.0, 0.0, 0.01),
            256,
            2e-5,
            0.012,
        ),
        "riemann2d_case12" => {
            let a = 3.0 / 17.0_f64.sqrt();
            ProblemSpec {
                name: "riemann2d_case12",
                dims: 2,
                equation: Equation::Euler(gas(2)),
                initial: InitialCondition::Quadrants([
                    Primitive::new_2d(0.8, 0.0, 0.0, 1.0),
                    Primitive::new_2d(1.0, 0.0, a, 1.0),
                    Primitive::new_2d(1.0, a, 0.0, 1.0),
                    Primitive::new_2d(17.0 / 32.0, 0.0, 0.0, 0.4),
                ]),
                origin: 0.0,
                length: 1.0,
                mirrored: false,
                reference: ReferenceKind::None,
                n: 128,
                dt: 2e-4,
                t_end: 0.2,
                bounds: BoundsKind::Idp,
                scheme: "rk4",
                tolerance: DEFAULT_TOLERANCE,
                note: Some("128 nodes per half axis (256x256 grid) instead of 400 with dt 1e-4"),
            }
        }
        "kelvin_helmholtz" => ProblemSpec {
            name: "kelvin_helmholtz",
            dims: 2,
            equation: Equation::Euler(gas(2)),
            initial: InitialCondition::ShearLayer {
                inner: Primitive::new_2d(2.0, 0.5, 0.0, 2.5),
                outer: Primitive::new_2d(1.0, -0.5, 0.0, 2.5),
                amplitude: 1e-2,
                wavenumber: 2.0,
            },
            origin: -1.0,
            length: 2.0,
            mirrored: false,
            reference: ReferenceKind::None,
            n: 256,
            dt: 4e-4,
            t_end: 1.0,
            bounds: BoundsKind::Idp,
            scheme: "rk4",
            tolerance: DEFAULT_TOLERANCE,
            note: Some("256x256 grid with dt 4e-4 instead of 400x400 with dt 2e-4"),
        },
        other => {
            return Err(Error::Config(format!(
                "unknown problem '{other}' (known: {})",
                PROBLEM_NAMES.join(", ")
            )))
        }
    };
    Ok(spec)
}

/// Mirrors a problem on `[0, 1]^d` about the coordinate axes onto the periodic `[-1, 1]^d`.
pub fn periodize(spec: &ProblemSpec) -> ProblemSpec {
    ProblemSpec {
        origin: -1.0,
        length: 2.0,
        mirrored: true,
        ..spec.clone()
    }
}

/// The problem as it is run: shock-tube and quadrant data are periodized.
pub fn runnable(name: &str) -> Result<ProblemSpec> {
    let spec = ic_library(name)?;
    Ok(match spec.initial {
        InitialCondition::ShockTube { .. } | InitialCondition::Quadrants(_) => periodize(&spec),
        _ => spec,
    })
}

impl ProblemSpec {
    pub fn components(&self) -> usize {
        self.equation.components()
    }

    /// Grid with `n` nodes per axis, doubled for mirrored problems. Mirrored
    /// and shear-layer grids are offset by half a cell so that no node sits
    /// on an initial jump or a mirror plane.
    pub fn grid(&self, n: usize) -> Result<Grid> {
        let nodes = if self.mirrored { 2 * n } else { n };
        let h = self.length / nodes as f64;
        let offset = match self.initial {
            InitialCondition::ShockTube { .. }
            | InitialCondition::Quadrants(_)
            | InitialCondition::ShearLayer { .. } => 0.5 * h,
            _ => 0.0,
        };
        Grid::new(self.dims, nodes, self.origin + offset, self.length)
    }

    /// Initial condition at a point, in conservative variables.
    pub fn evaluate(&self, x: [f64; 2], out: &mut [f64]) {
        let (x, sign) = if self.mirrored {
            ([x[0].abs(), x[1].abs()], [x[0].signum(), x[1].signum()])
        } else {
            (x, [1.0, 1.0])
        };
        match self.initial {
            InitialCondition::Sine => out[0] = (2.0 * PI * x[0]).sin(),
            InitialCondition::ThreeShapes => out[0] = three_shapes(x[0]),
            InitialCondition::BurgersSine => out[0] = (2.0 * PI * x[0]).sin() + 2.0,
            InitialCondition::ShockTube { left, right, interface } => {
                let q = if x[0] <= interface { left } else { right };
                self.conservative(q, sign, out);
            }
            InitialCondition::Quadrants(q) => {
                let east = usize::from(x[0] > 0.5);
                let north = usize::from(x[1] > 0.5);
                self.conservative(q[2 * north + east], sign, out);
            }
            InitialCondition::ShearLayer {
                inner,
                outer,
                amplitude,
                wavenumber,
            } => {
                let phi = amplitude * (wavenumber * PI * x[0]).sin();
                let q = if (x[1] + phi).abs() <= 0.5 { inner } else { outer };
                self.conservative(q, sign, out);
            }
        }
    }

    fn conservative(&self, q: Primitive, sign: [f64; 2], out: &mut [f64]) {
        let gas = self.equation.gas().expect("Euler initial condition");
        let mut q = q;
        q.velocity[0] *= sign[0];
        q.velocity[1] *= sign[1];
        gas.to_conservative(&q, out);
    }

    pub fn initial_state(&self, grid: &Grid) -> GridState {
        GridState::from_fn(*grid, self.components(), |x, out| self.evaluate(x, out))
    }

    /// Exact Riemann solution of the shock-tube data, if this is a shock tube.
    pub fn riemann_solution(&self) -> Result<Option<RiemannSolution>> {
        match (self.initial, self.equation) {
            (InitialCondition::ShockTube { left, right, .. }, Equation::Euler(g)) => Ok(Some(exact_riemann(
                [left.rho, left.velocity[0], left.pressure],
                [right.rho, right.velocity[0], right.pressure],
                g.gamma,
            )?)),
            _ => Ok(None),
        }
    }

    /// Reference field at time `t`, when one is available. For mirrored shock
    /// tubes the reference is the exact solution of the single interface problem,
    /// valid while its waves stay clear of the mirror planes.
    pub fn reference_state(&self, grid: &Grid, t: f64) -> Result<Option<GridState>> {
        match self.reference {
            ReferenceKind::None => Ok(None),
            ReferenceKind::ExactTranslation => {
                let c = match self.equation {
                    Equation::Advection { velocity } => velocity[0],
                    _ => return Ok(None),
                };
                Ok(Some(GridState::from_fn(*grid, 1, |x, out| {
                    let shifted = (x[0] - c * t - self.origin).rem_euclid(self.length) + self.origin;
                    self.evaluate([shifted, x[1]], out);
                })))
            }
            ReferenceKind::RiemannSampler => {
                let Some(solution) = self.riemann_solution()? else {
                    return Ok(None);
                };
                let InitialCondition::ShockTube { interface, .. } = self.initial else {
                    return Ok(None);
                };
                let gas = *self.equation.gas().expect("Euler reference");
                Ok(Some(GridState::from_fn(*grid, gas.components(), |x, out| {
                    let (pos, sign) = if self.mirrored {
                        (x[0].abs(), x[0].signum())
                    } else {
                        (x[0], 1.0)
                    };
                    let [rho, v, p] = if t > 0.0 {
                        solution.sample((pos - interface) / t)
                    } else {
                        self.evaluate([pos, 0.0], out);
                        let q = gas.to_primitive(out);
                        [q.rho, q.velocity[0], q.pressure]
                    };
                    gas.to_conservative(&Primitive::new_1d(rho, sign * v, p), out);
                })))
            }
        }
    }
}

/// Gaussian, square pulse and semi-ellipse on `[0, 1]`.
pub fn three_shapes(x: f64) -> f64 {
    let s = 2.0 * x;
    if (s - 0.3).abs() <= 0.25 {
        (-300.0 * (s - 0.3) * (s - 0.3)).exp()
    } else if (s - 0.9).abs() <= 0.2 {
        1.0
    } else if (s - 1.6).abs() <= 0.2 {
        let r = (s - 1.6) / 0.2;
        (1.0 - r * r).sqrt()
    } else {
        0.0
    }
}
