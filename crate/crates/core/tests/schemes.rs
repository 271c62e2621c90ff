//! Whole-run properties of the plain and bounds-preserving integrators.

use bprk::driver::{run, run_with_observer, Integrator, Outcome, RunConfig};
use bprk::physics::{exact_riemann, Gas, Primitive};
use proptest::prelude::*;

fn config(problem: &str, settings: &[(&str, &str)]) -> RunConfig {
    let mut c = RunConfig::for_problem(problem).unwrap();
    for (k, v) in settings {
        c.set(k, v).unwrap();
    }
    c
}

#[test]
fn unbounded_bp_recovers_every_base_scheme() {
    for scheme in ["rk1", "rk2", "rk3", "rk4"] {
        let settings = [("scheme", scheme), ("bounds", "none"), ("dt", "1e-3"), ("t_end", "0.1")];
        let mut plain = config("burgers_sine", &settings);
        plain.integrator = Integrator::Plain;
        let bp = config("burgers_sine", &settings);
        let a = run(&plain).unwrap();
        let b = run(&bp).unwrap();
        assert_eq!((a.steps, b.steps), (100, 100));
        let diff = a.final_state.max_abs_diff(&b.final_state);
        assert!(diff <= 1e-13, "{scheme}: {diff:e}");
    }
}

#[test]
fn dmp_runs_stay_in_widened_bounds_and_conserve_mass() {
    let c = config("advection_shapes", &[("t_end", "0.4")]);
    let mut worst_margin = f64::INFINITY;
    let report = run_with_observer(&c, &mut |event| {
        if let Some(d) = event.diagnostics {
            worst_margin = worst_margin.min(d.min_bound_distance);
            assert!(d.mass_residual[0].abs() <= 1e-12);
        }
    })
    .unwrap();
    assert_eq!(report.outcome, Outcome::Completed);
    assert!(worst_margin > 0.0);
    let (lo, hi) = report
        .final_state
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(lo >= -2e-6 && hi <= 1.0 + 2e-6, "[{lo}, {hi}]");
}

#[test]
fn smooth_advection_error_shrinks_with_dt() {
    let errs: Vec<f64> = ["4e-3", "2e-3"]
        .iter()
        .map(|dt| {
            let c = config("advection_smooth", &[("dt", dt), ("t_end", "1"), ("scheme", "rk2")]);
            let r = run(&c).unwrap();
            r.rows.last().unwrap().l2_error.unwrap()
        })
        .collect();
    let order = (errs[0] / errs[1]).log2();
    assert!((order - 2.0).abs() < 0.2, "order {order}, errors {errs:?}");
}

#[test]
fn sod_star_state() {
    let s = exact_riemann([1.0, 0.0, 1.0], [0.125, 0.0, 0.1], 1.4).unwrap();
    assert!((s.p_star - 0.30313).abs() < 1e-5);
    assert!((s.u_star - 0.92745).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn primitive_round_trip(d in 1usize..=2, rho in 1e-3f64..10.0, vx in -5.0f64..5.0, vy in -5.0f64..5.0, p in 1e-3f64..100.0) {
        let gas = Gas::new(1.4, d).unwrap();
        let q = if d == 1 { Primitive::new_1d(rho, vx, p) } else { Primitive::new_2d(rho, vx, vy, p) };
        let u = gas.conservative(&q);
        let back = gas.to_primitive(&u);
        prop_assert!((back.rho - rho).abs() <= 1e-12 * rho);
        prop_assert!((back.pressure - p).abs() <= 1e-10 * (p + rho * (vx * vx + vy * vy)));
        for k in 0..d {
            prop_assert!((back.velocity[k] - q.velocity[k]).abs() <= 1e-12 * (1.0 + q.velocity[k].abs()));
        }
    }
}
