mod common;

use common::{reference_model, reference_weights, reference_x0, small_problem};
use magnetic_lqr::riccati::{solve_periodic_gamma, GainSchedule, SolveOptions};
use magnetic_lqr::sim::{monodromy, simulate_closed_loop, SimulationConfig};
use magnetic_lqr::symplectic::build_pencil;
use proptest::prelude::*;

fn reference_schedule() -> GainSchedule {
    let pm = reference_model(100);
    let w = reference_weights();
    solve_periodic_gamma(
        &build_pencil(&pm, w.q(), w.r()).unwrap(),
        &w,
        &SolveOptions::default(),
    )
    .unwrap()
}

fn orbit_norms(orbits: usize) -> (Vec<f64>, f64) {
    let pm = reference_model(100);
    let schedule = reference_schedule();
    let rho = monodromy(&pm, &schedule).unwrap().spectral_radius;
    let traj = simulate_closed_loop(
        &pm,
        &schedule,
        &SimulationConfig::new(reference_x0(), orbits * 100).unwrap(),
    )
    .unwrap();
    (
        (0..=orbits).map(|j| traj.states[j * 100].norm()).collect(),
        rho,
    )
}

#[test]
fn whole_orbit_decay_is_bounded_by_the_monodromy_radius() {
    let (norms, rho) = orbit_norms(10);
    assert!(rho < 1.0);
    let violations: Vec<String> = (1..10)
        .filter(|&j| norms[j + 1] > (rho + 0.05) * norms[j])
        .map(|j| format!("orbit {j}: ratio {:.3}", norms[j + 1] / norms[j]))
        .collect();
    assert!(
        violations.is_empty(),
        "bound rho + 0.05 = {:.3} exceeded: {violations:?}",
        rho + 0.05
    );
}

#[test]
fn mean_orbit_decay_rate_approaches_the_monodromy_radius() {
    let (norms, rho) = orbit_norms(10);
    let rate = (norms[10] / norms[1]).powf(1.0 / 9.0);
    assert!(rate <= rho + 0.05, "rate {rate}, rho {rho}");
}

#[test]
fn closed_loop_spectrum_is_the_stable_half_of_gamma() {
    let pm = reference_model(100);
    let w = reference_weights();
    let schedule = reference_schedule();
    let phi = monodromy(&pm, &schedule).unwrap().matrix;
    let mut closed: Vec<f64> = phi.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    let gamma = build_pencil(&pm, w.q(), w.r())
        .unwrap()
        .gamma_product(0)
        .unwrap();
    let mut inside: Vec<f64> = gamma
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .filter(|m| *m < 1.0)
        .collect();
    closed.sort_by(f64::total_cmp);
    inside.sort_by(f64::total_cmp);
    assert_eq!(closed.len(), inside.len());
    for (a, b) in closed.iter().zip(&inside) {
        assert!(
            (a - b).abs() <= 1e-6 * b.max(1e-3),
            "{closed:?} vs {inside:?}"
        );
    }
}

#[test]
fn realized_cost_matches_the_value_function() {
    let pm = reference_model(100);
    let w = reference_weights();
    let schedule = reference_schedule();
    let x0 = reference_x0();
    let traj = simulate_closed_loop(
        &pm,
        &schedule,
        &SimulationConfig::new(x0.clone(), 20 * 100).unwrap(),
    )
    .unwrap();
    let cost = traj.quadratic_cost(&w);
    let value = x0.dot(&(schedule.p(0) * &x0));
    assert!(
        (cost - value).abs() <= 0.02 * value,
        "cost {cost:e}, value {value:e}"
    );
}

#[test]
fn moments_are_the_feedback_law_without_saturation() {
    let pm = reference_model(100);
    let schedule = reference_schedule();
    let traj = simulate_closed_loop(
        &pm,
        &schedule,
        &SimulationConfig::new(reference_x0(), 250).unwrap(),
    )
    .unwrap();
    for (k, m) in traj.moments.iter().enumerate() {
        assert_eq!(m, &-(schedule.gain(k) * &traj.states[k]));
    }
    for (k, t) in traj.times.iter().enumerate() {
        assert_eq!(*t, k as f64 * pm.ts());
    }
    assert_eq!(traj.states[0], reference_x0());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trajectories_are_homogeneous(
        problem in small_problem(),
        x in proptest::collection::vec(-1.0..1.0f64, 2),
        steps in 1usize..40,
    ) {
        let w = &problem.weights;
        let pencil = build_pencil(&problem.model, w.q(), w.r()).unwrap();
        let schedule = solve_periodic_gamma(&pencil, w, &SolveOptions::default()).unwrap();
        let x0 = nalgebra::DVector::from_vec(x);
        let a = simulate_closed_loop(&problem.model, &schedule, &SimulationConfig::new(x0.clone(), steps).unwrap()).unwrap();
        let b = simulate_closed_loop(&problem.model, &schedule, &SimulationConfig::new(&x0 * 2.0, steps).unwrap()).unwrap();
        for (xa, xb) in a.states.iter().zip(&b.states) {
            let scale = xb.norm().max(f64::MIN_POSITIVE);
            prop_assert!((xb - xa * 2.0).norm() <= 1e-10 * scale);
        }
        prop_assert!(monodromy(&problem.model, &schedule).unwrap().spectral_radius < 1.0);
    }
}
