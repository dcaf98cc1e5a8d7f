//! Closed-loop response from a small attitude error, with and without
//! moment saturation, and the realized cost against `x0ᵀ P_0 x0`.

use magnetic_lqr::model::{build_continuous, discretize, InertiaMatrix, OrbitParams};
use magnetic_lqr::riccati::{solve_periodic_gamma, SolveOptions, WeightConfig};
use magnetic_lqr::sim::{monodromy, simulate_closed_loop, SimulationConfig};
use magnetic_lqr::symplectic::build_pencil;
use nalgebra::dvector;

fn main() -> magnetic_lqr::Result<()> {
    let j = InertiaMatrix::diagonal(250.0, 150.0, 100.0)?;
    let orbit = OrbitParams::new(657e3, 57f64.to_radians())?;
    let pm = discretize(&build_continuous(&j, &orbit)?, 100)?;
    let w = WeightConfig::diagonal(&[1.5e-9, 1.5e-9, 1.5e-9, 1e-3, 1e-3, 1e-3], &[2e-3; 3])?;
    let schedule = solve_periodic_gamma(
        &build_pencil(&pm, w.q(), w.r())?,
        &w,
        &SolveOptions::default(),
    )?;
    let p = pm.period();

    let x0 = dvector![0.01, 0.01, 0.01, 1e-5, 1e-5, 1e-5];
    let traj = simulate_closed_loop(&pm, &schedule, &SimulationConfig::new(x0.clone(), 10 * p)?)?;
    let rho = monodromy(&pm, &schedule)?.spectral_radius;
    println!("monodromy spectral radius {rho:.4}");
    for orbit in 0..=10 {
        println!(
            "orbit {orbit:>2}  |x| = {:.4e}",
            traj.states[orbit * p].norm()
        );
    }
    let peak = traj.moments.iter().map(|m| m.amax()).fold(0.0, f64::max);
    println!("peak |m| = {peak:.3} A m^2");

    // The design is linear; a tight enough clamp destabilizes the loop.
    for fraction in [0.5, 0.25] {
        let limit = peak * fraction;
        let cfg = SimulationConfig::new(x0.clone(), 10 * p)?.with_moment_limit(limit)?;
        let sat = simulate_closed_loop(&pm, &schedule, &cfg)?;
        println!(
            "with |m| <= {limit:.3}: final |x| = {:.4e}",
            sat.final_norm()
        );
    }

    let long = simulate_closed_loop(&pm, &schedule, &SimulationConfig::new(x0.clone(), 40 * p)?)?;
    println!(
        "cost over 40 orbits {:.6e}, x0' P_0 x0 = {:.6e}",
        long.quadratic_cost(&w),
        x0.dot(&(schedule.p(0) * &x0))
    );
    Ok(())
}
