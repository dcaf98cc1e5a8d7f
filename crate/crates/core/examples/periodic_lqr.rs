//! Periodic LQR for the 250/150/100 kg m² spacecraft at 657 km, 100 samples
//! per orbit, solved from the backward products with a single inversion.

use magnetic_lqr::model::{build_continuous, discretize, InertiaMatrix, OrbitParams};
use magnetic_lqr::riccati::{riccati_residual, solve_periodic_gamma, SolveOptions, WeightConfig};
use magnetic_lqr::sim::monodromy;
use magnetic_lqr::symplectic::build_pencil;

fn main() -> magnetic_lqr::Result<()> {
    let j = InertiaMatrix::diagonal(250.0, 150.0, 100.0)?;
    let orbit = OrbitParams::new(657e3, 57f64.to_radians())?;
    let pm = discretize(&build_continuous(&j, &orbit)?, 100)?;
    let w = WeightConfig::diagonal(&[1.5e-9, 1.5e-9, 1.5e-9, 1e-3, 1e-3, 1e-3], &[2e-3; 3])?;
    let pencil = build_pencil(&pm, w.q(), w.r())?;

    let schedule = solve_periodic_gamma(&pencil, &w, &SolveOptions::default())?;
    let residual = riccati_residual(&pm, &w, &schedule)?
        .into_iter()
        .fold(0.0, f64::max);
    println!("p = {}, ts = {:.4} s", schedule.period(), schedule.ts());
    println!("max Riccati residual = {residual:.3e}");
    println!("min PSD margin = {:.3e}", schedule.min_psd_margin());
    println!("2n x 2n inversions = {}", pencil.inversion_count());
    println!(
        "monodromy spectral radius = {:.6}",
        monodromy(&pm, &schedule)?.spectral_radius
    );
    println!("P_0 ={:.5e}", schedule.p(0));
    println!("K_0 ={:.5e}", schedule.gain(0));
    Ok(())
}
