//! All four periodic solvers on the same problem, compared pairwise.

use magnetic_lqr::model::{build_continuous, discretize, InertiaMatrix, OrbitParams};
use magnetic_lqr::riccati::{solve_periodic, SolveOptions, SolverTag, WeightConfig};
use magnetic_lqr::symplectic::build_pencil;

fn main() -> magnetic_lqr::Result<()> {
    let j = InertiaMatrix::diagonal(250.0, 150.0, 100.0)?;
    let orbit = OrbitParams::new(657e3, 57f64.to_radians())?;
    let pm = discretize(&build_continuous(&j, &orbit)?, 100)?;
    let w = WeightConfig::diagonal(&[1.5e-9, 1.5e-9, 1.5e-9, 1e-3, 1e-3, 1e-3], &[2e-3; 3])?;
    let options = SolveOptions::default();

    let mut schedules = Vec::new();
    for tag in SolverTag::ALL {
        let pencil = build_pencil(&pm, w.q(), w.r())?;
        let start = std::time::Instant::now();
        let s = solve_periodic(tag, &pencil, &w, &options)?;
        println!(
            "{:<17} {:>8.2?}  inversions {}",
            tag.as_str(),
            start.elapsed(),
            pencil.inversion_count()
        );
        schedules.push((tag, s));
    }
    println!();
    for (i, (ta, a)) in schedules.iter().enumerate() {
        for (tb, b) in &schedules[i + 1..] {
            println!("{ta} vs {tb}: {:.3e}", a.max_relative_difference(b));
        }
    }
    Ok(())
}
