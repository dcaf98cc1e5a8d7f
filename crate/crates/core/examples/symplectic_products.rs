//! The backward and forward period products of the symplectic pencil and
//! their structure: symplecticity, reciprocal spectra, and `Γ_k Π_k = I`.

use magnetic_lqr::model::{build_continuous, discretize, InertiaMatrix, OrbitParams};
use magnetic_lqr::riccati::WeightConfig;
use magnetic_lqr::symplectic::{
    build_pencil, is_symplectic, ordered_real_schur, reciprocal_spectrum_defect,
    symplectic_residual, SpectrumOrdering, DEFAULT_UNIT_CIRCLE_TOL,
};
use nalgebra::DMatrix;

fn main() -> magnetic_lqr::Result<()> {
    let j = InertiaMatrix::diagonal(250.0, 150.0, 100.0)?;
    let orbit = OrbitParams::new(657e3, 57f64.to_radians())?;
    let pm = discretize(&build_continuous(&j, &orbit)?, 100)?;
    let w = WeightConfig::diagonal(&[1.5e-9, 1.5e-9, 1.5e-9, 1e-3, 1e-3, 1e-3], &[2e-3; 3])?;
    let pencil = build_pencil(&pm, w.q(), w.r())?;

    let (gamma, diag) = pencil.gamma_product_with_diagnostics(0)?;
    println!("|Gamma_0| = {:.4e}", gamma.norm());
    println!(
        "largest factor norm = {:.4e}",
        diag.factor_norms.iter().cloned().fold(0.0, f64::max)
    );
    println!("symplectic residual = {:.3e}", symplectic_residual(&gamma)?);
    println!("is_symplectic(1e-8) = {}", is_symplectic(&gamma, 1e-8)?);
    println!(
        "reciprocal spectrum defect = {:.3e}",
        reciprocal_spectrum_defect(&gamma)?
    );

    let schur = ordered_real_schur(
        &gamma,
        SpectrumOrdering::OutsideFirst,
        DEFAULT_UNIT_CIRCLE_TOL,
    )?;
    let mut moduli: Vec<f64> = schur.eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    println!("eigenvalue moduli = {moduli:.4?}");

    let pi = pencil.pi_product(0)?;
    let n2 = 2 * pm.state_dim();
    println!(
        "|Gamma_0 Pi_0 - I| = {:.3e}",
        (&gamma * &pi - DMatrix::identity(n2, n2)).norm()
    );
    println!("2n x 2n inversions so far = {}", pencil.inversion_count());
    Ok(())
}
