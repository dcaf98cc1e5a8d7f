//! Linearized attitude model and its periodic discretization.

use magnetic_lqr::model::{build_continuous, discretize, InertiaMatrix, OrbitParams};

fn main() -> magnetic_lqr::Result<()> {
    let j = InertiaMatrix::diagonal(250.0, 150.0, 100.0)?;
    let orbit = OrbitParams::new(657e3, 57f64.to_radians())?;
    let cm = build_continuous(&j, &orbit)?;
    println!("omega0 = {:.6e} rad/s", cm.omega0);
    println!(
        "f41 = {:.4e}  f46 = {:.4e}  f52 = {:.4e}  f63 = {:.4e}  f64 = {:.4e}",
        cm.f41, cm.f46, cm.f52, cm.f63, cm.f64
    );
    println!("A ={:.4e}", cm.a());
    println!("B(P/4) ={:.4e}", cm.b(cm.orbital_period() / 4.0));

    let pm = discretize(&cm, 100)?;
    println!("p = {}, ts = {:.4} s", pm.period(), pm.ts());
    println!("det(Ak) = {:.6e}", pm.ak().determinant());

    // Equal principal moments make the linearization singular.
    let symmetric = InertiaMatrix::diagonal(150.0, 150.0, 100.0)?;
    match build_continuous(&symmetric, &orbit) {
        Err(e) => println!("J = diag(150, 150, 100): {e}"),
        Ok(_) => println!("J = diag(150, 150, 100) unexpectedly accepted"),
    }
    Ok(())
}
