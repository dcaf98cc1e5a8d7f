//! Orbital period, orbital rate, and the dipole field seen along one orbit.

use magnetic_lqr::model::{magnetic_field, OrbitParams};

fn main() -> magnetic_lqr::Result<()> {
    let orbit = OrbitParams::new(657e3, 57f64.to_radians())?;
    let period = orbit.orbital_period();
    println!("orbital period  {period:.3} s");
    println!("orbital rate    {:.6e} rad/s", orbit.orbital_rate());
    println!("field scale     {:.6e} T", orbit.field_scale());
    println!();
    println!(
        "{:>10} {:>14} {:>14} {:>14}",
        "t [s]", "b1 [T]", "b2 [T]", "b3 [T]"
    );
    for i in 0..8 {
        let t = period * i as f64 / 8.0;
        let b = magnetic_field(&orbit, t);
        println!("{t:>10.1} {:>14.6e} {:>14.6e} {:>14.6e}", b[0], b[1], b[2]);
    }
    Ok(())
}
