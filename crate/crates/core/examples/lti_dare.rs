//! Time-invariant DARE through the ordered Schur form of `E⁻¹F`.

use magnetic_lqr::riccati::{closed_loop_matrix, riccati_step, solve_dare_lti};
use nalgebra::dmatrix;

fn main() -> magnetic_lqr::Result<()> {
    let one = dmatrix![1.0];
    let p = solve_dare_lti(&one, &one, &one, &one)?;
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    println!("scalar P = {:.15}  (golden ratio {golden:.15})", p[(0, 0)]);
    let cl = closed_loop_matrix(&one, &one, &one, &p)?;
    println!(
        "closed loop = {:.15}  (1/(1+P) = {:.15})",
        cl[(0, 0)],
        1.0 / (1.0 + golden)
    );

    let a = dmatrix![1.1, 0.4; -0.2, 0.9];
    let b = dmatrix![0.0; 1.0];
    let q = dmatrix![2.0, 0.3; 0.3, 1.0];
    let r = dmatrix![0.5];
    let p = solve_dare_lti(&a, &b, &q, &r)?;
    let step = riccati_step(&a, &b, &q, &r, &p)?;
    println!("P ={p:.10}");
    println!("|P - step(P)| = {:.3e}", (&p - step).norm());
    Ok(())
}
