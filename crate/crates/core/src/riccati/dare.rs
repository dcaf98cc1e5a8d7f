use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::symplectic::{ordered_real_schur, SpectrumOrdering, DEFAULT_UNIT_CIRCLE_TOL};

use super::{validate_input_weight, validate_state_weight};

/// Stabilizing solution of the time-invariant DARE.
///
/// Forms the symplectic matrix
///
/// ```text
/// Z = E⁻¹F = [A + G A⁻ᵀ Q, -G A⁻ᵀ; -A⁻ᵀ Q, A⁻ᵀ],   G = B R⁻¹ Bᵀ
/// ```
///
/// moves its inside-the-circle eigenvalues to the front of an ordered real
/// Schur form `Uᵀ Z U`, and returns `P = U21 U11⁻¹`.
pub fn solve_dare_lti(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    solve_dare_lti_with(a, b, q, r, DEFAULT_UNIT_CIRCLE_TOL)
}

pub fn solve_dare_lti_with(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    unit_circle_tol: f64,
) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if !a.is_square()
        || b.nrows() != n
        || q.shape() != (n, n)
        || r.shape() != (b.ncols(), b.ncols())
    {
        return Err(Error::DimensionMismatch(format!(
            "A {}x{}, B {}x{}, Q {}x{}, R {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            q.nrows(),
            q.ncols(),
            r.nrows(),
            r.ncols()
        )));
    }
    validate_state_weight(q)?;
    validate_input_weight(r)?;
    let a_inv_t = linalg::checked_inverse(a)
        .ok_or(Error::SingularAk {
            ts: f64::NAN,
            det: a.determinant(),
        })?
        .transpose();
    let g = b * linalg::solve_spd(r, &b.transpose()).ok_or(Error::IndefiniteR)?;
    let g_ait = &g * &a_inv_t;
    let z = linalg::block2x2(&(a + &g_ait * q), &(-&g_ait), &(-(&a_inv_t * q)), &a_inv_t);
    let schur = ordered_real_schur(&z, SpectrumOrdering::InsideFirst, unit_circle_tol)?;
    let p = linalg::solve_right(&schur.w11(), &schur.w21()).ok_or(Error::SingularU11)?;
    Ok(linalg::symmetrize(&p))
}

/// `A - B (R + BᵀPB)⁻¹ BᵀPA`.
pub fn closed_loop_matrix(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    r: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let s = r + b.transpose() * p * b;
    let k = linalg::solve_spd(&s, &(b.transpose() * p * a)).ok_or(Error::IndefiniteR)?;
    Ok(a - b * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riccati::riccati_step;
    use nalgebra::dmatrix;

    #[test]
    fn scalar_golden_ratio() {
        let one = dmatrix![1.0];
        let p = solve_dare_lti(&one, &one, &one, &one).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((p[(0, 0)] - golden).abs() < 1e-12);
        let cl = closed_loop_matrix(&one, &one, &one, &p).unwrap();
        assert!((cl[(0, 0)] - 1.0 / (1.0 + golden)).abs() < 1e-12);
    }

    #[test]
    fn zero_input_stable_plant() {
        let a = dmatrix![0.5, 0.2; 0.0, -0.3];
        let b = DMatrix::zeros(2, 1);
        let p = solve_dare_lti(&a, &b, &DMatrix::zeros(2, 2), &dmatrix![1.0]).unwrap();
        assert!(p.amax() < 1e-14);
    }

    #[test]
    fn two_state_fixed_point() {
        let a = dmatrix![1.1, 0.4; -0.2, 0.9];
        let b = dmatrix![0.0; 1.0];
        let q = dmatrix![2.0, 0.3; 0.3, 1.0];
        let r = dmatrix![0.5];
        let p = solve_dare_lti(&a, &b, &q, &r).unwrap();
        let next = riccati_step(&a, &b, &q, &r, &p).unwrap();
        assert!(linalg::relative_difference(&p, &next) < 1e-12);
        let cl = closed_loop_matrix(&a, &b, &r, &p).unwrap();
        assert!(linalg::spectral_radius(&cl) < 1.0);
        assert!(linalg::min_symmetric_eigenvalue(&p) > 0.0);
    }

    #[test]
    fn uncontrollable_unstable_mode_fails() {
        let a = dmatrix![2.0, 0.0; 0.0, 0.5];
        let b = dmatrix![0.0; 1.0];
        let q = DMatrix::identity(2, 2);
        let result = solve_dare_lti(&a, &b, &q, &dmatrix![1.0]);
        assert!(result.is_err(), "{result:?}");
    }
}
