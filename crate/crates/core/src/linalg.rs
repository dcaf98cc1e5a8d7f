//! Small dense helpers shared by the solvers.

use nalgebra::{Complex, DMatrix};

/// Condition estimate above which an inverse or solve is treated as singular.
pub(crate) const MAX_CONDITION: f64 = 1e14;

pub(crate) fn block(m: &DMatrix<f64>, r: usize, c: usize, nr: usize, nc: usize) -> DMatrix<f64> {
    m.view((r, c), (nr, nc)).into_owned()
}

/// Assembles `[a, b; c, d]`.
pub(crate) fn block2x2(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    d: &DMatrix<f64>,
) -> DMatrix<f64> {
    let (r1, c1) = a.shape();
    let (r2, c2) = d.shape();
    let mut m = DMatrix::zeros(r1 + r2, c1 + c2);
    m.view_mut((0, 0), (r1, c1)).copy_from(a);
    m.view_mut((0, c1), (r1, c2)).copy_from(b);
    m.view_mut((r1, 0), (r2, c1)).copy_from(c);
    m.view_mut((r1, c1), (r2, c2)).copy_from(d);
    m
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Inverse via partial-pivot LU, rejected when the 1-norm condition estimate is too large.
pub(crate) fn checked_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let inv = m.clone().lu().try_inverse()?;
    let cond = norm1(m) * norm1(&inv);
    (cond.is_finite() && cond < MAX_CONDITION).then_some(inv)
}

/// Solves `X * a = b` for `X` without forming `a^{-1}`.
pub(crate) fn solve_right(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let lu = a.transpose().full_piv_lu();
    if !lu.is_invertible() {
        return None;
    }
    let xt = lu.solve(&b.transpose())?;
    let x = xt.transpose();
    let growth = x.norm() * a.norm() / b.norm().max(f64::MIN_POSITIVE);
    (x.iter().all(|v| v.is_finite()) && growth < MAX_CONDITION).then_some(x)
}

/// Solves `a * X = b` for a symmetric positive definite `a`.
pub(crate) fn solve_spd(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    a.clone().cholesky().map(|c| c.solve(b))
}

pub(crate) fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    symmetrize(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex<f64>> {
    m.complex_eigenvalues().iter().copied().collect()
}

pub(crate) fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    eigenvalues(m).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖a - b‖ / max(‖a‖, ‖b‖)`, zero when both vanish.
pub(crate) fn relative_difference(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn block_assembly_places_quadrants() {
        let a = dmatrix![1.0];
        let b = dmatrix![2.0];
        let c = dmatrix![3.0];
        let d = dmatrix![4.0];
        assert_eq!(block2x2(&a, &b, &c, &d), dmatrix![1.0, 2.0; 3.0, 4.0]);
    }

    #[test]
    fn solve_right_matches_inverse() {
        let a = dmatrix![4.0, 1.0; 2.0, 3.0];
        let b = dmatrix![1.0, 2.0; 3.0, 4.0; 5.0, 6.0];
        let x = solve_right(&a, &b).unwrap();
        let expected = &b * a.clone().try_inverse().unwrap();
        assert!((x - expected).norm() < 1e-12);
    }

    #[test]
    fn singular_inputs_are_rejected() {
        let a = dmatrix![1.0, 2.0; 2.0, 4.0];
        assert!(checked_inverse(&a).is_none());
        assert!(solve_right(&a, &DMatrix::identity(2, 2)).is_none());
    }
}
