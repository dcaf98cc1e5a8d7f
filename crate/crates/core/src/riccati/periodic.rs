use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::linalg;
use crate::symplectic::{
    ordered_real_schur, SpectrumOrdering, SymplecticPencil, DEFAULT_UNIT_CIRCLE_TOL,
};

use super::{
    backward_recursion_oracle, feedback_gains, GainSchedule, SolverTag, WeightConfig,
    DEFAULT_ORACLE_PERIODS, DEFAULT_ORACLE_TOL,
};

/// Tunables shared by the periodic solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Minimum `|log|λ||` separating the spectrum from the unit circle.
    pub unit_circle_tol: f64,
    /// Relative separation below which two eigenvalues count as repeated (eigen path).
    pub distinct_tol: f64,
    /// Largest accepted `‖Im P‖ / ‖P‖` after conjugate pairing (eigen path).
    pub imaginary_tol: f64,
    pub oracle_periods: usize,
    pub oracle_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            unit_circle_tol: DEFAULT_UNIT_CIRCLE_TOL,
            distinct_tol: 1e-10,
            imaginary_tol: 1e-8,
            oracle_periods: DEFAULT_ORACLE_PERIODS,
            oracle_tol: DEFAULT_ORACLE_TOL,
        }
    }
}

fn check_weights(pencil: &SymplecticPencil, weights: &WeightConfig) -> Result<()> {
    if pencil.q() != weights.q() || pencil.r() != weights.r() {
        return Err(Error::DimensionMismatch(
            "weights differ from the ones the pencil was built with".into(),
        ));
    }
    weights.check_detectability()
}

fn finish(
    pencil: &SymplecticPencil,
    weights: &WeightConfig,
    p_list: Vec<DMatrix<f64>>,
    solver: SolverTag,
) -> Result<GainSchedule> {
    let k_list = feedback_gains(pencil.model(), weights.r(), &p_list)?;
    GainSchedule::new(p_list, k_list, pencil.model().ts(), solver)
}

/// Dispatches to the solver named by `tag`.
pub fn solve_periodic(
    tag: SolverTag,
    pencil: &SymplecticPencil,
    weights: &WeightConfig,
    options: &SolveOptions,
) -> Result<GainSchedule> {
    match tag {
        SolverTag::GammaSchur => solve_periodic_gamma(pencil, weights, options),
        SolverTag::PiSchur => solve_periodic_pi(pencil, weights, options),
        SolverTag::Eigen => solve_periodic_eigen(pencil, weights, options),
        SolverTag::RecursionOracle => backward_recursion_oracle(
            pencil.model(),
            weights,
            options.oracle_periods,
            options.oracle_tol,
        ),
    }
}

/// Periodic solution from the backward products `Γ_k`.
///
/// For each `k`, the outside-the-circle eigenvalues of `Γ_k` are moved to the
/// front of an ordered real Schur form `W_kᵀ Γ_k W_k` and
/// `P_k = W21k W11k⁻¹`. Only `F⁻¹` is ever inverted.
pub fn solve_periodic_gamma(
    pencil: &SymplecticPencil,
    weights: &WeightConfig,
    options: &SolveOptions,
) -> Result<GainSchedule> {
    check_weights(pencil, weights)?;
    let p_list = (0..pencil.period())
        .map(|k| {
            let gamma = pencil.gamma_product(k)?;
            let schur = ordered_real_schur(
                &gamma,
                SpectrumOrdering::OutsideFirst,
                options.unit_circle_tol,
            )?;
            let p =
                linalg::solve_right(&schur.w11(), &schur.w21()).ok_or(Error::SingularW11 { k })?;
            Ok(linalg::symmetrize(&p))
        })
        .collect::<Result<Vec<_>>>()?;
    finish(pencil, weights, p_list, SolverTag::GammaSchur)
}

/// Periodic solution from the forward products `Π_k`, inside-first ordering,
/// `P_k = T21k T11k⁻¹`. Inverts each `E_k`.
pub fn solve_periodic_pi(
    pencil: &SymplecticPencil,
    weights: &WeightConfig,
    options: &SolveOptions,
) -> Result<GainSchedule> {
    check_weights(pencil, weights)?;
    let p_list = (0..pencil.period())
        .map(|k| {
            let pi = pencil.pi_product(k)?;
            let schur =
                ordered_real_schur(&pi, SpectrumOrdering::InsideFirst, options.unit_circle_tol)?;
            let p =
                linalg::solve_right(&schur.w11(), &schur.w21()).ok_or(Error::SingularW11 { k })?;
            Ok(linalg::symmetrize(&p))
        })
        .collect::<Result<Vec<_>>>()?;
    finish(pencil, weights, p_list, SolverTag::PiSchur)
}

/// Eigenvector of `m` for the simple eigenvalue `lambda`, by inverse iteration.
fn eigenvector(m: &DMatrix<f64>, lambda: Complex<f64>) -> Option<nalgebra::DVector<Complex<f64>>> {
    let dim = m.nrows();
    let shift = lambda + Complex::new(1e-12, 1e-12) * lambda.norm().max(1.0);
    let shifted = DMatrix::from_fn(dim, dim, |i, j| {
        let v = Complex::new(m[(i, j)], 0.0);
        if i == j {
            v - shift
        } else {
            v
        }
    });
    let lu = shifted.lu();
    let mut v = nalgebra::DVector::from_fn(dim, |i, _| Complex::new(1.0 + 0.1 * i as f64, 0.0));
    for _ in 0..3 {
        v = lu.solve(&v)?;
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        v /= Complex::new(norm, 0.0);
    }
    Some(v)
}

/// Periodic solution from eigenvectors of `Γ_k`: the `n` eigenvectors for the
/// eigenvalues outside the unit circle are stacked as `[V11; V21]` and
/// `P_k = V21k V11k⁻¹`.
///
/// Requires distinct eigenvalues; repeated ones fail with
/// [`Error::DefectiveMatrix`].
pub fn solve_periodic_eigen(
    pencil: &SymplecticPencil,
    weights: &WeightConfig,
    options: &SolveOptions,
) -> Result<GainSchedule> {
    check_weights(pencil, weights)?;
    let n = pencil.half_dim();
    let p_list = (0..pencil.period())
        .map(|k| {
            let gamma = pencil.gamma_product(k)?;
            eigen_ratio(&gamma, n, k, options)
        })
        .collect::<Result<Vec<_>>>()?;
    finish(pencil, weights, p_list, SolverTag::Eigen)
}

fn eigen_ratio(
    gamma: &DMatrix<f64>,
    n: usize,
    k: usize,
    options: &SolveOptions,
) -> Result<DMatrix<f64>> {
    let eigs = linalg::eigenvalues(gamma);
    let scale = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut separation = f64::INFINITY;
    for (i, a) in eigs.iter().enumerate() {
        for b in &eigs[i + 1..] {
            separation = separation.min((a - b).norm());
        }
    }
    if separation <= options.distinct_tol * scale {
        return Err(Error::DefectiveMatrix { separation });
    }
    for z in &eigs {
        let margin = z.norm().ln().abs();
        if !(margin > options.unit_circle_tol) {
            return Err(Error::UnitCircleEigenvalue {
                re: z.re,
                im: z.im,
                margin,
                tol: options.unit_circle_tol,
            });
        }
    }
    let outside: Vec<Complex<f64>> = eigs.iter().copied().filter(|z| z.norm() > 1.0).collect();
    if outside.len() != n {
        return Err(Error::UnbalancedSpectrum {
            selected: outside.len(),
            expected: n,
        });
    }

    let dim = 2 * n;
    let mut columns: Vec<nalgebra::DVector<Complex<f64>>> = Vec::with_capacity(n);
    let real_tol = 1e-12 * scale;
    for z in &outside {
        if z.im.abs() <= real_tol {
            let v = eigenvector(gamma, Complex::new(z.re, 0.0)).ok_or(Error::SingularV11 { k })?;
            // A real eigenvector up to a complex phase; rotate onto the real axis.
            let pivot = v
                .iter()
                .copied()
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap();
            let phase = pivot.conj() / pivot.norm();
            columns.push(v.map(|c| Complex::new((c * phase).re, 0.0)));
        } else if z.im > 0.0 {
            let v = eigenvector(gamma, *z).ok_or(Error::SingularV11 { k })?;
            columns.push(v.map(|c| c.conj()));
            columns.push(v);
        }
    }
    if columns.len() != n {
        return Err(Error::UnbalancedSpectrum {
            selected: columns.len(),
            expected: n,
        });
    }
    let v = DMatrix::from_columns(&columns);
    let v11 = v.view((0, 0), (n, n)).into_owned();
    let v21 = v.view((n, 0), (n, n)).into_owned();
    debug_assert_eq!(v.nrows(), dim);

    // P V11 = V21  ⇔  V11ᵀ Pᵀ = V21ᵀ.
    let lu = v11.transpose().full_piv_lu();
    let pt = lu.solve(&v21.transpose()).ok_or(Error::SingularV11 { k })?;
    let p = pt.transpose();
    let re = p.map(|c| c.re);
    let im = p.map(|c| c.im);
    let re_norm = re.norm();
    if !re_norm.is_finite() || pt.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::SingularV11 { k });
    }
    let residue = if re_norm == 0.0 {
        im.norm()
    } else {
        im.norm() / re_norm
    };
    if residue > options.imaginary_tol {
        return Err(Error::ComplexSolution { residue });
    }
    Ok(linalg::symmetrize(&re))
}
