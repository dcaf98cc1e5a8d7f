//! Discrete Riccati solvers.
//!
//! The periodic equation
//!
//! ```text
//! P_k = Q + AkᵀP_{k+1}Ak - AkᵀP_{k+1}B_k (R + B_kᵀP_{k+1}B_k)⁻¹ B_kᵀP_{k+1}Ak
//! ```
//!
//! with `P_{k+p} = P_k` is solved four ways: from the backward period
//! products `Γ_k` (one 2n×2n inversion in total), from the forward products
//! `Π_k` (`p` inversions), from eigenvectors of `Γ_k`, and by plain backward
//! iteration as an oracle. The optimal feedback is `m_k = -K_k x_k` with
//! `K_k = (R + B_kᵀP_{k+1}B_k)⁻¹ B_kᵀP_{k+1}Ak`.

mod dare;
mod oracle;
mod periodic;

pub use dare::{closed_loop_matrix, solve_dare_lti, solve_dare_lti_with};
pub use oracle::{backward_recursion_oracle, DEFAULT_ORACLE_PERIODS, DEFAULT_ORACLE_TOL};
pub use periodic::{
    solve_periodic, solve_periodic_eigen, solve_periodic_gamma, solve_periodic_pi, SolveOptions,
};

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::PeriodicDiscreteModel;

const SYMMETRY_TOL: f64 = 1e-12;

pub(crate) fn validate_state_weight(q: &DMatrix<f64>) -> Result<()> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch(
            "state weight must be square".into(),
        ));
    }
    let scale = q.norm();
    if (q - q.transpose()).norm() > SYMMETRY_TOL * scale {
        return Err(Error::AsymmetricWeight { which: "state" });
    }
    let min_eig = linalg::min_symmetric_eigenvalue(q);
    if !min_eig.is_finite() || min_eig < -1e-12 * scale {
        return Err(Error::NegativeQ { min_eig });
    }
    Ok(())
}

pub(crate) fn validate_input_weight(r: &DMatrix<f64>) -> Result<()> {
    if !r.is_square() || r.is_empty() {
        return Err(Error::DimensionMismatch(
            "input weight must be square and nonempty".into(),
        ));
    }
    if (r - r.transpose()).norm() > SYMMETRY_TOL * r.norm() {
        return Err(Error::AsymmetricWeight { which: "input" });
    }
    if !(linalg::min_symmetric_eigenvalue(r) > 0.0) || r.clone().cholesky().is_none() {
        return Err(Error::IndefiniteR);
    }
    Ok(())
}

/// State, input, and terminal weights of the quadratic cost.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightConfig {
    q: DMatrix<f64>,
    r: DMatrix<f64>,
    qn: DMatrix<f64>,
    assume_detectable: bool,
}

impl WeightConfig {
    /// Terminal weight defaults to `q`.
    pub fn new(q: DMatrix<f64>, r: DMatrix<f64>) -> Result<Self> {
        validate_state_weight(&q)?;
        validate_input_weight(&r)?;
        Ok(Self {
            qn: q.clone(),
            q,
            r,
            assume_detectable: false,
        })
    }

    pub fn diagonal(q: &[f64], r: &[f64]) -> Result<Self> {
        Self::new(
            DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(q)),
            DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(r)),
        )
    }

    pub fn with_terminal(mut self, qn: DMatrix<f64>) -> Result<Self> {
        if qn.shape() != self.q.shape() {
            return Err(Error::DimensionMismatch(
                "terminal weight must match Q".into(),
            ));
        }
        validate_state_weight(&qn)?;
        self.qn = qn;
        Ok(self)
    }

    /// Accept `(Ak, Q)` as detectable even when `Q` is only semi-definite.
    pub fn assume_detectable(mut self, yes: bool) -> Self {
        self.assume_detectable = yes;
        self
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn qn(&self) -> &DMatrix<f64> {
        &self.qn
    }

    pub fn detectability_asserted(&self) -> bool {
        self.assume_detectable
    }

    pub(crate) fn check_detectability(&self) -> Result<()> {
        if self.assume_detectable || self.q.clone().cholesky().is_some() {
            Ok(())
        } else {
            Err(Error::DetectabilityUnverified)
        }
    }
}

/// How a [`GainSchedule`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverTag {
    GammaSchur,
    PiSchur,
    Eigen,
    RecursionOracle,
}

impl SolverTag {
    pub const ALL: [SolverTag; 4] = [
        SolverTag::GammaSchur,
        SolverTag::PiSchur,
        SolverTag::Eigen,
        SolverTag::RecursionOracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverTag::GammaSchur => "gamma-schur",
            SolverTag::PiSchur => "pi-schur",
            SolverTag::Eigen => "eigen",
            SolverTag::RecursionOracle => "recursion-oracle",
        }
    }
}

impl fmt::Display for SolverTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverTag {
    type Err = String;

    /// Accepts both the full tags and the short names `gamma`, `pi`, `eigen`, `recursion`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "gamma" | "gamma-schur" => Ok(SolverTag::GammaSchur),
            "pi" | "pi-schur" => Ok(SolverTag::PiSchur),
            "eigen" => Ok(SolverTag::Eigen),
            "recursion" | "recursion-oracle" => Ok(SolverTag::RecursionOracle),
            other => Err(format!(
                "unknown solver `{other}` (expected gamma, pi, eigen, or recursion)"
            )),
        }
    }
}

/// The periodic Riccati solutions `P_k` and feedback gains `K_k` for one period.
#[derive(Clone, Debug, PartialEq)]
pub struct GainSchedule {
    p_list: Vec<DMatrix<f64>>,
    k_list: Vec<DMatrix<f64>>,
    ts: f64,
    solver: SolverTag,
}

impl GainSchedule {
    pub fn new(
        p_list: Vec<DMatrix<f64>>,
        k_list: Vec<DMatrix<f64>>,
        ts: f64,
        solver: SolverTag,
    ) -> Result<Self> {
        if p_list.is_empty() || p_list.len() != k_list.len() {
            return Err(Error::DimensionMismatch(format!(
                "schedule needs equally many P and K matrices, got {} and {}",
                p_list.len(),
                k_list.len()
            )));
        }
        let n = p_list[0].nrows();
        let m = k_list[0].nrows();
        if p_list.iter().any(|p| p.shape() != (n, n)) || k_list.iter().any(|k| k.shape() != (m, n))
        {
            return Err(Error::DimensionMismatch(
                "inconsistent matrix shapes in schedule".into(),
            ));
        }
        Ok(Self {
            p_list,
            k_list,
            ts,
            solver,
        })
    }

    pub fn period(&self) -> usize {
        self.p_list.len()
    }

    pub fn state_dim(&self) -> usize {
        self.p_list[0].nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.k_list[0].nrows()
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    pub fn solver(&self) -> SolverTag {
        self.solver
    }

    /// `P_k`, index mod `p`.
    pub fn p(&self, k: usize) -> &DMatrix<f64> {
        &self.p_list[k % self.p_list.len()]
    }

    /// `K_k`, index mod `p`.
    pub fn gain(&self, k: usize) -> &DMatrix<f64> {
        &self.k_list[k % self.k_list.len()]
    }

    pub fn p_list(&self) -> &[DMatrix<f64>] {
        &self.p_list
    }

    pub fn k_list(&self) -> &[DMatrix<f64>] {
        &self.k_list
    }

    /// Largest `‖P_k - P_kᵀ‖ / ‖P_k‖` over the period.
    pub fn max_asymmetry(&self) -> f64 {
        self.p_list
            .iter()
            .map(|p| {
                let scale = p.norm();
                if scale == 0.0 {
                    0.0
                } else {
                    (p - p.transpose()).norm() / scale
                }
            })
            .fold(0.0, f64::max)
    }

    /// Smallest `λ_min(P_k) / ‖P_k‖` over the period; negative values flag indefiniteness.
    pub fn min_psd_margin(&self) -> f64 {
        self.p_list
            .iter()
            .map(|p| {
                let scale = p.norm();
                if scale == 0.0 {
                    0.0
                } else {
                    linalg::min_symmetric_eigenvalue(p) / scale
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest relative elementwise-norm difference of `P_k` against another schedule.
    pub fn max_relative_difference(&self, other: &GainSchedule) -> f64 {
        self.p_list
            .iter()
            .zip(&other.p_list)
            .map(|(a, b)| linalg::relative_difference(a, b))
            .fold(0.0, f64::max)
    }
}

/// One backward step of the Riccati recursion, `P_k` from `P_{k+1}`.
pub fn riccati_step(
    ak: &DMatrix<f64>,
    bk: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    p_next: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let pa = p_next * ak;
    let bt_pa = bk.transpose() * &pa;
    let s = r + bk.transpose() * p_next * bk;
    let gain = linalg::solve_spd(&s, &bt_pa).ok_or(Error::IndefiniteR)?;
    let next = q + ak.transpose() * &pa - bt_pa.transpose() * gain;
    Ok(linalg::symmetrize(&next))
}

/// `K_k = (R + B_kᵀP_{k+1}B_k)⁻¹ B_kᵀP_{k+1}Ak` for every `k`, with `P_p = P_0`.
pub fn feedback_gains(
    pm: &PeriodicDiscreteModel,
    r: &DMatrix<f64>,
    p_list: &[DMatrix<f64>],
) -> Result<Vec<DMatrix<f64>>> {
    let p = pm.period();
    if p_list.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "expected {p} Riccati solutions, got {}",
            p_list.len()
        )));
    }
    (0..p)
        .map(|k| {
            let b = pm.bk(k);
            let p_next = &p_list[(k + 1) % p];
            let s = r + b.transpose() * p_next * b;
            linalg::solve_spd(&s, &(b.transpose() * p_next * pm.ak())).ok_or(Error::IndefiniteR)
        })
        .collect()
}

/// Relative residual of the periodic Riccati equation at every `k`:
/// `‖P_k - step(P_{k+1})‖ / max(‖P_k‖, ‖step(P_{k+1})‖)` with `P_p = P_0`.
pub fn riccati_residual(
    pm: &PeriodicDiscreteModel,
    weights: &WeightConfig,
    schedule: &GainSchedule,
) -> Result<Vec<f64>> {
    let p = pm.period();
    if schedule.period() != p || schedule.state_dim() != pm.state_dim() {
        return Err(Error::DimensionMismatch(format!(
            "schedule has period {} and dimension {}, model has {p} and {}",
            schedule.period(),
            schedule.state_dim(),
            pm.state_dim()
        )));
    }
    (0..p)
        .map(|k| {
            let rhs = riccati_step(
                pm.ak(),
                pm.bk(k),
                weights.q(),
                weights.r(),
                schedule.p(k + 1),
            )?;
            Ok(linalg::relative_difference(schedule.p(k), &rhs))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn solver_tag_round_trip() {
        for tag in SolverTag::ALL {
            assert_eq!(tag.as_str().parse::<SolverTag>().unwrap(), tag);
        }
        assert_eq!("pi".parse::<SolverTag>().unwrap(), SolverTag::PiSchur);
        assert!("newton".parse::<SolverTag>().is_err());
    }

    #[test]
    fn weight_validation() {
        assert!(WeightConfig::diagonal(&[1.0, 0.0], &[1.0]).is_ok());
        assert!(matches!(
            WeightConfig::diagonal(&[1.0, -1.0], &[1.0]),
            Err(Error::NegativeQ { .. })
        ));
        assert!(matches!(
            WeightConfig::diagonal(&[1.0], &[0.0]),
            Err(Error::IndefiniteR)
        ));
        assert!(matches!(
            WeightConfig::new(dmatrix![1.0, 0.5; 0.0, 1.0], dmatrix![1.0]),
            Err(Error::AsymmetricWeight { which: "state" })
        ));
        let w = WeightConfig::diagonal(&[1.0, 0.0], &[1.0]).unwrap();
        assert!(matches!(
            w.check_detectability(),
            Err(Error::DetectabilityUnverified)
        ));
        assert!(w.assume_detectable(true).check_detectability().is_ok());
    }

    #[test]
    fn zero_schedule_has_unit_residual() {
        let pm = PeriodicDiscreteModel::new(dmatrix![1.0], vec![dmatrix![1.0]; 3], 1.0).unwrap();
        let w = WeightConfig::diagonal(&[1.0], &[1.0]).unwrap();
        let zero = GainSchedule::new(
            vec![dmatrix![0.0]; 3],
            vec![dmatrix![0.0]; 3],
            1.0,
            SolverTag::GammaSchur,
        )
        .unwrap();
        for r in riccati_residual(&pm, &w, &zero).unwrap() {
            assert_eq!(r, 1.0);
        }
    }

    #[test]
    fn schedule_shape_checks() {
        assert!(GainSchedule::new(vec![], vec![], 1.0, SolverTag::Eigen).is_err());
        assert!(GainSchedule::new(
            vec![dmatrix![1.0]],
            vec![dmatrix![1.0, 2.0]],
            1.0,
            SolverTag::Eigen
        )
        .is_err());
    }

    #[test]
    fn scalar_step_fixed_point() {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let one = dmatrix![1.0];
        let next = riccati_step(&one, &one, &one, &one, &dmatrix![golden]).unwrap();
        assert!((next[(0, 0)] - golden).abs() < 1e-15);
    }
}
