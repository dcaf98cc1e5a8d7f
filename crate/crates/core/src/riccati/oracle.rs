use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::PeriodicDiscreteModel;

use super::{feedback_gains, riccati_step, GainSchedule, SolverTag, WeightConfig};

pub const DEFAULT_ORACLE_PERIODS: usize = 60;
pub const DEFAULT_ORACLE_TOL: f64 = 1e-9;

/// Brute-force periodic solution: iterate the Riccati step backward from
/// `P_N = QN` over whole periods until consecutive periods agree.
///
/// Convergence is declared when the largest relative change of any `P_k`
/// between two consecutive periods is at most `convergence_tol`. The first
/// period is compared against the terminal weight, which plays the role of
/// `P_p = P_0`.
pub fn backward_recursion_oracle(
    pm: &PeriodicDiscreteModel,
    weights: &WeightConfig,
    num_periods: usize,
    convergence_tol: f64,
) -> Result<GainSchedule> {
    if num_periods == 0 {
        return Err(Error::DimensionMismatch(
            "num_periods must be at least 1".into(),
        ));
    }
    let n = pm.state_dim();
    if weights.q().nrows() != n || weights.r().nrows() != pm.input_dim() {
        return Err(Error::DimensionMismatch(
            "weights do not match the model".into(),
        ));
    }
    let p = pm.period();
    let mut next = weights.qn().clone();
    let mut previous: Option<Vec<DMatrix<f64>>> = None;
    let mut change = f64::INFINITY;
    for _ in 0..num_periods {
        let mut current = vec![DMatrix::zeros(n, n); p];
        for k in (0..p).rev() {
            next = riccati_step(pm.ak(), pm.bk(k), weights.q(), weights.r(), &next)?;
            current[k] = next.clone();
        }
        change = match &previous {
            Some(prev) => current
                .iter()
                .zip(prev)
                .map(|(a, b)| linalg::relative_difference(a, b))
                .fold(0.0, f64::max),
            None => linalg::relative_difference(&current[0], weights.qn()),
        };
        if change <= convergence_tol {
            let k_list = feedback_gains(pm, weights.r(), &current)?;
            return GainSchedule::new(current, k_list, pm.ts(), SolverTag::RecursionOracle);
        }
        previous = Some(current);
    }
    Err(Error::NotConverged {
        periods: num_periods,
        change,
    })
}
