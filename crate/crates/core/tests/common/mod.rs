#![allow(dead_code)]

use magnetic_lqr::model::{
    build_continuous, discretize, ContinuousModel, InertiaMatrix, OrbitParams,
    PeriodicDiscreteModel,
};
use magnetic_lqr::riccati::WeightConfig;
use nalgebra::DMatrix;
use proptest::prelude::*;

pub const REFERENCE_CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/reference.toml");

pub fn reference_orbit() -> OrbitParams {
    OrbitParams::new(657e3, 57f64.to_radians()).unwrap()
}

pub fn reference_continuous() -> ContinuousModel {
    let j = InertiaMatrix::diagonal(250.0, 150.0, 100.0).unwrap();
    build_continuous(&j, &reference_orbit()).unwrap()
}

pub fn reference_model(p: usize) -> PeriodicDiscreteModel {
    discretize(&reference_continuous(), p).unwrap()
}

pub fn reference_weights() -> WeightConfig {
    WeightConfig::diagonal(&[1.5e-9, 1.5e-9, 1.5e-9, 1e-3, 1e-3, 1e-3], &[2e-3; 3]).unwrap()
}

pub fn reference_x0() -> nalgebra::DVector<f64> {
    nalgebra::dvector![0.01, 0.01, 0.01, 1e-5, 1e-5, 1e-5]
}

/// A small periodic LQR problem: `n = 2`, one or two inputs, `p ≤ 5`,
/// `Ak = I + 0.3·noise`, positive definite diagonal `Q` and `R`.
#[derive(Clone, Debug)]
pub struct SmallProblem {
    pub model: PeriodicDiscreteModel,
    pub weights: WeightConfig,
}

fn matrix(rows: usize, cols: usize, scale: f64) -> impl Strategy<Value = DMatrix<f64>> {
    proptest::collection::vec(-1.0..1.0f64, rows * cols)
        .prop_map(move |v| DMatrix::from_vec(rows, cols, v) * scale)
}

pub fn small_problem() -> impl Strategy<Value = SmallProblem> {
    (1usize..=5, 1usize..=2).prop_flat_map(|(p, m)| {
        (
            matrix(2, 2, 0.3),
            proptest::collection::vec(matrix(2, m, 1.0), p),
            proptest::collection::vec(0.5..2.0f64, 2),
            proptest::collection::vec(0.5..2.0f64, m),
        )
            .prop_filter_map("well-conditioned instance", |(noise, bk, q, r)| {
                let ak = DMatrix::identity(2, 2) + noise;
                if ak.determinant().abs() < 0.2 {
                    return None;
                }
                // Every sample must carry some control authority.
                if bk.iter().any(|b| b.norm() < 0.3) {
                    return None;
                }
                let model = PeriodicDiscreteModel::new(ak, bk, 1.0).ok()?;
                let weights = WeightConfig::diagonal(&q, &r).ok()?;
                Some(SmallProblem { model, weights })
            })
    })
}
