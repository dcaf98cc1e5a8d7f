mod common;

use magnetic_lqr::model::{
    build_continuous, discretize, magnetic_field, InertiaMatrix, OrbitParams,
};
use proptest::prelude::*;

fn distinct_moments() -> impl Strategy<Value = (f64, f64, f64)> {
    (50.0..400.0f64, 50.0..400.0f64, 50.0..400.0f64).prop_filter("distinct", |(a, b, c)| {
        (a - b).abs() > 1.0 && (b - c).abs() > 1.0 && (a - c).abs() > 1.0
    })
}

fn orbit() -> impl Strategy<Value = OrbitParams> {
    (300e3..1500e3f64, 0.0..std::f64::consts::PI)
        .prop_map(|(alt, inc)| OrbitParams::new(alt, inc).unwrap())
}

proptest! {
    #[test]
    fn input_coupling_identities((j11, j22, j33) in distinct_moments(), orbit in orbit(), t in 0.0..20000.0f64) {
        let j = InertiaMatrix::diagonal(j11, j22, j33).unwrap();
        let cm = build_continuous(&j, &orbit).unwrap();
        let c = cm.input_coefficients(t);
        let tol = 1e-15 * (c.b42.abs() * j11 + c.b43.abs() * j11 + c.b53.abs() * j22).max(1e-300);
        prop_assert!((c.b51 * j22 + c.b42 * j11).abs() <= tol);
        prop_assert!((c.b61 * j33 + c.b43 * j11).abs() <= tol);
        prop_assert!((c.b62 * j33 + c.b53 * j22).abs() <= tol);
    }

    #[test]
    fn field_is_periodic(orbit in orbit(), t in 0.0..20000.0f64) {
        let b0 = magnetic_field(&orbit, t);
        let b1 = magnetic_field(&orbit, t + orbit.orbital_period());
        prop_assert!((b0 - b1).norm() <= 1e-12 * b0.norm());
    }

    #[test]
    fn discrete_determinant_identity((j11, j22, j33) in distinct_moments(), orbit in orbit(), p in 1usize..200) {
        let j = InertiaMatrix::diagonal(j11, j22, j33).unwrap();
        let cm = build_continuous(&j, &orbit).unwrap();
        if let Ok(pm) = discretize(&cm, p) {
            let a = pm.ak().determinant();
            let b = cm.discrete_determinant(pm.ts());
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(b.abs()), "{} vs {}", a, b);
        }
    }

    #[test]
    fn sampled_input_structure((j11, j22, j33) in distinct_moments(), orbit in orbit(), p in 1usize..200) {
        let j = InertiaMatrix::diagonal(j11, j22, j33).unwrap();
        let cm = build_continuous(&j, &orbit).unwrap();
        if let Ok(pm) = discretize(&cm, p) {
            for bk in pm.bk_list() {
                for r in 0..3 {
                    for c in 0..3 {
                        prop_assert_eq!(bk[(r, c)], 0.0);
                    }
                }
                for i in 0..3 {
                    prop_assert_eq!(bk[(3 + i, i)], 0.0);
                }
            }
        }
    }
}

#[test]
fn fine_sampling_approaches_identity() {
    let cm = common::reference_continuous();
    let pm = discretize(&cm, 1_000_000).unwrap();
    let d = pm.ak() - nalgebra::DMatrix::<f64>::identity(6, 6);
    assert!(d.amax() < 1e-2);
}
