//! Linearized reduced-quaternion attitude model for a nadir-pointing
//! spacecraft actuated only by magnetic coils, and its periodic discretization.
//!
//! State ordering is `[q1, q2, q3, w1, w2, w3]` (vector part of the attitude
//! quaternion relative to LVLH, then body rates); the input is the coil
//! magnetic moment `[m1, m2, m3]` in A·m².

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Matrix6, Matrix6x3, Vector3};

use crate::error::{Error, Result};
use crate::linalg;

/// Earth gravitational parameter, m³/s².
pub const GM_EARTH: f64 = 3.986005e14;
/// Dipole strength of the geomagnetic field, Wb·m.
pub const DIPOLE_STRENGTH: f64 = 7.9e15;
/// Mean Earth radius, m.
pub const EARTH_MEAN_RADIUS: f64 = 6.371e6;

pub const STATE_DIM: usize = 6;
pub const INPUT_DIM: usize = 3;

/// Spacecraft inertia matrix in kg·m².
#[derive(Clone, Debug, PartialEq)]
pub struct InertiaMatrix(Matrix3<f64>);

impl InertiaMatrix {
    /// Accepts any exactly symmetric positive definite matrix.
    pub fn new(j: Matrix3<f64>) -> Result<Self> {
        if j != j.transpose() {
            return Err(Error::InvalidInertia("matrix is not symmetric".into()));
        }
        if j.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInertia(
                "matrix has non-finite entries".into(),
            ));
        }
        let min_eig = j.symmetric_eigenvalues().min();
        if min_eig <= 0.0 {
            return Err(Error::InvalidInertia(format!(
                "matrix is not positive definite (min eigenvalue {min_eig})"
            )));
        }
        Ok(Self(j))
    }

    pub fn diagonal(j11: f64, j22: f64, j33: f64) -> Result<Self> {
        Self::new(Matrix3::from_diagonal(&Vector3::new(j11, j22, j33)))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// Diagonal entries `(J11, J22, J33)`.
    pub fn principal_moments(&self) -> [f64; 3] {
        [self.0[(0, 0)], self.0[(1, 1)], self.0[(2, 2)]]
    }

    pub fn is_diagonal(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| i == j || self.0[(i, j)] == 0.0))
    }

    /// True when no two diagonal moments coincide, which is what keeps `A` nonsingular.
    pub fn has_distinct_principal_axes(&self) -> bool {
        let [a, b, c] = self.principal_moments();
        a != b && a != c && b != c
    }
}

/// Circular orbit and dipole-field parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitParams {
    pub altitude_m: f64,
    pub magnetic_inclination_rad: f64,
    pub earth_radius_m: f64,
    pub gm: f64,
    pub dipole_strength: f64,
}

impl OrbitParams {
    pub fn new(altitude_m: f64, magnetic_inclination_rad: f64) -> Result<Self> {
        Self::with_earth_radius(altitude_m, magnetic_inclination_rad, EARTH_MEAN_RADIUS)
    }

    pub fn with_earth_radius(
        altitude_m: f64,
        magnetic_inclination_rad: f64,
        earth_radius_m: f64,
    ) -> Result<Self> {
        let orbit = Self {
            altitude_m,
            magnetic_inclination_rad,
            earth_radius_m,
            gm: GM_EARTH,
            dipole_strength: DIPOLE_STRENGTH,
        };
        orbit.validate()?;
        Ok(orbit)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.altitude_m > 0.0) || !self.altitude_m.is_finite() {
            return Err(Error::InvalidOrbit(format!(
                "altitude must be positive, got {}",
                self.altitude_m
            )));
        }
        if !(0.0..=PI).contains(&self.magnetic_inclination_rad) {
            return Err(Error::InvalidOrbit(format!(
                "magnetic inclination must lie in [0, pi], got {}",
                self.magnetic_inclination_rad
            )));
        }
        if !(self.earth_radius_m > 0.0) || !self.earth_radius_m.is_finite() {
            return Err(Error::InvalidOrbit(format!(
                "earth radius must be positive, got {}",
                self.earth_radius_m
            )));
        }
        if !(self.gm > 0.0) {
            return Err(Error::InvalidOrbit("GM must be positive".into()));
        }
        Ok(())
    }

    /// Orbital radius `a = R_earth + altitude`.
    pub fn radius(&self) -> f64 {
        self.earth_radius_m + self.altitude_m
    }

    /// Field magnitude scale `mu_f / a³`, tesla.
    pub fn field_scale(&self) -> f64 {
        self.dipole_strength / self.radius().powi(3)
    }

    pub fn orbital_period(&self) -> f64 {
        orbital_period(self)
    }

    /// Orbital rate `omega0 = 2 pi / P`, rad/s.
    pub fn orbital_rate(&self) -> f64 {
        2.0 * PI / orbital_period(self)
    }
}

/// Circular-orbit period `2 pi sqrt(a³ / GM)` in seconds.
pub fn orbital_period(orbit: &OrbitParams) -> f64 {
    2.0 * PI * (orbit.radius().powi(3) / orbit.gm).sqrt()
}

/// Dipole approximation of the geomagnetic field in the orbit frame, tesla.
///
/// `t` is measured from the ascending-node crossing of the magnetic equator.
pub fn magnetic_field(orbit: &OrbitParams, t: f64) -> Vector3<f64> {
    let w0t = orbit.orbital_rate() * t;
    let (s_im, c_im) = orbit.magnetic_inclination_rad.sin_cos();
    orbit.field_scale() * Vector3::new(w0t.cos() * s_im, -c_im, 2.0 * w0t.sin() * s_im)
}

/// The six nonzero entries of the lower input block `B2(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputCoefficients {
    pub b42: f64,
    pub b43: f64,
    pub b51: f64,
    pub b53: f64,
    pub b61: f64,
    pub b62: f64,
}

/// Continuous linearized model `x' = A x + B(t) m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousModel {
    a: Matrix6<f64>,
    pub f41: f64,
    pub f46: f64,
    pub f52: f64,
    pub f63: f64,
    pub f64: f64,
    pub omega0: f64,
    period: f64,
    field_scale: f64,
    inclination: f64,
    moments: [f64; 3],
}

/// Assembles `A` and the `B(t)` factory from the spacecraft and orbit.
pub fn build_continuous(j: &InertiaMatrix, orbit: &OrbitParams) -> Result<ContinuousModel> {
    orbit.validate()?;
    if !j.is_diagonal() {
        return Err(Error::InvalidInertia(
            "products of inertia must be zero; the linearization is written in principal axes"
                .into(),
        ));
    }
    if !j.has_distinct_principal_axes() {
        let [j11, j22, j33] = j.principal_moments();
        return Err(Error::SingularA { j11, j22, j33 });
    }
    let [j11, j22, j33] = j.principal_moments();
    let w0 = orbit.orbital_rate();
    let w0_sq = w0 * w0;

    let f41 = 8.0 * (j33 - j22) * w0_sq / j11;
    let f46 = (-j11 + j22 - j33) * w0 / j11;
    let f64 = (j11 - j22 + j33) * w0 / j33;
    let f52 = 6.0 * (j33 - j11) * w0_sq / j22;
    let f63 = 2.0 * (j11 - j22) * w0_sq / j33;

    let mut a = Matrix6::zeros();
    for i in 0..3 {
        a[(i, i + 3)] = 0.5;
    }
    a[(3, 0)] = f41;
    a[(3, 5)] = f46;
    a[(4, 1)] = f52;
    a[(5, 2)] = f63;
    a[(5, 3)] = f64;

    Ok(ContinuousModel {
        a,
        f41,
        f46,
        f52,
        f63,
        f64,
        omega0: w0,
        period: orbital_period(orbit),
        field_scale: orbit.field_scale(),
        inclination: orbit.magnetic_inclination_rad,
        moments: [j11, j22, j33],
    })
}

impl ContinuousModel {
    pub fn a(&self) -> &Matrix6<f64> {
        &self.a
    }

    /// Lower-left block `Lambda1` of `A`.
    pub fn lambda1(&self) -> Matrix3<f64> {
        self.a.fixed_view::<3, 3>(3, 0).into_owned()
    }

    /// Lower-right block `Sigma1` of `A`.
    pub fn sigma1(&self) -> Matrix3<f64> {
        self.a.fixed_view::<3, 3>(3, 3).into_owned()
    }

    pub fn orbital_period(&self) -> f64 {
        self.period
    }

    pub fn input_coefficients(&self, t: f64) -> InputCoefficients {
        let [j11, j22, j33] = self.moments;
        let (s_im, c_im) = self.inclination.sin_cos();
        let (s, c) = (self.omega0 * t).sin_cos();
        let k = self.field_scale;
        let b42 = 2.0 * k / j11 * s_im * s;
        let b43 = k / j11 * c_im;
        let b53 = k / j22 * s_im * c;
        InputCoefficients {
            b42,
            b43,
            b53,
            b51: -b42 * j11 / j22,
            b61: -b43 * j11 / j33,
            b62: -b53 * j22 / j33,
        }
    }

    /// Lower input block `B2(t)`; its diagonal is zero.
    pub fn b2(&self, t: f64) -> Matrix3<f64> {
        let c = self.input_coefficients(t);
        Matrix3::new(
            0.0, c.b42, c.b43, //
            c.b51, 0.0, c.b53, //
            c.b61, c.b62, 0.0,
        )
    }

    /// Full input matrix `B(t) = [0; B2(t)]`.
    pub fn b(&self, t: f64) -> Matrix6x3<f64> {
        let mut b = Matrix6x3::zeros();
        b.fixed_view_mut::<3, 3>(3, 0).copy_from(&self.b2(t));
        b
    }

    /// `det(I + ts Sigma1 - ts²/2 Lambda1)`, which equals `det(I + A ts)`.
    pub fn discrete_determinant(&self, ts: f64) -> f64 {
        (Matrix3::identity() + self.sigma1() * ts - self.lambda1() * (0.5 * ts * ts)).determinant()
    }
}

/// Periodic discrete plant `x_{k+1} = Ak x_k + B_k m_k` with constant `Ak`.
///
/// Stored as dynamically sized matrices so the solvers also accept small
/// synthetic systems.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicDiscreteModel {
    ak: DMatrix<f64>,
    bk: Vec<DMatrix<f64>>,
    ts: f64,
}

impl PeriodicDiscreteModel {
    pub fn new(ak: DMatrix<f64>, bk: Vec<DMatrix<f64>>, ts: f64) -> Result<Self> {
        let n = ak.nrows();
        if n == 0 || !ak.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Ak must be square and nonempty, got {}x{}",
                ak.nrows(),
                ak.ncols()
            )));
        }
        let Some(m) = bk.first().map(|b| b.ncols()) else {
            return Err(Error::DimensionMismatch("period must be at least 1".into()));
        };
        if let Some(k) = bk.iter().position(|b| b.nrows() != n || b.ncols() != m) {
            return Err(Error::DimensionMismatch(format!(
                "B_{k} has shape {}x{}, expected {n}x{m}",
                bk[k].nrows(),
                bk[k].ncols()
            )));
        }
        if !(ts > 0.0) {
            return Err(Error::DimensionMismatch(format!(
                "sample time must be positive, got {ts}"
            )));
        }
        if linalg::checked_inverse(&ak).is_none() {
            return Err(Error::SingularAk {
                ts,
                det: ak.determinant(),
            });
        }
        Ok(Self { ak, bk, ts })
    }

    pub fn ak(&self) -> &DMatrix<f64> {
        &self.ak
    }

    /// `B_k` with the index taken modulo the period.
    pub fn bk(&self, k: usize) -> &DMatrix<f64> {
        &self.bk[k % self.bk.len()]
    }

    pub fn bk_list(&self) -> &[DMatrix<f64>] {
        &self.bk
    }

    pub fn period(&self) -> usize {
        self.bk.len()
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    pub fn state_dim(&self) -> usize {
        self.ak.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.bk[0].ncols()
    }
}

/// First-order discretization `Ak = I + A ts`, `B_k = B(k ts) ts` with `ts = P / p`.
pub fn discretize(cm: &ContinuousModel, p: usize) -> Result<PeriodicDiscreteModel> {
    if p == 0 {
        return Err(Error::DimensionMismatch(
            "samples per orbit must be at least 1".into(),
        ));
    }
    let ts = cm.orbital_period() / p as f64;
    let det = cm.discrete_determinant(ts);
    let scale = (Matrix3::<f64>::identity()
        + cm.sigma1().abs() * ts
        + cm.lambda1().abs() * (0.5 * ts * ts))
        .determinant()
        .abs();
    if !det.is_finite() || det.abs() <= f64::EPSILON * scale.max(1.0) {
        return Err(Error::SingularAk { ts, det });
    }
    let ak = Matrix6::identity() + cm.a() * ts;
    let ak = DMatrix::from_column_slice(STATE_DIM, STATE_DIM, ak.as_slice());
    let bk = (0..p)
        .map(|k| {
            let b = cm.b(k as f64 * ts) * ts;
            DMatrix::from_column_slice(STATE_DIM, INPUT_DIM, b.as_slice())
        })
        .collect();
    PeriodicDiscreteModel::new(ak, bk, ts)
}
