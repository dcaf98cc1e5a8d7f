//! Closed-loop propagation of the periodic discrete plant under a gain schedule.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::PeriodicDiscreteModel;
use crate::riccati::{GainSchedule, WeightConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub x0: DVector<f64>,
    pub num_steps: usize,
    /// Elementwise clamp on the commanded moment, A·m². Off when `None`.
    pub moment_limit: Option<f64>,
}

impl SimulationConfig {
    pub fn new(x0: DVector<f64>, num_steps: usize) -> Result<Self> {
        if num_steps == 0 {
            return Err(Error::DimensionMismatch(
                "num_steps must be at least 1".into(),
            ));
        }
        Ok(Self {
            x0,
            num_steps,
            moment_limit: None,
        })
    }

    pub fn with_moment_limit(mut self, limit: f64) -> Result<Self> {
        if !(limit > 0.0) {
            return Err(Error::DimensionMismatch(format!(
                "moment limit must be positive, got {limit}"
            )));
        }
        self.moment_limit = Some(limit);
        Ok(self)
    }
}

/// States at `t_k = k ts` for `k = 0..=num_steps` and the moments applied on each interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub moments: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn num_steps(&self) -> usize {
        self.moments.len()
    }

    pub fn initial_norm(&self) -> f64 {
        self.states[0].norm()
    }

    pub fn final_norm(&self) -> f64 {
        self.states.last().map(|x| x.norm()).unwrap_or(0.0)
    }

    /// `Σ x_kᵀ Q x_k + m_kᵀ R m_k` over the simulated steps.
    pub fn quadratic_cost(&self, weights: &WeightConfig) -> f64 {
        self.states
            .iter()
            .zip(&self.moments)
            .map(|(x, m)| x.dot(&(weights.q() * x)) + m.dot(&(weights.r() * m)))
            .sum()
    }
}

fn check_compatible(pm: &PeriodicDiscreteModel, schedule: &GainSchedule) -> Result<()> {
    if schedule.period() != pm.period()
        || schedule.state_dim() != pm.state_dim()
        || schedule.input_dim() != pm.input_dim()
    {
        return Err(Error::DimensionMismatch(format!(
            "schedule (p={}, n={}, m={}) does not fit model (p={}, n={}, m={})",
            schedule.period(),
            schedule.state_dim(),
            schedule.input_dim(),
            pm.period(),
            pm.state_dim(),
            pm.input_dim()
        )));
    }
    let rel = (schedule.ts() - pm.ts()).abs() / pm.ts();
    if rel > 1e-12 {
        return Err(Error::DimensionMismatch(format!(
            "schedule sample time {} differs from model sample time {}",
            schedule.ts(),
            pm.ts()
        )));
    }
    Ok(())
}

/// `x_{k+1} = Ak x_k + B_{k mod p} m_k`, `m_k = -K_{k mod p} x_k`, optionally clamped.
pub fn simulate_closed_loop(
    pm: &PeriodicDiscreteModel,
    schedule: &GainSchedule,
    cfg: &SimulationConfig,
) -> Result<Trajectory> {
    check_compatible(pm, schedule)?;
    if cfg.x0.len() != pm.state_dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial state has {} entries, expected {}",
            cfg.x0.len(),
            pm.state_dim()
        )));
    }
    let ts = pm.ts();
    let mut times = Vec::with_capacity(cfg.num_steps + 1);
    let mut states = Vec::with_capacity(cfg.num_steps + 1);
    let mut moments = Vec::with_capacity(cfg.num_steps);
    let mut x = cfg.x0.clone();
    times.push(0.0);
    states.push(x.clone());
    for k in 0..cfg.num_steps {
        let mut m = -(schedule.gain(k) * &x);
        if let Some(limit) = cfg.moment_limit {
            m.apply(|v| *v = v.clamp(-limit, limit));
        }
        x = pm.ak() * &x + pm.bk(k) * &m;
        times.push((k + 1) as f64 * ts);
        states.push(x.clone());
        moments.push(m);
    }
    Ok(Trajectory {
        times,
        states,
        moments,
    })
}

/// One-period closed-loop transition and its spectral radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Monodromy {
    pub matrix: DMatrix<f64>,
    pub spectral_radius: f64,
}

/// `Φ = (Ak - B_{p-1}K_{p-1}) ··· (Ak - B_0 K_0)`.
pub fn monodromy(pm: &PeriodicDiscreteModel, schedule: &GainSchedule) -> Result<Monodromy> {
    check_compatible(pm, schedule)?;
    let n = pm.state_dim();
    let mut phi = DMatrix::identity(n, n);
    for k in 0..pm.period() {
        phi = (pm.ak() - pm.bk(k) * schedule.gain(k)) * phi;
    }
    let spectral_radius = linalg::spectral_radius(&phi);
    Ok(Monodromy {
        matrix: phi,
        spectral_radius,
    })
}
