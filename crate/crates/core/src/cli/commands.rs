use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{build_continuous, discretize, ContinuousModel, PeriodicDiscreteModel};
use crate::riccati::{riccati_residual, solve_periodic, GainSchedule, SolverTag};
use crate::sim::{monodromy, simulate_closed_loop, SimulationConfig};
use crate::symplectic::build_pencil;

use super::config::{load_config, LoadedConfig, Scenario};
use super::output;
use super::schedule::{read_schedule, write_schedule};

pub const SCHEDULE_FILE: &str = "schedule.txt";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const FIELD_FILE: &str = "field.csv";
pub const DEFAULT_FIELD_SAMPLES: usize = 200;

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub solver: Option<SolverTag>,
    pub out: Option<PathBuf>,
    pub plots: bool,
}

impl Overrides {
    fn apply(&self, loaded: &mut LoadedConfig) {
        let s = &mut loaded.scenario;
        if let Some(tag) = self.solver {
            s.solver = tag;
        }
        if let Some(out) = &self.out {
            s.output_dir = out.clone();
        }
        s.plots |= self.plots;
    }
}

fn load(config_path: &Path, overrides: &Overrides) -> Result<LoadedConfig> {
    let mut loaded = load_config(config_path)?;
    overrides.apply(&mut loaded);
    Ok(loaded)
}

fn output_dir(s: &Scenario) -> Result<&Path> {
    std::fs::create_dir_all(&s.output_dir)?;
    Ok(&s.output_dir)
}

/// Continuous and discrete models of a scenario.
pub fn build_models(s: &Scenario) -> Result<(ContinuousModel, PeriodicDiscreteModel)> {
    let cm = build_continuous(&s.inertia, &s.orbit)?;
    let pm = discretize(&cm, s.samples_per_orbit)?;
    Ok((cm, pm))
}

/// Outcome of a solver run on a scenario.
#[derive(Clone, Debug)]
pub struct Design {
    pub model: PeriodicDiscreteModel,
    pub schedule: GainSchedule,
    /// 2n×2n inversions performed, `None` for the recursion oracle.
    pub inversions: Option<usize>,
}

pub fn design(s: &Scenario, tag: SolverTag) -> Result<Design> {
    let (_, pm) = build_models(s)?;
    let pencil = build_pencil(&pm, s.weights.q(), s.weights.r())?;
    let schedule = solve_periodic(tag, &pencil, &s.weights, &s.options)?;
    let inversions = (tag != SolverTag::RecursionOracle).then(|| pencil.inversion_count());
    Ok(Design {
        model: pm,
        schedule,
        inversions,
    })
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solver: SolverTag,
    pub period: usize,
    pub ts: f64,
    pub max_residual: f64,
    pub max_asymmetry: f64,
    pub min_psd_margin: f64,
    pub spectral_radius: f64,
    pub inversions: Option<usize>,
    pub schedule_path: PathBuf,
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "solver               {}", self.solver)?;
        writeln!(f, "samples per orbit p  {}", self.period)?;
        writeln!(f, "sample time ts       {:.6} s", self.ts)?;
        writeln!(f, "max Riccati residual {:.3e}", self.max_residual)?;
        writeln!(f, "max asymmetry        {:.3e}", self.max_asymmetry)?;
        writeln!(f, "min PSD margin       {:.3e}", self.min_psd_margin)?;
        writeln!(f, "monodromy radius     {:.6}", self.spectral_radius)?;
        match self.inversions {
            Some(n) => writeln!(f, "2n x 2n inversions   {n}")?,
            None => writeln!(f, "2n x 2n inversions   n/a")?,
        }
        write!(f, "schedule             {}", self.schedule_path.display())
    }
}

/// Solves the periodic Riccati equation for a config and writes the schedule.
pub fn cmd_solve(config_path: &Path, overrides: &Overrides) -> Result<SolveReport> {
    let loaded = load(config_path, overrides)?;
    let s = &loaded.scenario;
    let d = design(s, s.solver)?;
    let residuals = riccati_residual(&d.model, &s.weights, &d.schedule)?;
    let mono = monodromy(&d.model, &d.schedule)?;
    let schedule_path = output_dir(s)?.join(SCHEDULE_FILE);
    write_schedule(&schedule_path, &d.schedule, &loaded.hash)?;
    Ok(SolveReport {
        solver: s.solver,
        period: d.model.period(),
        ts: d.model.ts(),
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
        max_asymmetry: d.schedule.max_asymmetry(),
        min_psd_margin: d.schedule.min_psd_margin(),
        spectral_radius: mono.spectral_radius,
        inversions: d.inversions,
        schedule_path,
    })
}

#[derive(Clone, Debug)]
pub struct SimulateReport {
    pub num_steps: usize,
    pub initial_norm: f64,
    pub final_norm: f64,
    /// `‖x‖` at the end of each whole orbit.
    pub orbit_norms: Vec<f64>,
    pub trajectory_path: PathBuf,
    pub plots: Vec<PathBuf>,
}

impl SimulateReport {
    pub fn decay_factor(&self) -> f64 {
        if self.initial_norm == 0.0 {
            0.0
        } else {
            self.final_norm / self.initial_norm
        }
    }
}

impl fmt::Display for SimulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "steps                {}", self.num_steps)?;
        writeln!(f, "initial |x|          {:.6e}", self.initial_norm)?;
        writeln!(f, "final |x|            {:.6e}", self.final_norm)?;
        writeln!(f, "decay factor         {:.6e}", self.decay_factor())?;
        for (j, n) in self.orbit_norms.iter().enumerate() {
            writeln!(f, "  orbit {:>3} |x|      {:.6e}", j + 1, n)?;
        }
        for p in &self.plots {
            writeln!(f, "plot                 {}", p.display())?;
        }
        write!(f, "trajectory           {}", self.trajectory_path.display())
    }
}

fn check_schedule_matches(pm: &PeriodicDiscreteModel, schedule: &GainSchedule) -> Result<()> {
    let mut problems = Vec::new();
    if schedule.period() != pm.period() {
        problems.push(format!(
            "p = {} but config gives {}",
            schedule.period(),
            pm.period()
        ));
    }
    if schedule.state_dim() != pm.state_dim() || schedule.input_dim() != pm.input_dim() {
        problems.push(format!(
            "n, m = {}, {} but model has {}, {}",
            schedule.state_dim(),
            schedule.input_dim(),
            pm.state_dim(),
            pm.input_dim()
        ));
    }
    if (schedule.ts() - pm.ts()).abs() > 1e-12 * pm.ts() {
        problems.push(format!(
            "ts = {} but config gives {}",
            schedule.ts(),
            pm.ts()
        ));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::ScheduleMismatch(problems.join("; ")))
    }
}

/// Simulates the closed loop with a stored schedule and writes the trajectory CSV.
pub fn cmd_simulate(
    config_path: &Path,
    schedule_path: &Path,
    overrides: &Overrides,
) -> Result<SimulateReport> {
    let loaded = load(config_path, overrides)?;
    let s = &loaded.scenario;
    let settings = s
        .simulation
        .as_ref()
        .ok_or_else(|| Error::config("simulation", "section is required for simulate"))?;
    let (_, pm) = build_models(s)?;
    let file = read_schedule(schedule_path)?;
    check_schedule_matches(&pm, &file.schedule)?;
    if file.config_hash != loaded.hash {
        log::warn!(
            "schedule {} was produced from a different config file",
            schedule_path.display()
        );
    }
    let num_steps = settings.num_orbits * pm.period();
    let mut cfg = SimulationConfig::new(settings.x0.clone(), num_steps)?;
    if let Some(limit) = settings.moment_limit {
        cfg = cfg.with_moment_limit(limit)?;
    }
    let traj = simulate_closed_loop(&pm, &file.schedule, &cfg)?;
    let dir = output_dir(s)?;
    let trajectory_path = dir.join(TRAJECTORY_FILE);
    output::write_trajectory_csv(&trajectory_path, &traj)?;
    let plots = if s.plots {
        output::plot_trajectory(dir, &traj)?
    } else {
        Vec::new()
    };
    Ok(SimulateReport {
        num_steps,
        initial_norm: traj.initial_norm(),
        final_norm: traj.final_norm(),
        orbit_norms: (1..=settings.num_orbits)
            .map(|j| traj.states[j * pm.period()].norm())
            .collect(),
        trajectory_path,
        plots,
    })
}

#[derive(Clone, Debug)]
pub struct FieldReport {
    pub num_samples: usize,
    pub period: f64,
    pub max_abs: [f64; 3],
    pub field_path: PathBuf,
    pub plots: Vec<PathBuf>,
}

impl fmt::Display for FieldReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples              {}", self.num_samples)?;
        writeln!(f, "orbital period       {:.3} s", self.period)?;
        for (i, m) in self.max_abs.iter().enumerate() {
            writeln!(f, "max |b{}|             {:.6e} T", i + 1, m)?;
        }
        for p in &self.plots {
            writeln!(f, "plot                 {}", p.display())?;
        }
        write!(f, "field                {}", self.field_path.display())
    }
}

/// Samples the orbit-frame dipole field over one period and writes the field CSV.
pub fn cmd_field(
    config_path: &Path,
    num_samples: usize,
    overrides: &Overrides,
) -> Result<FieldReport> {
    if num_samples < 2 {
        return Err(Error::config("--samples", "need at least 2 samples"));
    }
    let loaded = load(config_path, overrides)?;
    let s = &loaded.scenario;
    let samples = output::sample_field(&s.orbit, num_samples);
    let dir = output_dir(s)?;
    let field_path = dir.join(FIELD_FILE);
    output::write_field_csv(&field_path, &samples)?;
    let plots = if s.plots {
        output::plot_field(dir, &samples)?
    } else {
        Vec::new()
    };
    let mut max_abs = [0.0f64; 3];
    for (_, b) in &samples {
        for i in 0..3 {
            max_abs[i] = max_abs[i].max(b[i].abs());
        }
    }
    Ok(FieldReport {
        num_samples,
        period: s.orbit.orbital_period(),
        max_abs,
        field_path,
        plots,
    })
}

pub use super::check::cmd_check;
