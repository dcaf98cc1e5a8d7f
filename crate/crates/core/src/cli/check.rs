//! Invariant suite behind the `check` subcommand.

use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::Result;
use crate::riccati::{riccati_residual, solve_dare_lti, solve_periodic, GainSchedule, SolverTag};
use crate::sim::monodromy;
use crate::symplectic::{build_pencil, reciprocal_spectrum_defect, symplectic_residual};

use super::commands::{build_models, Overrides};
use super::config::load_config;

pub const SYMPLECTIC_TOL: f64 = 1e-8;
pub const RECIPROCAL_TOL: f64 = 1e-6;
pub const PRODUCT_INVERSE_TOL: f64 = 1e-8;
pub const SYMMETRY_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = -1e-10;
pub const RESIDUAL_TOL: f64 = 1e-6;
pub const GAMMA_PI_TOL: f64 = 1e-6;
pub const PAIRWISE_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Below(f64),
    Equals(f64),
}

impl Bound {
    fn holds(self, value: f64) -> bool {
        match self {
            Bound::AtMost(b) => value <= b,
            Bound::AtLeast(b) => value >= b,
            Bound::Below(b) => value < b,
            Bound::Equals(b) => value == b,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(b) => write!(f, "<= {b:e}"),
            Bound::AtLeast(b) => write!(f, ">= {b:e}"),
            Bound::Below(b) => write!(f, "< {b}"),
            Bound::Equals(b) => write!(f, "== {b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub passed: bool,
}

#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    fn push(&mut self, name: impl Into<String>, value: f64, bound: Bound) {
        self.checks.push(CheckResult {
            name: name.into(),
            value,
            passed: bound.holds(value),
            bound,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<34} {:>12.4e}  ({})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.bound
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Runs every solver on the config and checks the structural and numerical
/// invariants that tie them together. Solver failures surface as errors;
/// violated invariants come back as failed entries of the report.
pub fn cmd_check(config_path: &Path, overrides: &Overrides) -> Result<CheckReport> {
    let mut loaded = load_config(config_path)?;
    if let Some(out) = &overrides.out {
        loaded.scenario.output_dir = out.clone();
    }
    let s = &loaded.scenario;
    let (_, pm) = build_models(s)?;
    let p = pm.period();
    let n = pm.state_dim();
    let mut report = CheckReport::default();

    let gamma_pencil = build_pencil(&pm, s.weights.q(), s.weights.r())?;
    let pi_pencil = build_pencil(&pm, s.weights.q(), s.weights.r())?;
    let mut symplectic = 0.0f64;
    let mut product_inverse = 0.0f64;
    for k in 0..p {
        let gk = gamma_pencil.gamma_product(k)?;
        let pk = pi_pencil.pi_product(k)?;
        symplectic = symplectic.max(symplectic_residual(&gk)?);
        product_inverse = product_inverse.max((&gk * &pk - DMatrix::identity(2 * n, 2 * n)).norm());
    }
    report.push(
        "Gamma_k symplectic residual",
        symplectic,
        Bound::AtMost(SYMPLECTIC_TOL),
    );
    report.push(
        "Gamma_0 reciprocal spectrum",
        reciprocal_spectrum_defect(&gamma_pencil.gamma_product(0)?)?,
        Bound::AtMost(RECIPROCAL_TOL),
    );
    report.push(
        "Gamma_k Pi_k - I",
        product_inverse,
        Bound::AtMost(PRODUCT_INVERSE_TOL),
    );

    let gamma_pencil = build_pencil(&pm, s.weights.q(), s.weights.r())?;
    let gamma = solve_periodic(SolverTag::GammaSchur, &gamma_pencil, &s.weights, &s.options)?;
    let pi_pencil = build_pencil(&pm, s.weights.q(), s.weights.r())?;
    let pi = solve_periodic(SolverTag::PiSchur, &pi_pencil, &s.weights, &s.options)?;
    let eigen_pencil = build_pencil(&pm, s.weights.q(), s.weights.r())?;
    let eigen = solve_periodic(SolverTag::Eigen, &eigen_pencil, &s.weights, &s.options)?;
    let oracle = solve_periodic(
        SolverTag::RecursionOracle,
        &eigen_pencil,
        &s.weights,
        &s.options,
    )?;

    report.push(
        "P_k asymmetry",
        gamma.max_asymmetry(),
        Bound::AtMost(SYMMETRY_TOL),
    );
    report.push(
        "P_k PSD margin",
        gamma.min_psd_margin(),
        Bound::AtLeast(PSD_TOL),
    );
    report.push(
        "Riccati residual",
        max_of(riccati_residual(&pm, &s.weights, &gamma)?),
        Bound::AtMost(RESIDUAL_TOL),
    );
    report.push(
        "gamma-schur vs pi-schur",
        gamma.max_relative_difference(&pi),
        Bound::AtMost(GAMMA_PI_TOL),
    );
    let all: [&GainSchedule; 4] = [&gamma, &pi, &eigen, &oracle];
    let mut pairwise = 0.0f64;
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            pairwise = pairwise.max(a.max_relative_difference(b));
        }
    }
    report.push(
        "pairwise solver agreement",
        pairwise,
        Bound::AtMost(PAIRWISE_TOL),
    );
    report.push(
        "gamma path inversions",
        gamma_pencil.inversion_count() as f64,
        Bound::Equals(1.0),
    );
    report.push(
        "pi path inversions",
        pi_pencil.inversion_count() as f64,
        Bound::Equals(p as f64),
    );
    report.push(
        "monodromy spectral radius",
        monodromy(&pm, &gamma)?.spectral_radius,
        Bound::Below(1.0),
    );
    if p == 1 {
        let lti = solve_dare_lti(pm.ak(), pm.bk(0), s.weights.q(), s.weights.r())?;
        report.push(
            "LTI DARE agreement",
            crate::linalg::relative_difference(gamma.p(0), &lti),
            Bound::AtMost(PAIRWISE_TOL),
        );
    }
    Ok(report)
}
