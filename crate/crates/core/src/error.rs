use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building, solving, or simulating.
#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "SingularA: principal moments must be pairwise distinct (J11={j11}, J22={j22}, J33={j33})"
    )]
    SingularA { j11: f64, j22: f64, j33: f64 },

    #[error("SingularAk: discrete state matrix is not invertible at ts = {ts} s (det = {det:e})")]
    SingularAk { ts: f64, det: f64 },

    #[error("invalid inertia matrix: {0}")]
    InvalidInertia(String),

    #[error("invalid orbit parameters: {0}")]
    InvalidOrbit(String),

    #[error("OddDimension: expected an even square matrix, got {rows}x{cols}")]
    OddDimension { rows: usize, cols: usize },

    #[error("SingularInput: matrix is numerically singular")]
    SingularInput,

    #[error("IndefiniteR: input weight must be symmetric positive definite")]
    IndefiniteR,

    #[error("NegativeQ: state weight must be symmetric positive semi-definite (min eigenvalue {min_eig:e})")]
    NegativeQ { min_eig: f64 },

    #[error("{which} weight is not symmetric")]
    AsymmetricWeight { which: &'static str },

    #[error("detectability of (Ak, Q) is not established: Q is not positive definite and detectability was not asserted")]
    DetectabilityUnverified,

    #[error("IndexOutOfRange: k = {k} is not in 0..{p}")]
    IndexOutOfRange { k: usize, p: usize },

    #[error("SingularEk: E_{k} is not invertible")]
    SingularEk { k: usize },

    #[error("UnitCircleEigenvalue: |log|lambda|| = {margin:e} does not exceed tolerance {tol:e} (lambda = {re} + {im}i)")]
    UnitCircleEigenvalue {
        re: f64,
        im: f64,
        margin: f64,
        tol: f64,
    },

    #[error(
        "spectrum does not split: {selected} eigenvalues satisfy the ordering, expected {expected}"
    )]
    UnbalancedSpectrum { selected: usize, expected: usize },

    #[error("real Schur iteration did not converge")]
    SchurNotConverged,

    #[error("Schur block swap rejected at position {position} (residual {residual:e})")]
    SwapRejected { position: usize, residual: f64 },

    #[error("SingularU11: stable subspace basis block is singular (stabilizability failure)")]
    SingularU11,

    #[error("SingularW11: Schur basis block W11 is singular at k = {k}")]
    SingularW11 { k: usize },

    #[error("SingularV11: eigenvector block V11 is singular at k = {k}")]
    SingularV11 { k: usize },

    #[error("DefectiveMatrix: eigenvalues are not distinct (separation {separation:e})")]
    DefectiveMatrix { separation: f64 },

    #[error("eigenvector solution keeps an imaginary residue of {residue:e}")]
    ComplexSolution { residue: f64 },

    #[error("NotConverged: backward recursion did not converge after {periods} periods (last change {change:e})")]
    NotConverged { periods: usize, change: f64 },

    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("schedule file error: {0}")]
    ScheduleFormat(String),

    #[error("schedule does not match config: {0}")]
    ScheduleMismatch(String),

    #[error("plot rendering failed: {0}")]
    Plot(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    ///
    /// 1 covers usage, config, and file problems; 2 covers numerical failures
    /// (singular matrices, dichotomy loss, non-convergence).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::ScheduleFormat(_)
            | Error::ScheduleMismatch(_)
            | Error::InvalidInertia(_)
            | Error::InvalidOrbit(_)
            | Error::Plot(_)
            | Error::Csv(_)
            | Error::Io(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
