//! Periodic LQR design for spacecraft attitude control with magnetorquers.
//!
//! The plant is the linearized reduced-quaternion attitude model in a
//! circular orbit, driven by a dipole geomagnetic field. Discretized over one
//! orbit it becomes a `p`-periodic system whose periodic Riccati solution is
//! computed from ordered Schur forms of symplectic monodromy products.

pub mod cli;
pub mod error;
mod linalg;
pub mod model;
pub mod riccati;
pub mod sim;
pub mod symplectic;

pub use error::{Error, Result};
