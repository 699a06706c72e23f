//! Numerical toolkit for the local Szegő–Weinberger profile.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Bessel functions, the first nontrivial Neumann eigenvalue of
//!   the Euclidean unit ball, its radial eigenprofile and every derived constant.
//! * [`geometry`]: curvature tensors at a base point, synthetic metric fields on
//!   the unit ball and geodesic-ball volumes.
//! * [`eigensolve`]: meshes, P1 finite elements for the Laplace–Beltrami
//!   operator with natural boundary conditions, radial shooting on space forms
//!   and the Weinberger test-function upper bound.
//! * [`asymptotics`]: radius sweeps, constant-term extraction and comparison
//!   against the closed-form coefficients.
//!
//! Everything is a pure function of its inputs; nothing holds global state.

pub mod asymptotics;
pub mod eigensolve;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod quad;
pub mod roots;
pub mod specfun;

pub use error::{Error, Result};

/// Supported dimension range for the closed-form constants.
pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 50;
