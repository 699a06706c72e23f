//! Special functions and the closed-form constants of the unit-ball problem.

pub mod ball;
pub mod bessel;
pub mod constants;

pub use ball::{mu2_ball, unit_ball_volume, unit_sphere_area, BallSpectrum};
pub use bessel::{bessel_j, bessel_j_derivative, HalfOrder};
pub use constants::{derived_constants, ConstantsRow, DerivedConstants, IdentityChecks};
